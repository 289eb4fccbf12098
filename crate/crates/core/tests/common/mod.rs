#![allow(dead_code)]

use posmap::linalg::{self, CMat};
use posmap::linmap::{self, gallery, GalleryMap, KrausSet, MapRep};
use posmap::rng::Rng;
use rand::Rng as _;

/// Hermiticity-preserving map with a random Hermitian Choi matrix.
pub fn random_hp_map(r: &mut Rng, d: usize) -> MapRep {
    MapRep::from_choi(d, linalg::random_hermitian(r, d * d)).unwrap()
}

/// Hermiticity- and trace-preserving map `K1 + β (K2 − K3)`.
pub fn random_hptp_map(r: &mut Rng, d: usize) -> MapRep {
    let k = |r: &mut Rng| KrausSet::random_channel(r, d, d).to_map();
    let beta = r.random::<f64>() * 2.0;
    let (k1, k2, k3) = (k(r), k(r), k(r));
    k1.add(&k2.sub(&k3).unwrap().scale(beta)).unwrap()
}

/// `U Φ_a(V X V*) U*` with random unitaries and `a ∈ [−1, 1.5]`.
pub fn random_rotated_phi_a(r: &mut Rng, d: usize) -> MapRep {
    let a = -1.0 + 2.5 * r.random::<f64>();
    let phi = gallery(&GalleryMap::PhiA { d, a }).unwrap();
    let u = gallery(&GalleryMap::UnitaryConjugation {
        u: linalg::haar_unitary(r, d),
    })
    .unwrap();
    let v = gallery(&GalleryMap::UnitaryConjugation {
        u: linalg::haar_unitary(r, d),
    })
    .unwrap();
    linmap::compose(&u, &linmap::compose(&phi, &v).unwrap()).unwrap()
}

/// Convex mixture of a channel and a channel followed by transposition,
/// both with `rank` Kraus operators.
pub fn random_decomposable_rank(r: &mut Rng, d: usize, rank: usize) -> MapRep {
    let s = r.random::<f64>();
    let k1 = KrausSet::random_channel(r, d, rank).to_map();
    let k2 = KrausSet::random_channel(r, d, rank).to_map();
    let t = gallery(&GalleryMap::Transposition { d }).unwrap();
    let tk2 = linmap::compose(&t, &k2).unwrap();
    k1.scale(1.0 - s).add(&tk2.scale(s)).unwrap()
}

pub fn random_decomposable(r: &mut Rng, d: usize) -> MapRep {
    random_decomposable_rank(r, d, 2)
}

/// Cycles through the generators above.
pub fn random_map(r: &mut Rng, d: usize, k: usize) -> MapRep {
    match k % 4 {
        0 => random_hp_map(r, d),
        1 => random_hptp_map(r, d),
        2 => random_rotated_phi_a(r, d),
        _ => random_decomposable(r, d),
    }
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}
