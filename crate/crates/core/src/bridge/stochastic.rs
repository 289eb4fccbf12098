use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use super::BasisChoice;
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, RMat};
use crate::linmap::MapRep;
use crate::positivity::{PositivityVerdict, Property, Status, Tolerances, Witness, WitnessPayload};
use crate::rng;

/// Default tolerance for sign and sum constraints of stochastic matrices.
pub const STOCHASTIC_TOL: f64 = 1e-12;

const UNITARY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StochasticClass {
    Row,
    Column,
    Bi,
    Ortho,
    Pseudo,
    PseudoBi,
}

fn sums_to_one(sums: impl Iterator<Item = f64>, tol: f64) -> bool {
    sums.into_iter().all(|s| (s - 1.0).abs() <= tol)
}

/// Every class `m` belongs to; `Ortho` is tested only against `unitary`.
pub fn classify_stochastic(
    m: &RMat,
    unitary: Option<&CMat>,
    tol: f64,
) -> BTreeSet<StochasticClass> {
    let mut out = BTreeSet::new();
    if m.nrows() != m.ncols() || m.iter().any(|x| !x.is_finite()) {
        return out;
    }
    let nonneg = m.iter().all(|&x| x >= -tol);
    let cols = sums_to_one(m.column_iter().map(|col| col.sum()), tol);
    let rows = sums_to_one(m.row_iter().map(|row| row.sum()), tol);
    if cols {
        out.insert(StochasticClass::Pseudo);
    }
    if cols && rows {
        out.insert(StochasticClass::PseudoBi);
    }
    if nonneg && cols {
        out.insert(StochasticClass::Column);
    }
    if nonneg && rows {
        out.insert(StochasticClass::Row);
    }
    if nonneg && rows && cols {
        out.insert(StochasticClass::Bi);
    }
    if let Some(u) = unitary {
        let matches = u.nrows() == m.nrows()
            && u.ncols() == m.ncols()
            && is_unitary(u, UNITARY_TOL)
            && m.iter()
                .zip(u.iter())
                .all(|(&s, z)| (s - z.norm_sqr()).abs() <= tol);
        if matches {
            out.insert(StochasticClass::Ortho);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix {
    m: RMat,
    classes: BTreeSet<StochasticClass>,
    unitary: Option<CMat>,
}

impl StochasticMatrix {
    /// Records whatever classes `m` satisfies.
    pub fn classified(m: RMat, tol: f64) -> Self {
        let classes = classify_stochastic(&m, None, tol);
        StochasticMatrix {
            m,
            classes,
            unitary: None,
        }
    }

    pub fn column(m: RMat) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix",
                m.nrows(),
                m.ncols()
            )));
        }
        let s = Self::classified(m, STOCHASTIC_TOL);
        if !s.is_column_stochastic() {
            return Err(Error::NotColumnStochastic(
                "negative entries or column sums differ from 1".into(),
            ));
        }
        Ok(s)
    }

    /// `S_ij = |U_ij|²`, with `U` recorded.
    pub fn orthostochastic(u: &CMat) -> Result<Self> {
        linalg::check_square(u, "unitary")?;
        if !is_unitary(u, UNITARY_TOL) {
            return Err(Error::BadParameter("matrix is not unitary".into()));
        }
        let m = u.map(|z| z.norm_sqr());
        let classes = classify_stochastic(&m, Some(u), 1e-10);
        Ok(StochasticMatrix {
            m,
            classes,
            unitary: Some(u.clone()),
        })
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &RMat {
        &self.m
    }

    pub fn classes(&self) -> &BTreeSet<StochasticClass> {
        &self.classes
    }

    pub fn unitary(&self) -> Option<&CMat> {
        self.unitary.as_ref()
    }

    pub fn is_column_stochastic(&self) -> bool {
        self.classes.contains(&StochasticClass::Column)
    }
}

/// `Φ_S(X) = Σ_ij S_ij ⟨j|X|j⟩ E_ii`
pub fn channel_from_stochastic(s: &StochasticMatrix) -> Result<MapRep> {
    if !s.is_column_stochastic() {
        return Err(Error::NotColumnStochastic(
            "channel requires a column-stochastic matrix".into(),
        ));
    }
    let d = s.dim();
    let mut sup = CMat::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            sup[(i + i * d, j + j * d)] = c(s.m[(i, j)], 0.0);
        }
    }
    MapRep::from_superop(d, sup)
}

/// `S_ij = ⟨b_i|Φ(|b_j⟩⟨b_j|)|b_i⟩`
///
/// A unitary conjugation is recognized and its unitary, written in the
/// basis, recorded so that the result is tagged orthostochastic.
pub fn stochastic_from_map(map: &MapRep, basis: &BasisChoice) -> Result<StochasticMatrix> {
    let d = map.dim();
    if basis.dim() != d {
        return Err(Error::DimensionMismatch(format!(
            "basis of size {} for a map on M_{d}",
            basis.dim()
        )));
    }
    let m = RMat::from_fn(d, d, |i, j| {
        let out = map.apply_unchecked(&basis.unit(j, j));
        let b = basis.vector(i);
        (b.adjoint() * out * &b)[(0, 0)].re
    });
    let unitary = conjugating_unitary(map).map(|u| basis.unitary().adjoint() * u * basis.unitary());
    let tol = 1e-10;
    let classes = classify_stochastic(&m, unitary.as_ref(), tol);
    let unitary = unitary.filter(|_| classes.contains(&StochasticClass::Ortho));
    Ok(StochasticMatrix {
        m,
        classes,
        unitary,
    })
}

/// `U` with `Φ(X) = U X U*`, if the map has this form.
fn conjugating_unitary(map: &MapRep) -> Option<CMat> {
    let d = map.dim();
    let (vals, vecs) = linalg::eigh(&linalg::hermitian_part(map.choi()));
    let n = vals.len();
    let top = vals[n - 1];
    if top <= 0.0 || vals[0] < -1e-10 * top || (n > 1 && vals[n - 2] > 1e-10 * top) {
        return None;
    }
    let v = vecs.column(n - 1);
    let k = CMat::from_fn(d, d, |a, i| v[i * d + a] * top.sqrt());
    is_unitary(&k, UNITARY_TOL).then_some(k)
}

pub fn is_unitary(u: &CMat, tol: f64) -> bool {
    u.nrows() == u.ncols()
        && linalg::frobenius(&(u.adjoint() * u - linalg::identity(u.nrows()))) <= tol
}

pub fn is_permutation_matrix(m: &RMat, tol: f64) -> bool {
    let is_one = |x: f64| (x - 1.0).abs() <= tol;
    m.nrows() == m.ncols()
        && m.iter().all(|&x| x.abs() <= tol || is_one(x))
        && m.column_iter()
            .all(|col| col.iter().filter(|&&x| is_one(x)).count() == 1)
        && m.row_iter()
            .all(|row| row.iter().filter(|&&x| is_one(x)).count() == 1)
}

/// Whether `m` is invertible with a column-stochastic inverse.
pub fn has_stochastic_inverse(m: &RMat, tol: f64) -> bool {
    match m.clone().try_inverse() {
        Some(inv) => classify_stochastic(&inv, None, tol).contains(&StochasticClass::Column),
        None => false,
    }
}

/// Random search for `⟨ψ|Φ(|φ⟩⟨φ|)|ψ⟩ < −tol` over independent unit
/// vectors `ψ`, `φ`.
///
/// A witness is stored as the product vector `φ̄ ⊗ ψ`, whose Choi
/// expectation equals the sampled value.
pub fn check_strong_positivity(
    map: &MapRep,
    samples: usize,
    seed: u64,
    tol: f64,
) -> PositivityVerdict {
    let d = map.dim();
    let samples = samples.max(1);
    let best = (0..samples)
        .into_par_iter()
        .map(|s| {
            let mut r = rng::stream(seed, s as u64);
            let phi = linalg::random_unit_vector(&mut r, d);
            let psi = linalg::random_unit_vector(&mut r, d);
            let out = map.apply_unchecked(&linalg::outer(&phi, &phi));
            let value = (psi.adjoint() * out * &psi)[(0, 0)].re;
            (value, phi, psi)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .reduce(|best, next| if next.0 < best.0 { next } else { best })
        .expect("at least one sample");
    let (value, phi, psi) = best;
    let refuted = value < -tol;
    PositivityVerdict {
        property: Property::P(1),
        status: if refuted {
            Status::Refuted
        } else {
            Status::Undetermined
        },
        value,
        witness: refuted.then(|| Witness {
            payload: WitnessPayload::SchmidtVector {
                xs: vec![phi.conjugate()],
                ys: vec![psi],
            },
            value,
        }),
        certificate: None,
        tolerances: Tolerances {
            tol,
            rel_decrease: 0.0,
        },
        seed,
        restarts_used: samples,
        inherited_from: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linmap::{compose, gallery, GalleryMap};
    use crate::positivity::check_cp;

    fn set(classes: &[StochasticClass]) -> BTreeSet<StochasticClass> {
        classes.iter().copied().collect()
    }

    #[test]
    fn classification_examples() {
        use StochasticClass::*;
        let id = RMat::identity(3, 3);
        assert_eq!(
            classify_stochastic(&id, Some(&linalg::identity(3)), 1e-12),
            set(&[Row, Column, Bi, Ortho, Pseudo, PseudoBi])
        );
        let m = RMat::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 0.0]);
        assert_eq!(classify_stochastic(&m, None, 1e-12), set(&[Column, Pseudo]));
        let m = RMat::from_row_slice(2, 2, &[2.0, -1.0, -1.0, 2.0]);
        assert_eq!(
            classify_stochastic(&m, None, 1e-12),
            set(&[Pseudo, PseudoBi])
        );
    }

    #[test]
    fn channel_examples() {
        let pinch = gallery(&GalleryMap::Pinching { d: 3, basis: None }).unwrap();
        let id = channel_from_stochastic(&StochasticMatrix::column(RMat::identity(3, 3)).unwrap())
            .unwrap();
        assert!(linalg::frobenius(&(id.superop() - pinch.superop())) < 1e-15);

        let perm = RMat::from_row_slice(3, 3, &[0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let phi =
            channel_from_stochastic(&StochasticMatrix::column(perm.clone()).unwrap()).unwrap();
        // π(0) = 1, π(1) = 2, π(2) = 0
        let out = phi.apply(&linalg::matrix_unit(3, 0, 0)).unwrap();
        assert_eq!(out, linalg::matrix_unit(3, 1, 1));
        let back = stochastic_from_map(&phi, &BasisChoice::canonical(3)).unwrap();
        assert_eq!(back.matrix(), &perm);

        let half = StochasticMatrix::column(RMat::from_element(2, 2, 0.5)).unwrap();
        let phi = channel_from_stochastic(&half).unwrap();
        for j in 0..2 {
            let out = phi.apply(&linalg::matrix_unit(2, j, j)).unwrap();
            assert!(linalg::frobenius(&(out - linalg::identity(2).unscale(2.0))) < 1e-15);
        }
    }

    #[test]
    fn non_stochastic_rejected() {
        let m = RMat::from_row_slice(2, 2, &[2.0, -1.0, -1.0, 2.0]);
        assert!(matches!(
            StochasticMatrix::column(m.clone()),
            Err(Error::NotColumnStochastic(_))
        ));
        let s = StochasticMatrix::classified(m, 1e-12);
        assert!(matches!(
            channel_from_stochastic(&s),
            Err(Error::NotColumnStochastic(_))
        ));
    }

    #[test]
    fn fourier_conjugation_is_orthostochastic() {
        let f = crate::linmap::fourier_unitary(2);
        let m = gallery(&GalleryMap::UnitaryConjugation { u: f }).unwrap();
        let s = stochastic_from_map(&m, &BasisChoice::canonical(2)).unwrap();
        for x in s.matrix().iter() {
            assert!((x - 0.5).abs() < 1e-14);
        }
        assert!(s.classes().contains(&StochasticClass::Ortho));
        assert!(s.unitary().is_some());

        let pinch = gallery(&GalleryMap::Pinching { d: 3, basis: None }).unwrap();
        let s = stochastic_from_map(&pinch, &BasisChoice::canonical(3)).unwrap();
        assert_eq!(s.matrix(), &RMat::identity(3, 3));
    }

    #[test]
    fn representation_and_classical_collapse() {
        let mut r = rng::seeded(4);
        for d in 2..=4 {
            let s = random_column(&mut r, d);
            let t = random_column(&mut r, d);
            let ts = StochasticMatrix::column(t.matrix() * s.matrix()).unwrap();
            let lhs = channel_from_stochastic(&ts).unwrap();
            let rhs = compose(
                &channel_from_stochastic(&t).unwrap(),
                &channel_from_stochastic(&s).unwrap(),
            )
            .unwrap();
            assert!(linalg::frobenius(&(lhs.superop() - rhs.superop())) < 1e-13);
            assert!(check_cp(&channel_from_stochastic(&s).unwrap(), 1e-12)
                .unwrap()
                .is_certified());
        }
    }

    fn random_column(r: &mut rng::Rng, d: usize) -> StochasticMatrix {
        let cols: Vec<f64> = (0..d).flat_map(|_| linalg::random_simplex(r, d)).collect();
        StochasticMatrix::column(RMat::from_column_slice(d, d, &cols)).unwrap()
    }

    #[test]
    fn strong_positivity_examples() {
        let pinch = gallery(&GalleryMap::Pinching { d: 2, basis: None }).unwrap();
        assert_eq!(
            check_strong_positivity(&pinch, 500, 0, 1e-10).status,
            Status::Undetermined
        );
        let t = gallery(&GalleryMap::Transposition { d: 2 }).unwrap();
        assert_eq!(
            check_strong_positivity(&t, 500, 0, 1e-10).status,
            Status::Undetermined
        );
        let m = gallery(&GalleryMap::PhiA { d: 2, a: 1.5 }).unwrap();
        let v = check_strong_positivity(&m, 1000, 0, 1e-10);
        assert_eq!(v.status, Status::Refuted);
        assert!((v.witness.unwrap().reevaluate(&m) - v.value).abs() < 1e-12);
    }

    #[test]
    fn permutation_predicates() {
        let perm = RMat::from_row_slice(3, 3, &[0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        assert!(is_permutation_matrix(&perm, 1e-12));
        assert!(has_stochastic_inverse(&perm, 1e-12));
        let mixing = RMat::from_row_slice(2, 2, &[0.75, 0.25, 0.25, 0.75]);
        assert!(!is_permutation_matrix(&mixing, 1e-12));
        assert!(!has_stochastic_inverse(&mixing, 1e-12));
    }

    #[test]
    fn superop_of_phi_s_is_rank_deficient() {
        let mut r = rng::seeded(9);
        for d in 2..=4 {
            let s = random_column(&mut r, d);
            let sup = channel_from_stochastic(&s).unwrap().into_superop();
            let rank = sup
                .svd(false, false)
                .singular_values
                .iter()
                .filter(|&&x| x > 1e-12)
                .count();
            assert!(rank <= d);
        }
    }
}
