//! Decomposability search: `C_Φ = A + B^Γ` with `A, B ⪰ 0`, where `Γ` is
//! the partial transpose on the second factor. `A` is then the Choi matrix
//! of the CP part and `B` that of the map composed with the transposition.
//!
//! Dykstra's alternating projections between the product PSD cone and the
//! affine constraint. Non-convergence is reported as undetermined, never as
//! a refutation.

use super::verdict::{Certificate, PositivityVerdict, Property, Status, Tolerances};
use crate::linalg::{self, CMat};
use crate::linmap::MapRep;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecomposeOptions {
    pub max_iters: usize,
    /// Frobenius residual accepted for a certificate.
    pub tol: f64,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        DecomposeOptions {
            max_iters: 2000,
            tol: 1e-7,
        }
    }
}

const CHECK_EVERY: usize = 10;

pub fn decompose_map(map: &MapRep, opts: &DecomposeOptions) -> PositivityVerdict {
    let d = map.dim();
    let choi = linalg::hermitian_part(map.choi());
    let gamma = |m: &CMat| linalg::partial_transpose(m, d, d, true);

    let certify = |a: &CMat, b: &CMat| -> (CMat, CMat, f64) {
        let a = linalg::psd_projection(a);
        let b = linalg::psd_projection(b);
        let residual = linalg::frobenius(&(&choi - &a - gamma(&b)));
        (a, b, residual)
    };
    let zero = CMat::zeros(d * d, d * d);

    // Pure CP and pure co-CP parts first.
    let mut best = certify(&choi, &zero);
    let flipped = certify(&zero, &gamma(&choi));
    if flipped.2 < best.2 {
        best = flipped;
    }
    let mut iterations = 0;

    if best.2 >= opts.tol {
        let mut a = choi.scale(0.5);
        let mut b = gamma(&choi).scale(0.5);
        let (mut pa, mut pb) = (zero.clone(), zero.clone());
        let (mut qa, mut qb) = (zero.clone(), zero.clone());
        for k in 1..=opts.max_iters {
            iterations = k;
            // cone step
            let ya = linalg::psd_projection(&(&a + &pa));
            let yb = linalg::psd_projection(&(&b + &pb));
            pa = &a + &pa - &ya;
            pb = &b + &pb - &yb;
            // affine step: minimize distance subject to A + Γ(B) = C
            let (ta, tb) = (&ya + &qa, &yb + &qb);
            let r = &choi - &ta - gamma(&tb);
            let na = &ta + r.scale(0.5);
            let nb = &tb + gamma(&r).scale(0.5);
            qa = &ta - &na;
            qb = &tb - &nb;
            a = na;
            b = nb;

            if k % CHECK_EVERY == 0 || k == opts.max_iters {
                let cand = certify(&ya, &yb);
                if cand.2 < best.2 {
                    best = cand;
                }
                if best.2 < opts.tol {
                    break;
                }
            }
        }
    }

    let (a, b, residual) = best;
    let certified = residual < opts.tol;
    PositivityVerdict {
        property: Property::Decomposable,
        status: if certified {
            Status::Certified
        } else {
            Status::Undetermined
        },
        value: residual,
        witness: None,
        certificate: certified.then_some(Certificate::Decomposition { a, b, residual }),
        tolerances: Tolerances {
            tol: opts.tol,
            rel_decrease: 0.0,
        },
        seed: 0,
        restarts_used: iterations,
        inherited_from: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linmap::{gallery, GalleryMap, KrausSet};
    use crate::rng;

    fn pair(v: &PositivityVerdict) -> (CMat, CMat) {
        match &v.certificate {
            Some(Certificate::Decomposition { a, b, .. }) => (a.clone(), b.clone()),
            other => panic!("no decomposition: {other:?}"),
        }
    }

    #[test]
    fn cp_map_decomposes_trivially() {
        let mut r = rng::seeded(3);
        let m = KrausSet::random_channel(&mut r, 3, 2).to_map();
        let v = decompose_map(&m, &DecomposeOptions::default());
        assert_eq!(v.status, Status::Certified);
        let (a, b) = pair(&v);
        assert!(linalg::frobenius(&(a - m.choi())) < 1e-7);
        assert!(linalg::frobenius(&b) < 1e-12);
    }

    #[test]
    fn transposition_decomposes_with_identity_choi() {
        let t = gallery(&GalleryMap::Transposition { d: 2 }).unwrap();
        let v = decompose_map(&t, &DecomposeOptions::default());
        assert_eq!(v.status, Status::Certified);
        let (a, b) = pair(&v);
        assert!(linalg::frobenius(&a) < 1e-12);
        assert!(linalg::frobenius(&(b - MapRep::identity(2).choi())) < 1e-12);
    }

    #[test]
    fn reduction_map_is_decomposable() {
        let m = gallery(&GalleryMap::PhiA { d: 2, a: 1.0 }).unwrap();
        assert_eq!(
            decompose_map(&m, &DecomposeOptions::default()).status,
            Status::Certified
        );
    }

    #[test]
    fn genuine_mixture_found_by_dykstra() {
        // Half identity plus half transposition plus a little noise: neither
        // part alone is PSD, the sum is.
        let mut r = rng::seeded(5);
        let noise = KrausSet::random_channel(&mut r, 2, 4).to_map().scale(0.05);
        let t = gallery(&GalleryMap::Transposition { d: 2 }).unwrap();
        let m = MapRep::identity(2)
            .scale(0.6)
            .add(&t.scale(0.4))
            .unwrap()
            .add(&noise)
            .unwrap();
        assert!(linalg::min_eigenvalue(m.choi()) < -0.1);
        assert!(linalg::min_eigenvalue(&linalg::partial_transpose(m.choi(), 2, 2, true)) < -0.1);
        let v = decompose_map(&m, &DecomposeOptions::default());
        assert_eq!(v.status, Status::Certified, "residual {}", v.value);
        let (a, b) = pair(&v);
        assert!(linalg::min_eigenvalue(&a) >= -1e-12);
        assert!(linalg::min_eigenvalue(&b) >= -1e-12);
    }
}
