//! Correspondences between classical Markov objects and quantum ones.
//!
//! Every construction is relative to an orthonormal basis. The computational
//! basis is used unless a [`BasisChoice`] is passed.

mod generator;
mod stochastic;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, CVec};
use crate::linmap::DensityMatrix;

pub use generator::{
    compare_reductions, gkls_from_kolmogorov, is_kolmogorov, kolmogorov_from_generator,
    kolmogorov_from_gkls, kossakowski_sample_check, stationary_distribution, KolmogorovGenerator,
    KossakowskiReport, ReductionComparison,
};
pub use stochastic::{
    channel_from_stochastic, check_strong_positivity, classify_stochastic, has_stochastic_inverse,
    is_permutation_matrix, is_unitary, stochastic_from_map, StochasticClass, StochasticMatrix,
    STOCHASTIC_TOL,
};

/// Tolerance on simplex membership of inputs.
pub const SIMPLEX_TOL: f64 = 1e-12;

const UNITARY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::NotInSimplex("empty vector".into()));
        }
        if let Some((i, x)) = p
            .iter()
            .enumerate()
            .find(|(_, x)| !x.is_finite() || **x < -SIMPLEX_TOL)
        {
            return Err(Error::NotInSimplex(format!("entry {i} is {x}")));
        }
        let s: f64 = p.iter().sum();
        if (s - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::NotInSimplex(format!("entries sum to {s}")));
        }
        Ok(ProbabilityVector(p))
    }

    /// Accepts entries down to `-SIMPLEX_TOL` and sums off by up to `slack`,
    /// clipping negatives to zero and rescaling to unit sum.
    pub fn renormalized(p: Vec<f64>, slack: f64) -> Result<Self> {
        if let Some((i, x)) = p
            .iter()
            .enumerate()
            .find(|(_, x)| !x.is_finite() || **x < -SIMPLEX_TOL)
        {
            return Err(Error::NotInSimplex(format!("entry {i} is {x}")));
        }
        let clipped: Vec<f64> = p.into_iter().map(|x| x.max(0.0)).collect();
        let s: f64 = clipped.iter().sum();
        if clipped.is_empty() || (s - 1.0).abs() > slack.max(SIMPLEX_TOL) {
            return Err(Error::NotInSimplex(format!("entries sum to {s}")));
        }
        Ok(ProbabilityVector(
            clipped.into_iter().map(|x| x / s).collect(),
        ))
    }

    pub fn uniform(d: usize) -> Self {
        ProbabilityVector(vec![1.0 / d as f64; d])
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Self {
        ProbabilityVector(linalg::random_simplex(rng, d))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[f64] {
        &self.0
    }
}

/// Orthonormal basis given by the columns of a unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisChoice {
    u: CMat,
}

impl BasisChoice {
    pub fn canonical(d: usize) -> Self {
        BasisChoice {
            u: linalg::identity(d),
        }
    }

    pub fn from_unitary(u: CMat) -> Result<Self> {
        linalg::check_square(&u, "basis")?;
        if !is_unitary(&u, UNITARY_TOL) {
            return Err(Error::BadParameter("basis matrix is not unitary".into()));
        }
        Ok(BasisChoice { u })
    }

    pub fn haar<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Self {
        BasisChoice {
            u: linalg::haar_unitary(rng, d),
        }
    }

    pub fn dim(&self) -> usize {
        self.u.nrows()
    }

    pub fn unitary(&self) -> &CMat {
        &self.u
    }

    pub fn vector(&self, i: usize) -> CVec {
        self.u.column(i).into_owned()
    }

    /// `|b_i⟩⟨b_j|`
    pub fn unit(&self, i: usize, j: usize) -> CMat {
        linalg::outer(&self.vector(i), &self.vector(j))
    }
}

/// `diag(p)` in the computational basis.
pub fn gamma_embed(p: &ProbabilityVector) -> DensityMatrix {
    let d = p.dim();
    let m = CMat::from_fn(
        d,
        d,
        |i, j| if i == j { c(p.0[i], 0.0) } else { c(0.0, 0.0) },
    );
    DensityMatrix::from_trusted(m)
}

/// `Σ_j p_j |b_j⟩⟨b_j|`
pub fn gamma_embed_in(p: &ProbabilityVector, basis: &BasisChoice) -> Result<DensityMatrix> {
    if basis.dim() != p.dim() {
        return Err(Error::DimensionMismatch(format!(
            "basis of size {} for {} probabilities",
            basis.dim(),
            p.dim()
        )));
    }
    let g = gamma_embed(p);
    let m = basis.unitary() * g.matrix() * basis.unitary().adjoint();
    Ok(DensityMatrix::from_trusted(linalg::hermitian_part(&m)))
}

/// Projector onto `Σ_j √p_j e^{iφ_j} |j⟩`.
pub fn pi_embed(p: &ProbabilityVector, phases: &[f64]) -> Result<DensityMatrix> {
    if phases.len() != p.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{} phases for {} probabilities",
            phases.len(),
            p.dim()
        )));
    }
    let v = CVec::from_iterator(
        p.dim(),
        p.0.iter()
            .zip(phases)
            .map(|(&pj, &phi)| c(0.0, phi).exp() * pj.sqrt()),
    );
    Ok(DensityMatrix::from_trusted(linalg::outer(&v, &v)))
}

/// `p_i = ⟨b_i|ρ|b_i⟩`
pub fn omega_reduce(rho: &DensityMatrix, basis: &BasisChoice) -> Result<ProbabilityVector> {
    if basis.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "basis of size {} for a state of size {}",
            basis.dim(),
            rho.dim()
        )));
    }
    let p: Vec<f64> = (0..rho.dim())
        .map(|i| {
            let b = basis.vector(i);
            (b.adjoint() * rho.matrix() * &b)[(0, 0)].re
        })
        .collect();
    ProbabilityVector::renormalized(p, 1e-9)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use std::f64::consts::PI;

    #[test]
    fn simplex_checks() {
        assert!(ProbabilityVector::new(vec![0.5, 0.5]).is_ok());
        assert!(matches!(
            ProbabilityVector::new(vec![0.6, 0.5]),
            Err(Error::NotInSimplex(_))
        ));
        assert!(matches!(
            ProbabilityVector::new(vec![1.1, -0.1]),
            Err(Error::NotInSimplex(_))
        ));
        let p = ProbabilityVector::renormalized(vec![1.0 + 1e-13, -5e-13], 1e-9).unwrap();
        assert_eq!(p.entries(), &[1.0, 0.0]);
    }

    #[test]
    fn gamma_examples() {
        let g = gamma_embed(&ProbabilityVector::uniform(3));
        assert!(linalg::frobenius(&(g.matrix() - linalg::identity(3).unscale(3.0))) < 1e-15);
        let g = gamma_embed(&ProbabilityVector::new(vec![1.0, 0.0]).unwrap());
        assert_eq!(g.matrix(), &linalg::matrix_unit(2, 0, 0));
        let g = gamma_embed(&ProbabilityVector::new(vec![0.7, 0.3]).unwrap());
        assert_eq!(g.matrix()[(0, 0)].re, 0.7);
        assert_eq!(g.matrix()[(1, 1)].re, 0.3);
    }

    #[test]
    fn pi_examples() {
        let e0 = pi_embed(
            &ProbabilityVector::new(vec![1.0, 0.0, 0.0]).unwrap(),
            &[0.3, 1.0, 2.0],
        )
        .unwrap();
        assert!(linalg::frobenius(&(e0.matrix() - linalg::matrix_unit(3, 0, 0))) < 1e-15);

        let half = ProbabilityVector::uniform(2);
        let plus = pi_embed(&half, &[0.0, 0.0]).unwrap();
        assert!(
            linalg::frobenius(&(plus.matrix() - CMat::from_element(2, 2, c(0.5, 0.0)))) < 1e-15
        );

        let minus = pi_embed(&half, &[0.0, PI]).unwrap();
        let expected = CMat::from_row_slice(
            2,
            2,
            &[c(0.5, 0.0), c(-0.5, 0.0), c(-0.5, 0.0), c(0.5, 0.0)],
        );
        assert!(linalg::frobenius(&(minus.matrix() - expected)) < 1e-15);
        let back = omega_reduce(&minus, &BasisChoice::canonical(2)).unwrap();
        assert!((back.entries()[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn omega_examples() {
        let mut r = rng::seeded(1);
        let b = BasisChoice::haar(&mut r, 3);
        let p = omega_reduce(&DensityMatrix::maximally_mixed(3), &b).unwrap();
        for x in p.entries() {
            assert!((x - 1.0 / 3.0).abs() < 1e-14);
        }
        let q = ProbabilityVector::random(&mut r, 4);
        let back = omega_reduce(&gamma_embed(&q), &BasisChoice::canonical(4)).unwrap();
        for (a, b) in back.entries().iter().zip(q.entries()) {
            assert!((a - b).abs() < 1e-15);
        }
        // rotated embedding reduces back in the same basis
        let b4 = BasisChoice::haar(&mut r, 4);
        let back = omega_reduce(&gamma_embed_in(&q, &b4).unwrap(), &b4).unwrap();
        for (a, b) in back.entries().iter().zip(q.entries()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn basis_must_be_unitary() {
        let m = CMat::from_element(2, 2, c(1.0, 0.0));
        assert!(BasisChoice::from_unitary(m).is_err());
    }
}
