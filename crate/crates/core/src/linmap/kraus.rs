use rand::Rng;

use super::MapRep;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};

/// Operators `K_α` with `Φ(X) = Σ_α K_α X K_α*`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    dim: usize,
    operators: Vec<CMat>,
}

impl KrausSet {
    pub fn new(dim: usize, operators: Vec<CMat>) -> Result<Self> {
        for (k, op) in operators.iter().enumerate() {
            if op.shape() != (dim, dim) {
                return Err(Error::DimensionMismatch(format!(
                    "Kraus operator {k} is {}x{}, expected {dim}x{dim}",
                    op.nrows(),
                    op.ncols()
                )));
            }
        }
        Ok(KrausSet { dim, operators })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn operators(&self) -> &[CMat] {
        &self.operators
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    /// `Σ K* K = 𝕀`.
    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        let sum = self
            .operators
            .iter()
            .fold(CMat::zeros(self.dim, self.dim), |acc, k| {
                acc + k.adjoint() * k
            });
        linalg::frobenius(&(sum - linalg::identity(self.dim))) <= tol
    }

    /// `Σ K K* = 𝕀`.
    pub fn is_unital(&self, tol: f64) -> bool {
        let sum = self
            .operators
            .iter()
            .fold(CMat::zeros(self.dim, self.dim), |acc, k| {
                acc + k * k.adjoint()
            });
        linalg::frobenius(&(sum - linalg::identity(self.dim))) <= tol
    }

    /// Superoperator `Σ_α conj(K_α) ⊗ K_α`.
    pub fn to_map(&self) -> MapRep {
        let n = self.dim * self.dim;
        let superop = self.operators.iter().fold(CMat::zeros(n, n), |acc, k| {
            acc + linalg::kron(&k.conjugate(), k)
        });
        MapRep::from_superop(self.dim, superop).expect("Kraus superoperator shape")
    }

    /// Random channel with `rank` Kraus operators: a Ginibre stack made an
    /// isometry.
    pub fn random_channel<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> Self {
        let g = linalg::ginibre(rng, dim * rank, dim);
        let gram = g.adjoint() * &g;
        let (vals, vecs) = linalg::eigh(&gram);
        let inv_sqrt = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
            dim,
            vals.iter().map(|v| linalg::c(1.0 / v.sqrt(), 0.0)),
        ));
        let iso = &g * (&vecs * inv_sqrt * vecs.adjoint());
        let operators = (0..rank)
            .map(|k| iso.rows(k * dim, dim).into_owned())
            .collect();
        KrausSet { dim, operators }
    }
}

/// Kraus operators from the spectral decomposition of a Choi matrix.
///
/// Eigenvalues in `[-tol, tol·d]` are discarded; anything below `-tol`
/// means the map is not completely positive.
pub fn kraus_from_choi(dim: usize, choi: &CMat, tol: f64) -> Result<KrausSet> {
    let n = dim * dim;
    if choi.shape() != (n, n) {
        return Err(Error::DimensionMismatch(format!(
            "Choi matrix must be {n}x{n}"
        )));
    }
    let defect = linalg::hermiticity_defect(choi);
    if defect > tol {
        return Err(Error::NotHermitianPreserving);
    }
    let (vals, vecs) = linalg::eigh(choi);
    if vals[0] < -tol {
        return Err(Error::NotCompletelyPositive {
            min_eigenvalue: vals[0],
        });
    }
    let cut = tol * dim as f64;
    let mut operators = Vec::new();
    for (k, &lambda) in vals.iter().enumerate() {
        if lambda <= cut {
            continue;
        }
        let v = vecs.column(k);
        let s = lambda.sqrt();
        // C = |v><v| with v[i d + a] = K[a, i].
        let op = CMat::from_fn(dim, dim, |a, i| v[i * dim + a] * s);
        operators.push(op);
    }
    Ok(KrausSet { dim, operators })
}
