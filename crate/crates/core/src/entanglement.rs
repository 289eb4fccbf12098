//! Schmidt decomposition, partial transposition and Schmidt-number
//! detection with n-positive maps.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, CVec};
use crate::linmap::{self, DensityMatrix, MapRep};
use crate::rng;

/// Singular values at or below this fraction of the largest are not counted
/// towards the Schmidt rank.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

const UNIT_NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum BipartiteState {
    Pure {
        dims: (usize, usize),
        vector: CVec,
    },
    Mixed {
        dims: (usize, usize),
        rho: DensityMatrix,
    },
}

impl BipartiteState {
    pub fn pure(dims: (usize, usize), vector: CVec) -> Result<Self> {
        if vector.len() != dims.0 * dims.1 {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for dims {}x{}",
                vector.len(),
                dims.0,
                dims.1
            )));
        }
        let norm = vector.norm();
        if (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::InvalidState(format!(
                "vector norm {norm} differs from 1"
            )));
        }
        Ok(BipartiteState::Pure { dims, vector })
    }

    pub fn mixed(dims: (usize, usize), rho: DensityMatrix) -> Result<Self> {
        if rho.dim() != dims.0 * dims.1 {
            return Err(Error::DimensionMismatch(format!(
                "density matrix of size {} for dims {}x{}",
                rho.dim(),
                dims.0,
                dims.1
            )));
        }
        Ok(BipartiteState::Mixed { dims, rho })
    }

    pub fn dims(&self) -> (usize, usize) {
        match self {
            BipartiteState::Pure { dims, .. } | BipartiteState::Mixed { dims, .. } => *dims,
        }
    }

    pub fn density(&self) -> CMat {
        match self {
            BipartiteState::Pure { vector, .. } => linalg::outer(vector, vector),
            BipartiteState::Mixed { rho, .. } => rho.matrix().clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtData {
    /// Nonincreasing.
    pub singular_values: Vec<f64>,
    pub left_basis: CMat,
    pub right_basis: CMat,
    pub rank: usize,
}

impl SchmidtData {
    /// `Σ_i s_i |i_A⟩ ⊗ |i_B⟩`
    pub fn reassemble(&self) -> CVec {
        let da = self.left_basis.nrows();
        let db = self.right_basis.nrows();
        let mut v = CVec::zeros(da * db);
        for (k, &s) in self.singular_values.iter().enumerate() {
            let a = self.left_basis.column(k).into_owned();
            let b = self.right_basis.column(k).into_owned();
            v += a.kronecker(&b) * c(s, 0.0);
        }
        v
    }
}

/// Coefficient matrix `M[a, b] = ⟨a b|ψ⟩`.
fn coefficients(v: &CVec, dims: (usize, usize)) -> CMat {
    CMat::from_fn(dims.0, dims.1, |a, b| v[a * dims.1 + b])
}

pub fn schmidt_decompose(state: &BipartiteState, rank_tol: f64) -> Result<SchmidtData> {
    let BipartiteState::Pure { dims, vector } = state else {
        return Err(Error::NotPure);
    };
    let svd = coefficients(vector, *dims).svd(true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));

    let singular_values: Vec<f64> = order.iter().map(|&k| svd.singular_values[k]).collect();
    let left_basis = CMat::from_columns(&order.iter().map(|&k| u.column(k)).collect::<Vec<_>>());
    let right_basis = CMat::from_columns(
        &order
            .iter()
            .map(|&k| v_t.row(k).transpose())
            .collect::<Vec<_>>(),
    );
    let smax = singular_values.first().copied().unwrap_or(0.0);
    let rank = singular_values
        .iter()
        .filter(|&&s| s > rank_tol * smax)
        .count();
    Ok(SchmidtData {
        singular_values,
        left_basis,
        right_basis,
        rank,
    })
}

pub fn is_maximally_entangled(state: &BipartiteState, tol: f64) -> Result<bool> {
    let data = schmidt_decompose(state, DEFAULT_RANK_TOL)?;
    let (da, db) = state.dims();
    let r = da.min(db);
    if data.rank != r {
        return Ok(false);
    }
    let target = 1.0 / (r as f64).sqrt();
    Ok(data
        .singular_values
        .iter()
        .take(r)
        .all(|s| (s - target).abs() < tol))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Factor {
    First,
    Second,
}

pub fn partial_transpose(rho: &CMat, dims: (usize, usize), factor: Factor) -> Result<CMat> {
    let size = dims.0 * dims.1;
    if rho.nrows() != size || rho.ncols() != size {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix for dims {}x{}",
            rho.nrows(),
            rho.ncols(),
            dims.0,
            dims.1
        )));
    }
    Ok(linalg::partial_transpose(
        rho,
        dims.0,
        dims.1,
        factor == Factor::Second,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PptStatus {
    Ppt,
    Npt,
}

/// What a PPT test result allows one to conclude.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PptImplication {
    /// A negative partial transpose always certifies entanglement.
    Entangled,
    /// PPT certifies separability for 2x2 and 2x3 systems.
    Separable,
    /// PPT in larger dimensions says nothing.
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PptReport {
    pub status: PptStatus,
    pub min_eigenvalue: f64,
    pub implication: PptImplication,
}

pub fn ppt_check(rho: &CMat, dims: (usize, usize), tol: f64) -> Result<PptReport> {
    let pt = partial_transpose(rho, dims, Factor::Second)?;
    let min_eigenvalue = linalg::min_eigenvalue(&linalg::hermitian_part(&pt));
    let (status, implication) = if min_eigenvalue < -tol {
        (PptStatus::Npt, PptImplication::Entangled)
    } else if dims.0.min(dims.1) == 1 || dims.0 * dims.1 <= 6 {
        (PptStatus::Ppt, PptImplication::Separable)
    } else {
        (PptStatus::Ppt, PptImplication::Inconclusive)
    };
    Ok(PptReport {
        status,
        min_eigenvalue,
        implication,
    })
}

/// `true` certifies Schmidt number above `n`, provided `detector` is
/// n-positive; `false` is inconclusive.
pub fn detect_schmidt_number_gt(
    rho: &CMat,
    dims: (usize, usize),
    n: usize,
    detector: &MapRep,
    tol: f64,
) -> Result<bool> {
    if n < 1 {
        return Err(Error::BadParameter("n must be at least 1".into()));
    }
    if detector.dim() != dims.1 || rho.nrows() != dims.0 * dims.1 || rho.ncols() != rho.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "detector on M_{} with a {}x{} state of dims {}x{}",
            detector.dim(),
            rho.nrows(),
            rho.ncols(),
            dims.0,
            dims.1
        )));
    }
    let amp = linmap::ampliate(detector, dims.0)?;
    let out = linalg::hermitian_part(&amp.apply(rho)?);
    Ok(linalg::min_eigenvalue(&out) < -tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductFactors {
    Pure,
    Mixed,
}

/// `Σ_i p_i ρ_i^A ⊗ ρ_i^B` with simplex-uniform weights.
pub fn sample_separable(
    dims: (usize, usize),
    terms: usize,
    factors: ProductFactors,
    seed: u64,
) -> Result<DensityMatrix> {
    if terms < 1 {
        return Err(Error::BadParameter("at least one term is required".into()));
    }
    let mut r = rng::seeded(seed);
    let weights = linalg::random_simplex(&mut r, terms);
    let mut rho = CMat::zeros(dims.0 * dims.1, dims.0 * dims.1);
    for w in weights {
        let (a, b) = match factors {
            ProductFactors::Pure => (
                linalg::random_pure_density(&mut r, dims.0),
                linalg::random_pure_density(&mut r, dims.1),
            ),
            ProductFactors::Mixed => (
                linalg::random_density(&mut r, dims.0),
                linalg::random_density(&mut r, dims.1),
            ),
        };
        rho += linalg::kron(&a, &b) * c(w, 0.0);
    }
    Ok(DensityMatrix::from_trusted(linalg::hermitian_part(&rho)))
}

/// `Σ_i |ii⟩ / √d`
pub fn max_entangled(d: usize) -> BipartiteState {
    let mut v = CVec::zeros(d * d);
    let s = 1.0 / (d as f64).sqrt();
    for i in 0..d {
        v[i * d + i] = c(s, 0.0);
    }
    BipartiteState::Pure {
        dims: (d, d),
        vector: v,
    }
}
