use crate::error::{Error, Result};
use crate::linalg::{self, CMat};

/// Default tolerance below zero accepted for density-matrix eigenvalues.
pub const DEFAULT_PSD_TOL: f64 = 1e-10;

/// A quantum state: Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMat,
}

impl DensityMatrix {
    pub fn new(matrix: CMat) -> Result<Self> {
        Self::with_tolerance(matrix, DEFAULT_PSD_TOL)
    }

    pub fn with_tolerance(matrix: CMat, psd_tol: f64) -> Result<Self> {
        Self::validate(&matrix, psd_tol)?;
        Ok(DensityMatrix { matrix })
    }

    /// Checks the density-matrix invariants without taking ownership.
    pub fn validate(matrix: &CMat, psd_tol: f64) -> Result<()> {
        linalg::check_square(matrix, "density matrix")?;
        if !linalg::all_finite(matrix) {
            return Err(Error::InvalidState("non-finite entries".into()));
        }
        let herm = linalg::hermiticity_defect(matrix);
        if herm > psd_tol.max(1e-10) {
            return Err(Error::InvalidState(format!(
                "not Hermitian (defect {herm:.3e})"
            )));
        }
        let tr = linalg::trace(matrix);
        if (tr.re - 1.0).abs() > 1e-10_f64.max(psd_tol) || tr.im.abs() > 1e-10_f64.max(psd_tol) {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = linalg::min_eigenvalue(matrix);
        if min < -psd_tol {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(())
    }

    pub fn maximally_mixed(d: usize) -> Self {
        DensityMatrix {
            matrix: linalg::identity(d).unscale(d as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    pub(crate) fn from_trusted(matrix: CMat) -> Self {
        DensityMatrix { matrix }
    }
}
