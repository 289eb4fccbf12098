//! Linear maps on the algebra of `d x d` complex matrices.
//!
//! A [`MapRep`] stores the `d² x d²` superoperator in the column-stacking
//! convention and lazily caches the Choi matrix
//! `C = Σ_ij E_ij ⊗ Φ(E_ij)`, with the ancilla as the first tensor factor.

mod density;
mod gallery;
mod kraus;

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, ZERO};

pub use density::DensityMatrix;
pub use gallery::{fourier_unitary, gallery, GalleryMap};
pub use kraus::{kraus_from_choi, KrausSet};

/// Default absolute Frobenius tolerance for the structural predicates.
pub const DEFAULT_STRUCT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tri {
    Yes,
    No,
    Unchecked,
}

impl Tri {
    fn from_bool(b: bool) -> Self {
        if b {
            Tri::Yes
        } else {
            Tri::No
        }
    }

    pub fn is_yes(self) -> bool {
        self == Tri::Yes
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Flag {
    pub value: Tri,
    /// Measured defect (Frobenius norm of the violated identity).
    pub defect: f64,
    pub tol: f64,
}

impl Flag {
    const UNCHECKED: Flag = Flag {
        value: Tri::Unchecked,
        defect: f64::NAN,
        tol: f64::NAN,
    };

    fn measured(defect: f64, tol: f64) -> Self {
        Flag {
            value: Tri::from_bool(defect <= tol),
            defect,
            tol,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructuralFlags {
    pub hermiticity_preserving: Flag,
    pub trace_preserving: Flag,
    pub unital: Flag,
}

impl Default for StructuralFlags {
    fn default() -> Self {
        StructuralFlags {
            hermiticity_preserving: Flag::UNCHECKED,
            trace_preserving: Flag::UNCHECKED,
            unital: Flag::UNCHECKED,
        }
    }
}

/// A linear map on `M_d(C)`.
#[derive(Debug, Clone)]
pub struct MapRep {
    dim: usize,
    superop: CMat,
    choi: OnceLock<CMat>,
    flags: StructuralFlags,
}

impl PartialEq for MapRep {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.superop == other.superop
    }
}

impl MapRep {
    pub fn from_superop(dim: usize, superop: CMat) -> Result<Self> {
        if dim == 0 {
            return Err(Error::BadParameter("dimension must be positive".into()));
        }
        let n = dim * dim;
        if superop.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "superoperator for d={dim} must be {n}x{n}, got {}x{}",
                superop.nrows(),
                superop.ncols()
            )));
        }
        if !linalg::all_finite(&superop) {
            return Err(Error::BadParameter(
                "superoperator has non-finite entries".into(),
            ));
        }
        Ok(MapRep {
            dim,
            superop,
            choi: OnceLock::new(),
            flags: StructuralFlags::default(),
        })
    }

    pub fn from_choi(dim: usize, choi: CMat) -> Result<Self> {
        if dim == 0 {
            return Err(Error::BadParameter("dimension must be positive".into()));
        }
        let n = dim * dim;
        if choi.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "Choi matrix for d={dim} must be {n}x{n}, got {}x{}",
                choi.nrows(),
                choi.ncols()
            )));
        }
        if !linalg::all_finite(&choi) {
            return Err(Error::BadParameter(
                "Choi matrix has non-finite entries".into(),
            ));
        }
        let superop = superop_from_choi(dim, &choi);
        let map = MapRep {
            dim,
            superop,
            choi: OnceLock::new(),
            flags: StructuralFlags::default(),
        };
        let _ = map.choi.set(choi);
        Ok(map)
    }

    /// Builds the superoperator by evaluating `f` on every matrix unit.
    pub fn from_fn<F>(dim: usize, f: F) -> Result<Self>
    where
        F: Fn(&CMat) -> CMat,
    {
        let n = dim * dim;
        let mut superop = CMat::zeros(n, n);
        for j in 0..dim {
            for i in 0..dim {
                let out = f(&linalg::matrix_unit(dim, i, j));
                if out.shape() != (dim, dim) {
                    return Err(Error::DimensionMismatch(
                        "map changed the matrix size".into(),
                    ));
                }
                superop.set_column(i + j * dim, &linalg::vectorize(&out));
            }
        }
        MapRep::from_superop(dim, superop)
    }

    pub fn identity(dim: usize) -> Self {
        MapRep::from_superop(dim, CMat::identity(dim * dim, dim * dim)).expect("valid identity")
    }

    pub fn zero(dim: usize) -> Self {
        MapRep::from_superop(dim, CMat::zeros(dim * dim, dim * dim)).expect("valid zero map")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn superop(&self) -> &CMat {
        &self.superop
    }

    pub fn into_superop(self) -> CMat {
        self.superop
    }

    pub fn flags(&self) -> &StructuralFlags {
        &self.flags
    }

    /// `C_Φ = Σ_ij E_ij ⊗ Φ(E_ij)`, computed once and cached.
    pub fn choi(&self) -> &CMat {
        self.choi
            .get_or_init(|| choi_from_superop(self.dim, &self.superop))
    }

    pub fn apply(&self, x: &CMat) -> Result<CMat> {
        if x.shape() != (self.dim, self.dim) {
            return Err(Error::DimensionMismatch(format!(
                "map acts on {d}x{d} matrices, got {}x{}",
                x.nrows(),
                x.ncols(),
                d = self.dim
            )));
        }
        Ok(self.apply_unchecked(x))
    }

    pub(crate) fn apply_unchecked(&self, x: &CMat) -> CMat {
        let v = &self.superop * linalg::vectorize(x);
        linalg::unvectorize(&v, self.dim, self.dim)
    }

    /// Runs the structural predicates and records them on the map.
    pub fn with_flags(mut self, tol: f64) -> Self {
        self.flags = structural_flags(&self, tol);
        self
    }

    pub fn scale(&self, s: f64) -> MapRep {
        MapRep::from_superop(self.dim, self.superop.scale(s)).expect("same shape")
    }

    pub fn add(&self, other: &MapRep) -> Result<MapRep> {
        same_dim(self, other)?;
        MapRep::from_superop(self.dim, &self.superop + &other.superop)
    }

    pub fn sub(&self, other: &MapRep) -> Result<MapRep> {
        same_dim(self, other)?;
        MapRep::from_superop(self.dim, &self.superop - &other.superop)
    }
}

fn same_dim(a: &MapRep, b: &MapRep) -> Result<()> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch(format!(
            "maps act on d={} and d={}",
            a.dim, b.dim
        )));
    }
    Ok(())
}

/// Choi block `(i, j)` is `Φ(E_ij)`, i.e. column `i + j d` of the superoperator.
pub fn choi_from_superop(dim: usize, superop: &CMat) -> CMat {
    let n = dim * dim;
    let mut choi = CMat::zeros(n, n);
    for i in 0..dim {
        for j in 0..dim {
            let col = superop.column(i + j * dim);
            for b in 0..dim {
                for a in 0..dim {
                    choi[(i * dim + a, j * dim + b)] = col[a + b * dim];
                }
            }
        }
    }
    choi
}

pub fn superop_from_choi(dim: usize, choi: &CMat) -> CMat {
    let n = dim * dim;
    let mut superop = CMat::zeros(n, n);
    for i in 0..dim {
        for j in 0..dim {
            for b in 0..dim {
                for a in 0..dim {
                    superop[(a + b * dim, i + j * dim)] = choi[(i * dim + a, j * dim + b)];
                }
            }
        }
    }
    superop
}

/// Hilbert-Schmidt adjoint: `Tr(Φ†(A)* B) = Tr(A* Φ(B))`.
pub fn hs_adjoint(map: &MapRep) -> MapRep {
    MapRep::from_superop(map.dim, map.superop.adjoint()).expect("same shape")
}

/// `a ∘ b`: apply `b` first.
pub fn compose(a: &MapRep, b: &MapRep) -> Result<MapRep> {
    same_dim(a, b)?;
    MapRep::from_superop(a.dim, &a.superop * &b.superop)
}

/// `a ⊗ b` acting on `M_{d_a} ⊗ M_{d_b}`, with `a` on the first factor.
pub fn tensor(a: &MapRep, b: &MapRep) -> MapRep {
    let (da, db) = (a.dim, b.dim);
    let d = da * db;
    let n = d * d;
    let sa = &a.superop;
    let sb = &b.superop;
    let mut out = CMat::from_element(n, n, ZERO);
    for j1 in 0..da {
        for i1 in 0..da {
            for j2 in 0..db {
                for i2 in 0..db {
                    let col = (i1 * db + i2) + (j1 * db + j2) * d;
                    for c1 in 0..da {
                        for r1 in 0..da {
                            let va = sa[(r1 + c1 * da, i1 + j1 * da)];
                            if va == ZERO {
                                continue;
                            }
                            for c2 in 0..db {
                                for r2 in 0..db {
                                    let vb = sb[(r2 + c2 * db, i2 + j2 * db)];
                                    let row = (r1 * db + r2) + (c1 * db + c2) * d;
                                    out[(row, col)] = va * vb;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    MapRep::from_superop(d, out).expect("tensor shape")
}

/// `Φ⁽ⁿ⁾ = id_n ⊗ Φ`.
pub fn ampliate(map: &MapRep, n: usize) -> Result<MapRep> {
    if n == 0 {
        return Err(Error::BadParameter(
            "ampliation order must be at least 1".into(),
        ));
    }
    if n == 1 {
        return Ok(map.clone());
    }
    Ok(tensor(&MapRep::identity(n), map))
}

/// `Φ^{⊗n}`.
pub fn tensor_power(map: &MapRep, n: usize) -> Result<MapRep> {
    if n == 0 {
        return Err(Error::BadParameter(
            "tensor power must be at least 1".into(),
        ));
    }
    let mut out = map.clone();
    for _ in 1..n {
        out = tensor(&out, map);
    }
    Ok(out)
}

/// Hermiticity preservation, trace preservation and unitality, each with
/// its measured defect.
pub fn structural_flags(map: &MapRep, tol: f64) -> StructuralFlags {
    let d = map.dim;
    let choi = map.choi();
    let hp = linalg::hermiticity_defect(choi);
    let tp = linalg::frobenius(&(linalg::partial_trace_second(choi, d, d) - linalg::identity(d)));
    let unital =
        linalg::frobenius(&(map.apply_unchecked(&linalg::identity(d)) - linalg::identity(d)));
    StructuralFlags {
        hermiticity_preserving: Flag::measured(hp, tol),
        trace_preserving: Flag::measured(tp, tol),
        unital: Flag::measured(unital, tol),
    }
}

pub fn is_hermiticity_preserving(map: &MapRep, tol: f64) -> bool {
    linalg::hermiticity_defect(map.choi()) <= tol
}

pub fn is_trace_preserving(map: &MapRep, tol: f64) -> bool {
    structural_flags(map, tol).trace_preserving.value.is_yes()
}

/// The transposition map `X ↦ Xᵀ` composed after `map`.
pub fn transpose_after(map: &MapRep) -> MapRep {
    compose(&gallery::transposition(map.dim), map).expect("same dimension")
}
