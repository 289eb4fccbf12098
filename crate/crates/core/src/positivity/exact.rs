//! Exact spectral checks: complete positivity, complete copositivity and the
//! structural physical approximation threshold.

use super::verdict::{Certificate, PositivityVerdict, Property, Status, Tolerances, Witness};
use crate::error::{Error, Result};
use crate::linalg;
use crate::linmap::{self, MapRep, DEFAULT_STRUCT_TOL};

/// Default violation threshold for the exact checks.
pub const DEFAULT_CP_TOL: f64 = 1e-8;

fn require_hp(map: &MapRep) -> Result<()> {
    if !linmap::is_hermiticity_preserving(map, DEFAULT_STRUCT_TOL) {
        return Err(Error::NotHermitianPreserving);
    }
    Ok(())
}

fn spectral_verdict(
    property: Property,
    choi: &linalg::CMat,
    d: usize,
    tol: f64,
) -> PositivityVerdict {
    let (vals, vecs) = linalg::eigh(choi);
    let min = vals[0];
    let tolerances = Tolerances {
        tol,
        rel_decrease: 0.0,
    };
    if min >= -tol {
        PositivityVerdict {
            property,
            status: Status::Certified,
            value: min,
            witness: None,
            certificate: Some(Certificate::MinEigenvalue {
                value: min,
                index: 0,
            }),
            tolerances,
            seed: 0,
            restarts_used: 0,
            inherited_from: None,
        }
    } else {
        let v = vecs.column(0).into_owned();
        PositivityVerdict {
            property,
            status: Status::Refuted,
            value: min,
            witness: Some(Witness::from_vector(&v, d, d, min)),
            certificate: Some(Certificate::MinEigenvalue {
                value: min,
                index: 0,
            }),
            tolerances,
            seed: 0,
            restarts_used: 0,
            inherited_from: None,
        }
    }
}

/// Complete positivity via the sign of the smallest Choi eigenvalue.
pub fn check_cp(map: &MapRep, tol: f64) -> Result<PositivityVerdict> {
    require_hp(map)?;
    Ok(spectral_verdict(Property::Cp, map.choi(), map.dim(), tol))
}

/// Same spectral test reported as membership in `P_n` (used for `n ≥ d`).
pub(crate) fn check_cp_as(map: &MapRep, property: Property, tol: f64) -> Result<PositivityVerdict> {
    require_hp(map)?;
    Ok(spectral_verdict(property, map.choi(), map.dim(), tol))
}

/// Complete copositivity: `T ∘ Φ` is completely positive.
///
/// A refutation witness is stated against the Choi matrix of `T ∘ Φ`.
pub fn check_cocp(map: &MapRep, tol: f64) -> Result<PositivityVerdict> {
    require_hp(map)?;
    let flipped = linmap::transpose_after(map);
    Ok(spectral_verdict(
        Property::CoCp,
        flipped.choi(),
        map.dim(),
        tol,
    ))
}

/// Smallest `λ ∈ [0, 1]` making `λ Tr(·) 𝕀/d + (1 − λ) Φ` completely positive.
///
/// With `μ` the smallest eigenvalue of the unnormalized Choi matrix, the
/// mixture has smallest eigenvalue `λ/d + (1 − λ) μ`, giving
/// `λ* = d|μ| / (1 + d|μ|)` when `μ < 0`.
pub fn spa_lambda(map: &MapRep) -> Result<f64> {
    require_hp(map)?;
    if !linmap::is_trace_preserving(map, DEFAULT_STRUCT_TOL) {
        return Err(Error::NotTracePreserving);
    }
    let vals = linalg::eigvalsh(&linalg::hermitian_part(map.choi()));
    let mu = vals[0];
    // eigensolver round-off around an exactly singular Choi matrix
    let floor = 64.0 * f64::EPSILON * vals.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    if mu >= -floor {
        return Ok(0.0);
    }
    let dm = map.dim() as f64 * mu.abs();
    Ok(dm / (1.0 + dm))
}
