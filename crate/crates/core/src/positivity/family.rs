//! Closed-form membership for the `Φ_a` and `Φ_{a,T}` families.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    /// `Φ_a(X) = (Tr(X) 𝕀 − a X) / (d − a)`
    Plain,
    /// `Φ_{a,T}(X) = (Tr(X) 𝕀 − a Xᵀ) / (d − a)`
    Transposed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FamilyProperty {
    P,
    S,
    Cp,
}

/// Lower end of the Schwarz range of `Φ_{a,T}` at level one.
pub fn transposed_schwarz_lower_bound(d: usize) -> f64 {
    let d = d as f64;
    2.0 * d / (1.0 - (4.0 * d + 1.0).sqrt())
}

/// Membership bit of a family member in `P_n`, `S_n` or the CP cone.
///
/// `n` is ignored for `Cp`. Levels `n ≥ d` coincide with CP.
pub fn oracle_phi_family(
    kind: FamilyKind,
    d: usize,
    a: f64,
    property: FamilyProperty,
    n: usize,
) -> Result<bool> {
    if d < 2 {
        return Err(Error::BadParameter("the families need d >= 2".into()));
    }
    if !a.is_finite() || a == d as f64 {
        return Err(Error::BadParameter(format!(
            "a = {a} is not admissible for d = {d}"
        )));
    }
    let n = match property {
        FamilyProperty::Cp => d,
        _ if n < 1 || n > d => {
            return Err(Error::BadParameter(format!(
                "level n = {n} outside 1..={d}"
            )));
        }
        _ => n,
    };
    let df = d as f64;
    let nf = n as f64;
    // For a > d a pure state is sent to an operator with eigenvalue 1/(d − a) < 0.
    if a > df {
        return Ok(false);
    }
    Ok(match (kind, property) {
        (FamilyKind::Plain, FamilyProperty::P) => a <= 1.0 / nf,
        (FamilyKind::Plain, FamilyProperty::Cp) => a <= 1.0 / df,
        (FamilyKind::Plain, FamilyProperty::S) if n >= d => a <= 1.0 / df,
        (FamilyKind::Plain, FamilyProperty::S) => a <= df / (1.0 + nf * df),
        (FamilyKind::Transposed, FamilyProperty::P) if n == 1 => a <= 1.0,
        (FamilyKind::Transposed, FamilyProperty::S) if n == 1 => {
            transposed_schwarz_lower_bound(d) <= a && a <= 1.0
        }
        (FamilyKind::Transposed, _) => (-1.0..=1.0).contains(&a),
    })
}
