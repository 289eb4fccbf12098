use serde::Serialize;

use super::decompose::{decompose_map, DecomposeOptions};
use super::exact::{check_cocp, check_cp, check_cp_as};
use super::npos::falsify_n_positivity;
use super::schwarz::falsify_generalized_schwarz;
use super::verdict::{PositivityVerdict, Property};
use super::FalsifierOptions;
use crate::error::{Error, Result};
use crate::linmap::{self, MapRep, StructuralFlags, DEFAULT_STRUCT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ClassifyOptions {
    pub falsifier: FalsifierOptions,
    pub decompose: DecomposeOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HierarchyReport {
    pub d: usize,
    pub flags: StructuralFlags,
    /// `P_1 ..= P_d`
    pub positivity: Vec<PositivityVerdict>,
    /// `S_1 ..= S_d`
    pub schwarz: Vec<PositivityVerdict>,
    pub cp: PositivityVerdict,
    pub cocp: PositivityVerdict,
    pub decomposable: PositivityVerdict,
}

impl HierarchyReport {
    pub fn verdict(&self, property: Property) -> Option<&PositivityVerdict> {
        match property {
            Property::P(n) if n >= 1 => self.positivity.get(n - 1),
            Property::S(n) if n >= 1 => self.schwarz.get(n - 1),
            Property::Cp => Some(&self.cp),
            Property::CoCp => Some(&self.cocp),
            Property::Decomposable => Some(&self.decomposable),
            _ => None,
        }
    }
}

/// Runs every check and assembles a report consistent with the inclusions
/// `P_{n+1} ⊂ S_n ⊂ P_n`.
///
/// A refutation at one level is inherited by all higher levels, and a CP
/// certificate by all levels. Levels `n ≥ d` use the exact spectral test.
pub fn classify(map: &MapRep, opts: &ClassifyOptions) -> Result<HierarchyReport> {
    let flags = linmap::structural_flags(map, DEFAULT_STRUCT_TOL);
    if !flags.hermiticity_preserving.value.is_yes() {
        return Err(Error::NotHermitianPreserving);
    }
    let d = map.dim();
    let fo = &opts.falsifier;
    let cp = check_cp(map, fo.tol)?;
    let cocp = check_cocp(map, fo.tol)?;
    let decomposable = if cp.is_certified() {
        cp.inherit(Property::Decomposable)
    } else if cocp.is_certified() {
        cocp.inherit(Property::Decomposable)
    } else {
        decompose_map(map, &opts.decompose)
    };

    let mut positivity: Vec<PositivityVerdict> = Vec::with_capacity(d);
    let mut schwarz: Vec<PositivityVerdict> = Vec::with_capacity(d);
    for n in 1..=d {
        let p = if cp.is_certified() {
            cp.inherit(Property::P(n))
        } else if let Some(prev) = refuted_below(&positivity, &schwarz, n) {
            prev.inherit(Property::P(n))
        } else if n >= d {
            check_cp_as(map, Property::P(n), fo.tol)?
        } else {
            falsify_n_positivity(map, n, fo)?
        };
        let s = if cp.is_certified() || n >= d {
            cp.inherit(Property::S(n))
        } else if p.is_refuted() {
            p.inherit(Property::S(n))
        } else {
            falsify_generalized_schwarz(map, n, fo)?
        };
        positivity.push(p);
        schwarz.push(s);
    }

    Ok(HierarchyReport {
        d,
        flags,
        positivity,
        schwarz,
        cp,
        cocp,
        decomposable,
    })
}

/// First refuted verdict at `P_{n−1}` or `S_{n−1}`, preferring direct ones.
fn refuted_below<'a>(
    positivity: &'a [PositivityVerdict],
    schwarz: &'a [PositivityVerdict],
    n: usize,
) -> Option<&'a PositivityVerdict> {
    if n < 2 {
        return None;
    }
    let candidates = [&positivity[n - 2], &schwarz[n - 2]];
    candidates
        .iter()
        .copied()
        .filter(|v| v.is_refuted())
        .min_by_key(|v| v.inherited_from.is_some())
}
