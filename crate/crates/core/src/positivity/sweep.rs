//! Parameter sweeps over the `Φ_a` / `Φ_{a,T}` families, with the closed-form
//! oracle alongside each numerical verdict.

use rayon::prelude::*;
use serde::Serialize;

use super::exact::{check_cp, check_cp_as};
use super::family::{oracle_phi_family, FamilyKind, FamilyProperty};
use super::npos::falsify_n_positivity;
use super::schwarz::falsify_generalized_schwarz;
use super::verdict::{Property, Status};
use super::FalsifierOptions;
use crate::error::{Error, Result};
use crate::linmap::{gallery, GalleryMap, MapRep};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub kind: FamilyKind,
    pub d: usize,
    pub a_min: f64,
    pub a_max: f64,
    pub steps: usize,
    pub property: FamilyProperty,
    pub n: usize,
    pub opts: FalsifierOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub a: f64,
    pub status: Status,
    pub value: f64,
    pub oracle: bool,
}

/// Neighbouring grid points on which the refutation status changes;
/// `a` is the point on the non-refuted side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Transition {
    pub a: f64,
    pub refuted_at: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub family: FamilyKind,
    pub d: usize,
    pub property: Property,
    pub rows: Vec<SweepRow>,
    pub transitions: Vec<Transition>,
    /// Non-refuted side of the first transition.
    pub empirical_threshold: Option<f64>,
    /// Same quantity computed from the oracle column.
    pub oracle_threshold: Option<f64>,
    /// Rows where the oracle says "not a member" but nothing was refuted,
    /// or the oracle says "member" and a refutation was found.
    pub disagreements: usize,
}

pub fn family_map(kind: FamilyKind, d: usize, a: f64) -> Result<MapRep> {
    match kind {
        FamilyKind::Plain => gallery(&GalleryMap::PhiA { d, a }),
        FamilyKind::Transposed => gallery(&GalleryMap::PhiAT { d, a }),
    }
}

fn grid(spec: &SweepSpec) -> Result<Vec<f64>> {
    if spec.steps == 0
        || !(spec.a_min.is_finite() && spec.a_max.is_finite())
        || spec.a_max < spec.a_min
    {
        return Err(Error::BadParameter(
            "sweep needs steps >= 1 and a finite a_min <= a_max".into(),
        ));
    }
    if spec.steps == 1 {
        return Ok(vec![spec.a_min]);
    }
    let h = (spec.a_max - spec.a_min) / (spec.steps - 1) as f64;
    Ok((0..spec.steps).map(|i| spec.a_min + i as f64 * h).collect())
}

fn property_of(spec: &SweepSpec) -> Result<Property> {
    match spec.property {
        FamilyProperty::Cp => Ok(Property::Cp),
        _ if spec.n < 1 || spec.n > spec.d => Err(Error::BadParameter(format!(
            "level n = {} outside 1..={}",
            spec.n, spec.d
        ))),
        FamilyProperty::P => Ok(Property::P(spec.n)),
        FamilyProperty::S => Ok(Property::S(spec.n)),
    }
}

fn evaluate(spec: &SweepSpec, a: f64) -> Result<SweepRow> {
    let map = family_map(spec.kind, spec.d, a)?;
    let verdict = match spec.property {
        FamilyProperty::Cp => check_cp(&map, spec.opts.tol)?,
        FamilyProperty::P => falsify_n_positivity(&map, spec.n, &spec.opts)?,
        FamilyProperty::S if spec.n >= spec.d => {
            check_cp_as(&map, Property::S(spec.n), spec.opts.tol)?
        }
        FamilyProperty::S => falsify_generalized_schwarz(&map, spec.n, &spec.opts)?,
    };
    let oracle = oracle_phi_family(spec.kind, spec.d, a, spec.property, spec.n)?;
    Ok(SweepRow {
        a,
        status: verdict.status,
        value: verdict.value,
        oracle,
    })
}

fn transitions<T>(rows: &[SweepRow], refuted: T) -> Vec<Transition>
where
    T: Fn(&SweepRow) -> bool,
{
    rows.windows(2)
        .filter(|w| refuted(&w[0]) != refuted(&w[1]))
        .map(|w| {
            let (ok, bad) = if refuted(&w[0]) {
                (&w[1], &w[0])
            } else {
                (&w[0], &w[1])
            };
            Transition {
                a: ok.a,
                refuted_at: bad.a,
            }
        })
        .collect()
}

pub fn sweep(spec: &SweepSpec) -> Result<SweepReport> {
    let property = property_of(spec)?;
    let rows = grid(spec)?
        .into_par_iter()
        .map(|a| evaluate(spec, a))
        .collect::<Result<Vec<_>>>()?;
    let found = transitions(&rows, |r| r.status == Status::Refuted);
    let expected = transitions(&rows, |r| !r.oracle);
    let disagreements = rows
        .iter()
        .filter(|r| r.oracle == (r.status == Status::Refuted))
        .count();
    Ok(SweepReport {
        family: spec.kind,
        d: spec.d,
        property,
        empirical_threshold: found.first().map(|t| t.a),
        oracle_threshold: expected.first().map(|t| t.a),
        transitions: found,
        rows,
        disagreements,
    })
}
