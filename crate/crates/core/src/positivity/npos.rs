//! n-positivity falsifier.
//!
//! `Φ` is n-positive iff `<v|C_Φ|v> ≥ 0` for every `v` of Schmidt rank at
//! most `n`. The search parametrizes `v = Σ_{k≤n} x_k ⊗ y_k` and alternates
//! exact block updates: with the `y`'s fixed (and orthonormalized to `Q`),
//! `v = (𝕀 ⊗ Q) z` and the best `z` is the bottom eigenvector of
//! `(𝕀 ⊗ Q)* C (𝕀 ⊗ Q)`; symmetrically for the `x`'s.

use rayon::prelude::*;

use super::exact::check_cp_as;
use super::verdict::{PositivityVerdict, Property, Status, Tolerances, Witness, WitnessPayload};
use super::FalsifierOptions;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec};
use crate::linmap::{self, MapRep, DEFAULT_STRUCT_TOL};
use crate::rng;

struct RestartResult {
    value: f64,
    xs: Vec<CVec>,
    ys: Vec<CVec>,
}

pub fn falsify_n_positivity(
    map: &MapRep,
    n: usize,
    opts: &FalsifierOptions,
) -> Result<PositivityVerdict> {
    if n < 1 {
        return Err(Error::BadParameter("n must be at least 1".into()));
    }
    let d = map.dim();
    if n >= d {
        let mut v = check_cp_as(map, Property::P(n), opts.tol)?;
        v.seed = opts.seed;
        return Ok(v);
    }
    if !linmap::is_hermiticity_preserving(map, DEFAULT_STRUCT_TOL) {
        return Err(Error::NotHermitianPreserving);
    }
    let choi = linalg::hermitian_part(map.choi());
    let restarts = opts.restarts.max(1);
    let results: Vec<RestartResult> = (0..restarts)
        .into_par_iter()
        .map(|r| run_restart(&choi, d, n, opts, r as u64))
        .collect();
    let best = reduce_min(results);

    let tolerances = Tolerances {
        tol: opts.tol,
        rel_decrease: opts.rel_decrease,
    };
    let refuted = best.value < -opts.tol;
    Ok(PositivityVerdict {
        property: Property::P(n),
        status: if refuted {
            Status::Refuted
        } else {
            Status::Undetermined
        },
        value: best.value,
        witness: refuted.then_some(Witness {
            payload: WitnessPayload::SchmidtVector {
                xs: best.xs,
                ys: best.ys,
            },
            value: best.value,
        }),
        certificate: None,
        tolerances,
        seed: opts.seed,
        restarts_used: restarts,
        inherited_from: None,
    })
}

/// Minimum value; ties go to the lowest restart index.
fn reduce_min(results: Vec<RestartResult>) -> RestartResult {
    results
        .into_iter()
        .reduce(|best, next| if next.value < best.value { next } else { best })
        .expect("at least one restart")
}

fn columns(m: &CMat) -> Vec<CVec> {
    (0..m.ncols()).map(|k| m.column(k).into_owned()).collect()
}

fn run_restart(
    choi: &CMat,
    d: usize,
    n: usize,
    opts: &FalsifierOptions,
    index: u64,
) -> RestartResult {
    let mut rng = rng::stream(opts.seed, index);
    let id = linalg::identity(d);
    let mut ys = linalg::ginibre(&mut rng, d, n);
    let mut xs = CMat::zeros(d, n);
    let mut prev = f64::INFINITY;
    let mut value = f64::INFINITY;

    for _ in 0..opts.max_iters.max(1) {
        // x-block: v = Σ_k x_k ⊗ q_k
        let q = linalg::orthonormal_columns(&ys, 1e-12);
        let r = q.ncols();
        let b = linalg::kron(&id, &q);
        let (_, z) = linalg::min_eigenpair(&(b.adjoint() * choi * &b));
        let x_new = CMat::from_fn(d, r, |i, k| z[i * r + k]);

        // y-block: v = Σ_k p_k ⊗ y_k
        let p = linalg::orthonormal_columns(&x_new, 1e-12);
        let r = p.ncols();
        let b = linalg::kron(&p, &id);
        let (val, w) = linalg::min_eigenpair(&(b.adjoint() * choi * &b));
        xs = p;
        ys = CMat::from_fn(d, r, |a, k| w[k * d + a]);
        value = val;

        if prev - value <= opts.rel_decrease * prev.abs().max(1.0) {
            break;
        }
        prev = value;
    }
    RestartResult {
        value,
        xs: columns(&xs),
        ys: columns(&ys),
    }
}
