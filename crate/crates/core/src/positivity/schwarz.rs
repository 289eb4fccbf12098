//! n-generalized Schwarz falsifier.
//!
//! The property is checked in block form: for every `X` in the ampliated
//! algebra `M_n ⊗ M_d`,
//!
//! ```text
//! [ Φ⁽ⁿ⁾(𝕀)    Φ⁽ⁿ⁾(X)   ]
//! [ Φ⁽ⁿ⁾(X)*   Φ⁽ⁿ⁾(X*X) ]  ≥ 0
//! ```
//!
//! The objective `f(X)` is the smallest eigenvalue of that matrix. Each
//! iteration takes the bottom eigenvector `(u, w)` and minimizes the
//! quadratic `X ↦ (u, w)* M(X) (u, w)` exactly: with `P = Φ⁽ⁿ⁾†(w w*)` and
//! `R = Φ⁽ⁿ⁾†(u w*)` the minimizer is `X = −R P⁺`. Since the eigenvector is
//! held fixed, the block eigenvalue never increases.
//!
//! Scaling `X ↦ tX` is a congruence of the block matrix, so its sign
//! pattern does not depend on `‖X‖`. The search therefore runs on the unit
//! Frobenius sphere, keeping values comparable and bounded.

use rayon::prelude::*;

use super::verdict::{PositivityVerdict, Property, Status, Tolerances, Witness, WitnessPayload};
use super::FalsifierOptions;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec};
use crate::linmap::{self, MapRep, DEFAULT_STRUCT_TOL};
use crate::rng;

const PINV_CUT: f64 = 1e-12;

struct Ampliated {
    amp: MapRep,
    adj: MapRep,
    image_of_identity: CMat,
    size: usize,
}

impl Ampliated {
    fn new(map: &MapRep, n: usize) -> Result<Self> {
        let amp = linmap::ampliate(map, n)?;
        let adj = linmap::hs_adjoint(&amp);
        let size = amp.dim();
        let image_of_identity = amp.apply_unchecked(&linalg::identity(size));
        Ok(Ampliated {
            amp,
            adj,
            image_of_identity,
            size,
        })
    }

    fn block(&self, x: &CMat) -> CMat {
        let n = self.size;
        let fx = self.amp.apply_unchecked(x);
        let fxx = self.amp.apply_unchecked(&(x.adjoint() * x));
        let mut m = CMat::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n))
            .copy_from(&self.image_of_identity);
        m.view_mut((0, n), (n, n)).copy_from(&fx);
        m.view_mut((n, 0), (n, n)).copy_from(&fx.adjoint());
        m.view_mut((n, n), (n, n)).copy_from(&fxx);
        m
    }

    fn objective(&self, x: &CMat) -> (f64, CVec) {
        linalg::min_eigenpair(&self.block(x))
    }
}

/// Smallest eigenvalue of the Schwarz block matrix for `X` at level `n`,
/// assembled from a fresh ampliation of `map`.
pub fn schwarz_block_min_eig(map: &MapRep, n: usize, x: &CMat) -> f64 {
    let amp = Ampliated::new(map, n).expect("n >= 1");
    amp.objective(x).0
}

/// Embeds a level-`m` test operator into level `n ≥ m` as `X ⊕ 0`.
pub fn zero_pad(x: &CMat, d: usize, n: usize) -> CMat {
    let size = n * d;
    let mut out = CMat::zeros(size, size);
    out.view_mut((0, 0), (x.nrows(), x.ncols())).copy_from(x);
    out
}

struct RestartResult {
    value: f64,
    x: CMat,
}

pub fn falsify_generalized_schwarz(
    map: &MapRep,
    n: usize,
    opts: &FalsifierOptions,
) -> Result<PositivityVerdict> {
    if n < 1 {
        return Err(Error::BadParameter("n must be at least 1".into()));
    }
    if !linmap::is_hermiticity_preserving(map, DEFAULT_STRUCT_TOL) {
        return Err(Error::NotHermitianPreserving);
    }
    let amp = Ampliated::new(map, n)?;
    let restarts = opts.restarts.max(1);
    let results: Vec<RestartResult> = (0..restarts)
        .into_par_iter()
        .map(|r| run_restart(&amp, opts, r as u64))
        .collect();
    let best = results
        .into_iter()
        .reduce(|best, next| if next.value < best.value { next } else { best })
        .expect("at least one restart");

    let refuted = best.value < -opts.tol;
    Ok(PositivityVerdict {
        property: Property::S(n),
        status: if refuted {
            Status::Refuted
        } else {
            Status::Undetermined
        },
        value: best.value,
        witness: refuted.then_some(Witness {
            payload: WitnessPayload::SchwarzOperator { n, x: best.x },
            value: best.value,
        }),
        certificate: None,
        tolerances: Tolerances {
            tol: opts.tol,
            rel_decrease: opts.rel_decrease,
        },
        seed: opts.seed,
        restarts_used: restarts,
        inherited_from: None,
    })
}

fn run_restart(amp: &Ampliated, opts: &FalsifierOptions, index: u64) -> RestartResult {
    let mut rng = rng::stream(opts.seed, index);
    let size = amp.size;
    let mut x = normalized(linalg::ginibre(&mut rng, size, size)).expect("nonzero Ginibre draw");
    let (mut value, mut v) = amp.objective(&x);

    for _ in 0..opts.max_iters.max(1) {
        let Some((x_new, val_new, v_new)) = improve(amp, &v) else {
            break;
        };
        if val_new >= value {
            break;
        }
        let decrease = value - val_new;
        x = x_new;
        v = v_new;
        let prev = value;
        value = val_new;
        if decrease <= opts.rel_decrease * prev.abs().max(1.0) {
            break;
        }
    }
    RestartResult { value, x }
}

fn normalized(x: CMat) -> Option<CMat> {
    let n = linalg::frobenius(&x);
    (n.is_finite() && n > 0.0 && linalg::all_finite(&x)).then(|| x.unscale(n))
}

/// Exact minimization over `X` for the current bottom eigenvector, plus
/// escape directions when the quadratic is unbounded below.
fn improve(amp: &Ampliated, v: &CVec) -> Option<(CMat, f64, CVec)> {
    let size = amp.size;
    let u = v.rows(0, size).into_owned();
    let w = v.rows(size, size).into_owned();
    let r = amp.adj.apply_unchecked(&linalg::outer(&u, &w));
    let p = linalg::hermitian_part(&amp.adj.apply_unchecked(&linalg::outer(&w, &w)));

    let pinv = linalg::pinv_hermitian(&p, PINV_CUT);
    let x_star = -(&r * &pinv);
    let mut candidates = vec![x_star.clone()];

    let (vals, vecs) = linalg::eigh(&p);
    let scale = vals.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let base = 1.0 + linalg::frobenius(&x_star);
    let mut directions = Vec::new();
    if scale > 0.0 && vals[0] < -PINV_CUT * scale {
        // P indefinite: push X along w z*, z the negative direction of P.
        let z = vecs.column(0).into_owned();
        let wn = w.norm();
        if wn > 0.0 {
            directions.push(linalg::outer(&(w.clone() / linalg::c(wn, 0.0)), &z));
        }
    }
    // Linear term outside the range of P is unbounded below as well.
    let null_proj = linalg::identity(size) - &p * &pinv;
    let leak = -(&r * null_proj);
    let leak_norm = linalg::frobenius(&leak);
    if leak_norm > 1e-10 * (1.0 + linalg::frobenius(&r)) {
        directions.push(leak.unscale(leak_norm));
    }
    for dir in &directions {
        for t in [1.0, 10.0, 100.0] {
            candidates.push(&x_star + dir * linalg::c(t * base, 0.0));
        }
    }

    candidates
        .into_iter()
        .filter_map(normalized)
        .map(|c| {
            let (val, vec) = amp.objective(&c);
            (c, val, vec)
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
}
