//! Tensor-stable positivity and trace-norm contractivity.

use rayon::prelude::*;

use super::npos::falsify_n_positivity;
use super::verdict::{PositivityVerdict, Property, Status, Tolerances, Witness, WitnessPayload};
use super::FalsifierOptions;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::linmap::{self, MapRep, DEFAULT_STRUCT_TOL};
use crate::rng;

/// Largest `dⁿ` accepted by the tensor-stability check.
pub const MAX_TENSOR_DIM: usize = 64;

/// Searches for a product vector on which the Choi matrix of `Φ^{⊗n}` is
/// negative, i.e. refutes positivity of `Φ^{⊗n}`.
pub fn falsify_tensor_stable_positivity(
    map: &MapRep,
    n: usize,
    opts: &FalsifierOptions,
) -> Result<PositivityVerdict> {
    if n < 1 {
        return Err(Error::BadParameter("n must be at least 1".into()));
    }
    let within = u32::try_from(n)
        .ok()
        .and_then(|e| map.dim().checked_pow(e))
        .is_some_and(|big| big <= MAX_TENSOR_DIM);
    if !within {
        return Err(Error::ResourceLimit(format!(
            "d^n = {}^{} exceeds {MAX_TENSOR_DIM}",
            map.dim(),
            n
        )));
    }
    let big = linmap::tensor_power(map, n)?;
    let mut verdict = falsify_n_positivity(&big, 1, opts)?;
    verdict.property = Property::TensorStable(n);
    Ok(verdict)
}

/// Samples Hermitian `X ∈ B(H)_h ⊗ span{ρ_1..ρ_n}` and refutes
/// n-partial contractivity if `‖(id ⊗ Φ)(X)‖₁ > ‖X‖₁ + tol`.
///
/// Samples alternate between pure and mixed `ρ_k`. Each `X` is normalized
/// to unit trace norm; the reported value is `‖X‖₁ − ‖(id ⊗ Φ)(X)‖₁`.
pub fn check_trace_norm_contractivity(
    map: &MapRep,
    n: usize,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<PositivityVerdict> {
    let d = map.dim();
    if n < 1 || n > d * d {
        return Err(Error::BadParameter(format!("n must lie in 1..={}", d * d)));
    }
    let flags = linmap::structural_flags(map, DEFAULT_STRUCT_TOL);
    if !flags.hermiticity_preserving.value.is_yes() {
        return Err(Error::NotHermitianPreserving);
    }
    if !flags.trace_preserving.value.is_yes() {
        return Err(Error::NotTracePreserving);
    }
    let amp = linmap::ampliate(map, d)?;

    let draws: Vec<(f64, CMat)> = (0..samples.max(1))
        .into_par_iter()
        .map(|s| {
            let mut r = rng::stream(seed, s as u64);
            let pure = s % 2 == 0;
            let mut x = CMat::zeros(d * d, d * d);
            for _ in 0..n {
                let h = linalg::random_hermitian(&mut r, d);
                let rho = if pure {
                    linalg::random_pure_density(&mut r, d)
                } else {
                    linalg::random_density(&mut r, d)
                };
                x += linalg::kron(&h, &rho);
            }
            let norm = linalg::trace_norm(&x);
            let x = x.unscale(norm);
            let gap = 1.0 - linalg::trace_norm(&amp.apply_unchecked(&x));
            (gap, x)
        })
        .collect();

    let (value, x) = draws
        .into_iter()
        .reduce(|best, next| if next.0 < best.0 { next } else { best })
        .expect("at least one sample");
    let refuted = value < -tol;
    Ok(PositivityVerdict {
        property: Property::Contractive(n),
        status: if refuted {
            Status::Refuted
        } else {
            Status::Undetermined
        },
        value,
        witness: refuted.then_some(Witness {
            payload: WitnessPayload::HermitianTestOperator { x },
            value,
        }),
        certificate: None,
        tolerances: Tolerances {
            tol,
            rel_decrease: 0.0,
        },
        seed,
        restarts_used: samples.max(1),
        inherited_from: None,
    })
}
