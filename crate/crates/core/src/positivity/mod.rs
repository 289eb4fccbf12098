//! Certification and refutation along the hierarchy
//! `CP = P_d = S_d ⊂ P_{d−1} ⊂ S_{d−1} ⊂ … ⊂ P_2 ⊂ S_1 ⊂ P_1`.
//!
//! Only spectral checks and closed-form oracles ever certify. The searches
//! for `P_n` (`n < d`) and `S_n` return either a re-checkable witness or
//! an undetermined verdict.

mod classify;
mod decompose;
mod exact;
mod family;
mod npos;
mod schwarz;
mod stability;
mod sweep;
mod verdict;

use serde::{Deserialize, Serialize};

pub use classify::{classify, ClassifyOptions, HierarchyReport};
pub use decompose::{decompose_map, DecomposeOptions};
pub use exact::{check_cocp, check_cp, spa_lambda, DEFAULT_CP_TOL};
pub use family::{oracle_phi_family, transposed_schwarz_lower_bound, FamilyKind, FamilyProperty};
pub use npos::falsify_n_positivity;
pub use schwarz::{falsify_generalized_schwarz, schwarz_block_min_eig, zero_pad};
pub use stability::{
    check_trace_norm_contractivity, falsify_tensor_stable_positivity, MAX_TENSOR_DIM,
};
pub use sweep::{family_map, sweep, SweepReport, SweepRow, SweepSpec, Transition};
pub use verdict::{
    Certificate, PositivityVerdict, Property, Status, Tolerances, Witness, WitnessPayload,
};

/// Budget and thresholds shared by the multistart searches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FalsifierOptions {
    pub restarts: usize,
    pub max_iters: usize,
    /// A restart stops once one sweep lowers the objective by less than
    /// `rel_decrease · max(|value|, 1)`.
    pub rel_decrease: f64,
    /// Refutation threshold: the best value must lie below `-tol`.
    pub tol: f64,
    pub seed: u64,
}

impl Default for FalsifierOptions {
    fn default() -> Self {
        FalsifierOptions {
            restarts: 50,
            max_iters: 500,
            rel_decrease: 1e-11,
            tol: 1e-8,
            seed: 0,
        }
    }
}
