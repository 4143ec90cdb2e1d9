//! Small-scale exact quantum model of the channel and of Eve's probes.

mod attack;
mod density;
mod eve;
pub mod linalg;

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use attack::{channel_outcome_probs, conjugate_error_prob, AttackModel};
pub use density::{trace_distance, DensityMatrix, STATE_TOLERANCE};
pub use eve::{eve_marginal, probe_state, rho_hat, MAX_EVE_DIM, MAX_MIXTURE_LEN};

pub use crate::stats::binomial_tail;

/// Encoding basis: `Z` is the computational basis, `X` the Hadamard basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisTag {
    Z,
    X,
}

impl BasisTag {
    /// Basis selected by a bit of the `b` string (1 = x basis).
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            BasisTag::X
        } else {
            BasisTag::Z
        }
    }
}

/// `|bit^basis>` as amplitudes over `|0>, |1>`.
pub fn prepare(bit: bool, basis: BasisTag) -> [Complex64; 2] {
    let c = |x: f64| Complex64::new(x, 0.0);
    match (basis, bit) {
        (BasisTag::Z, false) => [c(1.0), c(0.0)],
        (BasisTag::Z, true) => [c(0.0), c(1.0)],
        (BasisTag::X, false) => [c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)],
        (BasisTag::X, true) => [c(FRAC_1_SQRT_2), c(-FRAC_1_SQRT_2)],
    }
}
