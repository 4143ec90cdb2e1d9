//! Eve's probe states after a collective attack.

use num_complex::Complex64;

use super::attack::AttackModel;
use super::density::DensityMatrix;
use super::linalg::CMatrix;
use super::BasisTag;
use crate::codes::CodePair;
use crate::error::{Error, Result};
use crate::gf2::BitVector;

/// Largest total probe dimension `probe_dim^n` we build explicitly.
pub const MAX_EVE_DIM: usize = 4096;
/// Largest block length for which the `2^n` strings are enumerated.
pub const MAX_MIXTURE_LEN: usize = 12;

/// Probe state left by one qubit `|bit^basis>`: the qubit is traced out.
pub fn probe_state(attack: &AttackModel, bit: bool, basis: BasisTag) -> DensityMatrix {
    let out = attack.joint_output(bit, basis);
    let d = attack.probe_dim();
    let mut rho = CMatrix::zeros(d);
    for e in 0..d {
        for f in 0..d {
            rho[(e, f)] = (0..2)
                .map(|q| out[q * d + e] * out[q * d + f].conj())
                .sum::<Complex64>();
        }
    }
    DensityMatrix::from_matrix_unchecked(rho)
}

/// Per-position probe states for the four (bit, basis) inputs, cached so the
/// mixtures below do not recompute them.
struct SiteStates {
    states: [[DensityMatrix; 2]; 2],
}

impl SiteStates {
    fn new(attack: &AttackModel) -> Self {
        let make = |basis| [probe_state(attack, false, basis), probe_state(attack, true, basis)];
        SiteStates {
            states: [make(BasisTag::Z), make(BasisTag::X)],
        }
    }

    fn get(&self, bit: bool, basis_bit: bool) -> &DensityMatrix {
        &self.states[basis_bit as usize][bit as usize]
    }

    fn product(&self, x: &BitVector, bprime: &BitVector) -> DensityMatrix {
        let mut iter = x.iter().zip(bprime.iter());
        let (b0, s0) = iter.next().expect("nonempty string");
        iter.fold(self.get(b0, s0).clone(), |acc, (b, s)| acc.kron(self.get(b, s)))
    }
}

fn check_dims(attack: &AttackModel, x_len: usize, bprime: &BitVector) -> Result<()> {
    if x_len == 0 {
        return Err(Error::InvalidParams("empty INFO string".into()));
    }
    if bprime.len() != x_len {
        return Err(Error::DimensionMismatch {
            expected: x_len,
            found: bprime.len(),
        });
    }
    let total = (attack.probe_dim() as u128)
        .checked_pow(x_len as u32)
        .unwrap_or(u128::MAX);
    if total > MAX_EVE_DIM as u128 {
        return Err(Error::GuardExceeded {
            what: "probe state dimension",
            size: total,
            limit: MAX_EVE_DIM as u128,
        });
    }
    Ok(())
}

/// `ρ_x^{b'}`: Eve's state given Alice sent `x` in bases `bprime` (bit 1 = x
/// basis). A tensor product of per-position probe states.
pub fn eve_marginal(attack: &AttackModel, x: &BitVector, bprime: &BitVector) -> Result<DensityMatrix> {
    check_dims(attack, x.len(), bprime)?;
    Ok(SiteStates::new(attack).product(x, bprime))
}

/// `ρ̂_k`: uniform mixture of `ρ_x^{b'}` over all `x` with `x P_C^T = ξ` and
/// `x P_K^T = k`. Strings are summed in increasing numeric order.
pub fn rho_hat(
    attack: &AttackModel,
    code: &CodePair,
    bprime: &BitVector,
    xi: &BitVector,
    key: &BitVector,
) -> Result<DensityMatrix> {
    let n = code.n();
    if n > MAX_MIXTURE_LEN {
        return Err(Error::GuardExceeded {
            what: "key mixture enumeration",
            size: 1u128 << n,
            limit: 1u128 << MAX_MIXTURE_LEN,
        });
    }
    check_dims(attack, n, bprime)?;
    if xi.len() != code.r() {
        return Err(Error::DimensionMismatch {
            expected: code.r(),
            found: xi.len(),
        });
    }
    if key.len() != code.m() {
        return Err(Error::DimensionMismatch {
            expected: code.m(),
            found: key.len(),
        });
    }
    let sites = SiteStates::new(attack);
    let dim = attack.probe_dim().pow(n as u32);
    let mut sum = CMatrix::zeros(dim);
    let mut count = 0usize;
    for value in 0..1u64 << n {
        let x = BitVector::from_u64(n, value);
        if code.syndrome(&x)? == *xi && code.final_key(&x)? == *key {
            sum.add_assign(sites.product(&x, bprime).matrix())?;
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::InconsistentConstraints);
    }
    sum.scale(1.0 / count as f64);
    Ok(DensityMatrix::from_matrix_unchecked(sum))
}
