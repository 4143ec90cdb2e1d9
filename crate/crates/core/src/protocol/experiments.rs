//! Sampling experiments: the exhaustive sampling-without-replacement check,
//! Monte Carlo estimates of the security and reliability events, and exact
//! small-scale evaluation of Eve's expected advantage.
//!
//! Trial `t` of an experiment with master seed `s` draws from
//! `ChaCha8Rng::seed_from_u64(s + t)`, so any subset of trials can be
//! replayed on its own.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{exceeds_rate, run_protocol, test_gate, within_rate, FlipTable, ProtocolParams, RATE_SLACK};
use crate::bounds::key_distance_bound;
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::quantum::{conjugate_error_prob, rho_hat, trace_distance, AttackModel, BasisTag};
use crate::stats::{binomial_cdf, binomial_tail, Estimate};

pub type TrialRng = ChaCha8Rng;

/// Largest pool enumerated by [`hoeffding_exhaustive`].
pub const MAX_HOEFFDING_POOL: usize = 24;

pub fn trial_rng(seed: u64, trial: u64) -> TrialRng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial))
}

/// Exact probability, over all equally likely ways of choosing `n` INFO
/// positions out of the `n + n_x` pool, that the INFO error rate exceeds
/// `p_ax + eps` while the remaining TEST-X error rate stays at most `p_ax`.
pub fn hoeffding_exhaustive(pool: &BitVector, n: usize, n_x: usize, p_ax: f64, eps: f64) -> Result<f64> {
    let size = n + n_x;
    if pool.len() != size {
        return Err(Error::DimensionMismatch {
            expected: size,
            found: pool.len(),
        });
    }
    if size > MAX_HOEFFDING_POOL {
        return Err(Error::GuardExceeded {
            what: "pool split enumeration",
            size: 1u128 << size,
            limit: 1u128 << MAX_HOEFFDING_POOL,
        });
    }
    if n == 0 {
        return Err(Error::InvalidParams("sample size n must be positive".into()));
    }
    let errors = pool.to_u64() as u32;
    let total_errors = errors.count_ones() as usize;
    let mut hits: u64 = 0;
    let mut splits: u64 = 0;
    // Gosper's hack: every `size`-bit mask with exactly `n` ones.
    let mut mask: u32 = (1u32 << n) - 1;
    let limit: u32 = 1u32 << size;
    while mask < limit {
        let info_errors = (mask & errors).count_ones() as usize;
        let test_errors = total_errors - info_errors;
        if exceeds_rate(info_errors, n, p_ax + eps) && within_rate(test_errors, n_x, p_ax) {
            hits += 1;
        }
        splits += 1;
        let low = mask & mask.wrapping_neg();
        let ripple = mask + low;
        mask = (((ripple ^ mask) >> 2) / low) | ripple;
    }
    Ok(hits as f64 / splits as f64)
}

/// Probability that both tests pass, computed from per-bit error rates.
pub fn pass_probability(params: &ProtocolParams, attack: &AttackModel) -> f64 {
    let qz = attack.error_prob(BasisTag::Z);
    let qx = attack.error_prob(BasisTag::X);
    binomial_cdf(params.n_z as u64, qz, params.n_z as f64 * params.p_az + RATE_SLACK)
        * binomial_cdf(params.n_x as u64, qx, params.n_x as f64 * params.p_ax + RATE_SLACK)
}

/// `2 m sqrt(P[|C̃_I| >= d_{r,m}/2 and both tests pass])` for a collective
/// attack, where the conjugate-basis INFO errors are independent of the
/// test errors.
pub fn expected_difference_bound(params: &ProtocolParams, attack: &AttackModel) -> f64 {
    let code = &params.code;
    let tail = binomial_tail(code.n() as u64, conjugate_error_prob(attack), code.d_rm() as f64 / 2.0);
    key_distance_bound(code.m(), tail * pass_probability(params, attack))
}

/// Exact expectation of Eve's trace distance between the states for two
/// keys, zero on aborted runs.
///
/// INFO bits are always sent in the z basis and the attack is the same at
/// every position, so `ρ̂_k` depends on the run only through `ξ`, which is
/// uniform over `F_2^r`; the tests are independent of the INFO bits.
pub fn expected_eve_difference(
    params: &ProtocolParams,
    attack: &AttackModel,
    key_a: &BitVector,
    key_b: &BitVector,
) -> Result<f64> {
    let code = &params.code;
    let bprime = BitVector::zeros(code.n());
    let r = code.r();
    let mut sum = 0.0;
    for value in 0..1u64 << r {
        let xi = BitVector::from_u64(r, value);
        let a = rho_hat(attack, code, &bprime, &xi, key_a)?;
        let b = rho_hat(attack, code, &bprime, &xi, key_b)?;
        sum += trace_distance(&a, &b)?;
    }
    Ok(pass_probability(params, attack) * sum / (1u64 << r) as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JointEventStats {
    pub estimate: Estimate,
    pub d_rm: usize,
    pub conjugate_error: f64,
}

fn count_flips<R: Rng + ?Sized>(rng: &mut R, flips: &FlipTable, count: usize, basis: BasisTag) -> usize {
    (0..count)
        .filter(|_| {
            let bit: bool = rng.random();
            rng.random::<f64>() < flips.flip_prob(bit, basis)
        })
        .count()
}

/// Monte Carlo estimate of `P[|C̃_I| >= d_{r,m}/2 and both tests pass]`.
///
/// Per trial the INFO bits get i.i.d. conjugate-basis errors at rate
/// [`conjugate_error_prob`], while TEST-Z and TEST-X bits go through the
/// channel in their own bases.
pub fn monte_carlo_joint_event(
    params: &ProtocolParams,
    attack: &AttackModel,
    trials: u64,
    seed: u64,
) -> Result<JointEventStats> {
    params.validate()?;
    if trials == 0 {
        return Err(Error::InvalidParams("trials must be at least 1".into()));
    }
    let q = conjugate_error_prob(attack);
    let flips = FlipTable::new(attack);
    let half_distance = params.code.d_rm() as f64 / 2.0;
    let mut hits = 0u64;
    for t in 0..trials {
        let mut rng = trial_rng(seed, t);
        let info = (0..params.n).filter(|_| rng.random::<f64>() < q).count();
        let tz = count_flips(&mut rng, &flips, params.n_z, BasisTag::Z);
        let tx = count_flips(&mut rng, &flips, params.n_x, BasisTag::X);
        let pass = within_rate(tz, params.n_z, params.p_az) && within_rate(tx, params.n_x, params.p_ax);
        if pass && info as f64 >= half_distance {
            hits += 1;
        }
    }
    Ok(JointEventStats {
        estimate: Estimate::new(hits, trials),
        d_rm: params.code.d_rm(),
        conjugate_error: q,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReliabilityStats {
    pub trials: u64,
    pub aborted: u64,
    pub completed: u64,
    /// Completed runs whose keys differ.
    pub mismatches: u64,
    /// Completed runs with at most `t_corr` INFO errors whose keys differ;
    /// always zero for a correct decoder.
    pub mismatches_within_capability: u64,
    /// Mismatch frequency over all trials, aborted ones counting as agreement.
    pub mismatch: Estimate,
}

impl ReliabilityStats {
    /// Mismatch frequency among completed runs.
    pub fn mismatch_given_completed(&self) -> Option<Estimate> {
        (self.completed > 0).then(|| Estimate::new(self.mismatches, self.completed))
    }
}

/// Runs the full protocol `trials` times and tallies key disagreements.
pub fn reliability_trials(
    params: &ProtocolParams,
    attack: &AttackModel,
    trials: u64,
    seed: u64,
) -> Result<ReliabilityStats> {
    if trials == 0 {
        return Err(Error::InvalidParams("trials must be at least 1".into()));
    }
    let t_corr = params.code.t_corr();
    let (mut aborted, mut mismatches, mut within) = (0u64, 0u64, 0u64);
    for t in 0..trials {
        let transcript = run_protocol(params, attack, &mut trial_rng(seed, t))?;
        debug_assert_eq!(transcript.aborted, !test_gate(&transcript.c_z, &transcript.c_b, params));
        if transcript.aborted {
            aborted += 1;
        } else if transcript.keys_differ() {
            mismatches += 1;
            if transcript.info_errors() <= t_corr {
                within += 1;
            }
        }
    }
    Ok(ReliabilityStats {
        trials,
        aborted,
        completed: trials - aborted,
        mismatches,
        mismatches_within_capability: within,
        mismatch: Estimate::new(mismatches, trials),
    })
}
