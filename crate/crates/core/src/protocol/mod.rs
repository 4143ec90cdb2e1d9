//! The protocol state machine and the sampling experiments built on it.
//!
//! One run: sample the partition `(s, z, b)`, draw Alice's string `i`, send
//! each bit in basis `b_l` through the attacked channel, let Bob measure in
//! the announced basis, compare the TEST-Z and TEST-X bits against the
//! thresholds, and on success publish the syndrome of the INFO string,
//! correct Bob's copy and compress both to the final key.

mod experiments;
mod partition;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::codes::CodePair;
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::quantum::{AttackModel, BasisTag};

pub use experiments::{
    expected_difference_bound, expected_eve_difference, hoeffding_exhaustive, monte_carlo_joint_event,
    pass_probability, reliability_trials, trial_rng, JointEventStats, ReliabilityStats, TrialRng,
};
pub use partition::{sample_partition, BitClass, Partition};

/// Absorbs round-off when comparing an error count with `size * rate`.
pub(crate) const RATE_SLACK: f64 = 1e-9;

/// `count <= size * rate`, the inclusive test-threshold comparison.
pub(crate) fn within_rate(count: usize, size: usize, rate: f64) -> bool {
    count as f64 <= size as f64 * rate + RATE_SLACK
}

/// `count > size * rate`, strict.
pub(crate) fn exceeds_rate(count: usize, size: usize, rate: f64) -> bool {
    count as f64 > size as f64 * rate + RATE_SLACK
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolParams {
    pub n: usize,
    pub n_z: usize,
    pub n_x: usize,
    pub p_az: f64,
    pub p_ax: f64,
    pub code: CodePair,
}

impl ProtocolParams {
    pub fn new(n_z: usize, n_x: usize, p_az: f64, p_ax: f64, code: CodePair) -> Result<Self> {
        let p = ProtocolParams {
            n: code.n(),
            n_z,
            n_x,
            p_az,
            p_ax,
            code,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.code.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: self.code.n(),
            });
        }
        if self.n == 0 || self.n_z == 0 || self.n_x == 0 {
            return Err(Error::InvalidParams("n, n_z and n_x must be positive".into()));
        }
        for (name, p) in [("p_az", self.p_az), ("p_ax", self.p_ax)] {
            if !(0.0..0.5).contains(&p) {
                return Err(Error::InvalidParams(format!("{name} = {p} outside [0, 1/2)")));
            }
        }
        Ok(())
    }

    /// `N = n + n_z + n_x`.
    pub fn total(&self) -> usize {
        self.n + self.n_z + self.n_x
    }
}

/// Everything observable in one protocol run. `xi` and the keys are absent
/// when the run aborted at the test step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub partition: Partition,
    pub i_sent: BitVector,
    pub i_received: BitVector,
    pub c: BitVector,
    pub c_s: BitVector,
    pub c_z: BitVector,
    pub c_b: BitVector,
    pub xi: Option<BitVector>,
    pub aborted: bool,
    pub key_alice: Option<BitVector>,
    pub key_bob: Option<BitVector>,
}

impl Transcript {
    /// Number of INFO positions where Bob's raw bit differs from Alice's.
    pub fn info_errors(&self) -> usize {
        self.c_s.weight()
    }

    /// Whether a completed run ended with differing keys.
    pub fn keys_differ(&self) -> bool {
        !self.aborted && self.key_alice != self.key_bob
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    /// Checks the decomposition of `c` and the abort rule.
    pub fn check_invariants(&self, params: &ProtocolParams) -> bool {
        let p = &self.partition;
        let c_ok = self.i_sent.xor(&self.i_received).is_ok_and(|c| c == self.c);
        let parts_ok = self.c.restrict(&p.s).is_ok_and(|v| v == self.c_s)
            && self.c.restrict(&p.z).is_ok_and(|v| v == self.c_z)
            && self.c.restrict(&p.b).is_ok_and(|v| v == self.c_b);
        let abort_ok = self.aborted != test_gate(&self.c_z, &self.c_b, params);
        let keys_ok = self.aborted == self.key_alice.is_none() && self.aborted == self.key_bob.is_none();
        p.is_valid() && c_ok && parts_ok && abort_ok && keys_ok
    }
}

/// `true` (pass) iff at most `n_z p_az` TEST-Z and at most `n_x p_ax`
/// TEST-X bits differ.
pub fn test_gate(c_z: &BitVector, c_b: &BitVector, params: &ProtocolParams) -> bool {
    within_rate(c_z.weight(), params.n_z, params.p_az) && within_rate(c_b.weight(), params.n_x, params.p_ax)
}

/// Bob's flip probability for each (bit, basis) pair, from the channel model.
pub(crate) struct FlipTable {
    probs: [[f64; 2]; 2],
}

impl FlipTable {
    pub(crate) fn new(attack: &AttackModel) -> Self {
        let row = |basis: BasisTag| {
            let (_, p1) = attack.outcome_probs(false, basis, basis);
            let (p0, _) = attack.outcome_probs(true, basis, basis);
            [p1, p0]
        };
        FlipTable {
            probs: [row(BasisTag::Z), row(BasisTag::X)],
        }
    }

    pub(crate) fn flip_prob(&self, bit: bool, basis: BasisTag) -> f64 {
        self.probs[(basis == BasisTag::X) as usize][bit as usize]
    }
}

/// Executes one run of the protocol against a collective attack.
pub fn run_protocol<R: Rng + ?Sized>(params: &ProtocolParams, attack: &AttackModel, rng: &mut R) -> Result<Transcript> {
    params.validate()?;
    let total = params.total();
    let partition = sample_partition(total, params.n, params.n_z, params.n_x, rng)?;
    let i_sent = BitVector::from_bits((0..total).map(|_| rng.random::<bool>()));

    let flips = FlipTable::new(attack);
    let mut i_received = i_sent.clone();
    for l in 0..total {
        let basis = BasisTag::from_bit(partition.b.get(l));
        let u: f64 = rng.random();
        if u < flips.flip_prob(i_sent.get(l), basis) {
            i_received.flip(l);
        }
    }

    let c = &i_sent + &i_received;
    let c_s = c.restrict(&partition.s)?;
    let c_z = c.restrict(&partition.z)?;
    let c_b = c.restrict(&partition.b)?;
    let aborted = !test_gate(&c_z, &c_b, params);

    let (xi, key_alice, key_bob) = if aborted {
        (None, None, None)
    } else {
        let x = i_sent.restrict(&partition.s)?;
        let x_b = i_received.restrict(&partition.s)?;
        let xi = params.code.syndrome(&x)?;
        let x_hat = params.code.correct(&x_b, &xi)?;
        let k = params.code.final_key(&x)?;
        let k_b = params.code.final_key(&x_hat)?;
        (Some(xi), Some(k), Some(k_b))
    };

    Ok(Transcript {
        partition,
        i_sent,
        i_received,
        c,
        c_s,
        c_z,
        c_b,
        xi,
        aborted,
        key_alice,
        key_bob,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    fn params(n_z: usize, n_x: usize, p_az: f64, p_ax: f64) -> ProtocolParams {
        ProtocolParams::new(n_z, n_x, p_az, p_ax, CodePair::hamming74()).unwrap()
    }

    #[test]
    fn gate_boundaries() {
        let p = params(10, 10, 0.25, 0.25);
        assert!(test_gate(&BitVector::zeros(10), &BitVector::zeros(10), &p));
        // floor(10 * 0.25) = 2 passes, 3 aborts
        assert!(test_gate(&bv("1100000000"), &bv("0000000011"), &p));
        assert!(!test_gate(&bv("1100000000"), &bv("0000000111"), &p));
        assert!(!test_gate(&bv("1110000000"), &BitVector::zeros(10), &p));
        let strict = params(10, 10, 0.0, 0.0);
        assert!(!test_gate(&bv("0000000001"), &BitVector::zeros(10), &strict));
    }

    #[test]
    fn gate_inclusive_at_exact_products() {
        // 7 * (1/7) = 1 exactly: one error passes.
        let p = params(7, 7, 1.0 / 7.0, 1.0 / 7.0);
        assert!(test_gate(&bv("0000001"), &bv("1000000"), &p));
        assert!(!test_gate(&bv("0000011"), &bv("1000000"), &p));
    }

    #[test]
    fn params_validation() {
        assert!(ProtocolParams::new(0, 3, 0.1, 0.1, CodePair::hamming74()).is_err());
        assert!(ProtocolParams::new(3, 3, 0.5, 0.1, CodePair::hamming74()).is_err());
        assert_eq!(params(3, 4, 0.1, 0.1).total(), 14);
    }

    #[test]
    fn identity_attack_never_aborts() {
        let p = params(8, 8, 0.1, 0.1);
        let attack = AttackModel::identity(2);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let t = run_protocol(&p, &attack, &mut rng).unwrap();
            assert!(t.check_invariants(&p));
            assert!(!t.aborted);
            assert_eq!(t.i_sent, t.i_received);
            assert_eq!(t.key_alice, t.key_bob);
        }
    }

    #[test]
    fn flip_z_attack_is_caught_by_x_tests() {
        // x-basis error rate 1/2 against p_ax = 0.05 over 60 TEST-X bits.
        let p = params(60, 60, 0.05, 0.05);
        let attack = AttackModel::flip_z();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let aborted = (0..200)
            .map(|_| run_protocol(&p, &attack, &mut rng).unwrap())
            .inspect(|t| assert!(t.check_invariants(&p)))
            .filter(|t| t.aborted)
            .count();
        assert_eq!(aborted, 200);
    }

    #[test]
    fn zero_thresholds_abort_on_any_test_error() {
        let p = params(6, 6, 0.0, 0.0);
        let attack = AttackModel::from_error_rates(0.2, 0.2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..300 {
            let t = run_protocol(&p, &attack, &mut rng).unwrap();
            assert_eq!(t.aborted, t.c_z.weight() + t.c_b.weight() > 0);
        }
    }

    #[test]
    fn transcript_json_uses_bit_strings() {
        let p = params(3, 3, 0.4, 0.4);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = run_protocol(&p, &AttackModel::identity(2), &mut rng).unwrap();
        let json = t.to_json();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        let i_sent = value["i_sent"].as_str().unwrap();
        assert_eq!(i_sent.len(), 13);
        assert!(i_sent.chars().all(|ch| ch == '0' || ch == '1'));
        assert_eq!(value["partition"]["s"].as_str().unwrap().len(), 13);
        let back: Transcript = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
    }
}
