//! Collective attacks: one unitary on qubit ⊗ probe, reused at every position.
//!
//! Tensor factors are ordered qubit first, so joint basis index
//! `q * probe_dim + e` pairs qubit state `q` with probe state `e`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::linalg::CMatrix;
use super::{prepare, BasisTag};
use crate::error::{Error, Result};

const UNITARY_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct AttackModel {
    probe_dim: usize,
    unitary: CMatrix,
    probe_init: Vec<Complex64>,
}

impl AttackModel {
    pub fn new(probe_dim: usize, unitary: CMatrix, probe_init: Vec<Complex64>) -> Result<Self> {
        if probe_dim == 0 {
            return Err(Error::InvalidParams("probe dimension must be positive".into()));
        }
        if unitary.dim() != 2 * probe_dim {
            return Err(Error::DimensionMismatch {
                expected: 2 * probe_dim,
                found: unitary.dim(),
            });
        }
        if probe_init.len() != probe_dim {
            return Err(Error::DimensionMismatch {
                expected: probe_dim,
                found: probe_init.len(),
            });
        }
        let norm: f64 = probe_init.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > UNITARY_TOLERANCE {
            return Err(Error::InvalidParams(format!("probe state has squared norm {norm}")));
        }
        let dev = unitary.unitary_deviation();
        if dev > UNITARY_TOLERANCE {
            return Err(Error::NotUnitary(dev));
        }
        Ok(AttackModel {
            probe_dim,
            unitary,
            probe_init,
        })
    }

    /// Eve leaves the qubit alone.
    pub fn identity(probe_dim: usize) -> Self {
        Self::new(probe_dim, CMatrix::identity(2 * probe_dim), ground(probe_dim)).expect("identity is unitary")
    }

    /// The probe is flipped when the qubit is `|1>`: a perfect z-basis
    /// measurement with no z-basis disturbance.
    pub fn flip_z() -> Self {
        let mut u = CMatrix::zeros(4);
        for (from, to) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
            u[(to, from)] = one();
        }
        Self::new(2, u, ground(2)).expect("CNOT is unitary")
    }

    /// Controlled rotation of the probe by `theta` on qubit `|1>`. Equals the
    /// identity at 0 and acts as [`AttackModel::flip_z`] on the initial probe
    /// at `pi/2`; the x-basis error rate is `(1 - cos theta) / 2`.
    pub fn rotation(theta: f64) -> Self {
        Self::new(2, controlled_rotation(theta), ground(2)).expect("rotation is unitary")
    }

    /// [`AttackModel::rotation`] conjugated by a Hadamard on the qubit: the
    /// probe learns the x-basis value, and the z-basis error rate is
    /// `(1 - cos phi) / 2`.
    pub fn conjugate_rotation(phi: f64) -> Self {
        let h = hadamard().kron(&CMatrix::identity(2));
        let u = h
            .matmul(&controlled_rotation(phi))
            .and_then(|m| m.matmul(&h))
            .expect("dimensions agree");
        Self::new(2, u, ground(2)).expect("rotation is unitary")
    }

    /// Two probe qubits: the first is rotated by `phi` conditioned on the
    /// qubit's x value, then the second by `theta` conditioned on its z value.
    /// Error rates are `(1 - cos phi)/2` in z and `(1 - cos theta)/2` in x.
    pub fn rotation_pair(theta: f64, phi: f64) -> Self {
        // qubit ⊗ probe_a ⊗ probe_b, probe index e = 2 * a + b
        let x_part = {
            let h = hadamard().kron(&CMatrix::identity(4));
            let cr = embed_controlled(&rotation_matrix(phi), Target::First);
            h.matmul(&cr).and_then(|m| m.matmul(&h)).expect("dimensions agree")
        };
        let z_part = embed_controlled(&rotation_matrix(theta), Target::Second);
        let u = z_part.matmul(&x_part).expect("dimensions agree");
        Self::new(4, u, ground(4)).expect("product of unitaries")
    }

    /// [`AttackModel::rotation_pair`] tuned to the given per-qubit z- and
    /// x-basis error rates (each in `[0, 1]`).
    pub fn from_error_rates(z_error: f64, x_error: f64) -> Result<Self> {
        for (what, q) in [("z error rate", z_error), ("x error rate", x_error)] {
            if !(0.0..=1.0).contains(&q) {
                return Err(Error::Domain { what, value: q });
            }
        }
        let angle = |q: f64| (1.0 - 2.0 * q).clamp(-1.0, 1.0).acos();
        Ok(Self::rotation_pair(angle(x_error), angle(z_error)))
    }

    pub fn probe_dim(&self) -> usize {
        self.probe_dim
    }

    pub fn unitary(&self) -> &CMatrix {
        &self.unitary
    }

    pub fn probe_init(&self) -> &[Complex64] {
        &self.probe_init
    }

    /// `U (|bit^basis> ⊗ probe)`.
    pub fn joint_output(&self, bit: bool, basis: BasisTag) -> Vec<Complex64> {
        let qubit = prepare(bit, basis);
        let input: Vec<Complex64> = qubit
            .iter()
            .flat_map(|&q| self.probe_init.iter().map(move |&e| q * e))
            .collect();
        self.unitary.apply(&input).expect("dimension validated")
    }

    /// Probabilities of Bob reading 0 and 1 when he measures in
    /// `measure_basis`.
    pub fn outcome_probs(&self, bit: bool, send_basis: BasisTag, measure_basis: BasisTag) -> (f64, f64) {
        let out = self.joint_output(bit, send_basis);
        let d = self.probe_dim;
        let prob = |outcome: bool| -> f64 {
            let bra = prepare(outcome, measure_basis);
            (0..d)
                .map(|e| {
                    let amp: Complex64 = (0..2).map(|q| bra[q].conj() * out[q * d + e]).sum();
                    amp.norm_sqr()
                })
                .sum()
        };
        (prob(false), prob(true))
    }

    /// Per-qubit probability that Bob's result differs from a uniformly
    /// random bit Alice sent in `basis`, Bob measuring in the same basis.
    pub fn error_prob(&self, basis: BasisTag) -> f64 {
        let (_, p1) = self.outcome_probs(false, basis, basis);
        let (p0, _) = self.outcome_probs(true, basis, basis);
        0.5 * (p1 + p0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&AttackJson::from(self)).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: AttackJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        raw.try_into()
    }
}

/// Probabilities `(p0, p1)` of Bob's outcomes.
pub fn channel_outcome_probs(
    attack: &AttackModel,
    bit: bool,
    send_basis: BasisTag,
    measure_basis: BasisTag,
) -> (f64, f64) {
    attack.outcome_probs(bit, send_basis, measure_basis)
}

/// Error rate the INFO bits would see had they been sent and measured in the
/// x basis.
pub fn conjugate_error_prob(attack: &AttackModel) -> f64 {
    attack.error_prob(BasisTag::X)
}

/// Wire form: complex numbers as `[re, im]`, unitary row-major.
#[derive(Serialize, Deserialize)]
struct AttackJson {
    probe_dim: usize,
    probe_init: Vec<[f64; 2]>,
    unitary: Vec<[f64; 2]>,
}

impl From<&AttackModel> for AttackJson {
    fn from(a: &AttackModel) -> Self {
        let pair = |z: &Complex64| [z.re, z.im];
        AttackJson {
            probe_dim: a.probe_dim,
            probe_init: a.probe_init.iter().map(pair).collect(),
            unitary: a.unitary.as_slice().iter().map(pair).collect(),
        }
    }
}

impl TryFrom<AttackJson> for AttackModel {
    type Error = Error;

    fn try_from(raw: AttackJson) -> Result<Self> {
        let to_c = |v: Vec<[f64; 2]>| v.into_iter().map(|[re, im]| Complex64::new(re, im)).collect::<Vec<_>>();
        let unitary = CMatrix::from_row_major(2 * raw.probe_dim, to_c(raw.unitary))?;
        AttackModel::new(raw.probe_dim, unitary, to_c(raw.probe_init))
    }
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn ground(dim: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); dim];
    v[0] = one();
    v
}

fn hadamard() -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_real_rows(&[&[s, s], &[s, -s]]).expect("2x2")
}

fn rotation_matrix(theta: f64) -> CMatrix {
    let (s, c) = theta.sin_cos();
    CMatrix::from_real_rows(&[&[c, -s], &[s, c]]).expect("2x2")
}

/// `|0><0| ⊗ I + |1><1| ⊗ R` on qubit ⊗ one probe qubit.
fn controlled_rotation(theta: f64) -> CMatrix {
    let r = rotation_matrix(theta);
    let mut u = CMatrix::identity(4);
    for i in 0..2 {
        for j in 0..2 {
            u[(2 + i, 2 + j)] = r[(i, j)];
        }
    }
    u
}

enum Target {
    First,
    Second,
}

/// Controlled-`gate` from the qubit onto one of two probe qubits.
fn embed_controlled(gate: &CMatrix, target: Target) -> CMatrix {
    let on_probe = match target {
        Target::First => gate.kron(&CMatrix::identity(2)),
        Target::Second => CMatrix::identity(2).kron(gate),
    };
    let mut u = CMatrix::identity(8);
    for i in 0..4 {
        for j in 0..4 {
            u[(4 + i, 4 + j)] = on_probe[(i, j)];
        }
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn identity_attack_is_noiseless() {
        let a = AttackModel::identity(2);
        for basis in [BasisTag::Z, BasisTag::X] {
            assert_eq!(a.outcome_probs(false, basis, basis).0.round(), 1.0);
            let (p0, p1) = a.outcome_probs(true, basis, basis);
            assert!(p0.abs() < 1e-12 && (p1 - 1.0).abs() < 1e-12);
        }
        assert_eq!(conjugate_error_prob(&a), 0.0);
    }

    #[test]
    fn flip_z_disturbs_only_x() {
        let a = AttackModel::flip_z();
        assert!(a.error_prob(BasisTag::Z).abs() < 1e-12);
        assert!((a.error_prob(BasisTag::X) - 0.5).abs() < 1e-12);
        assert!((conjugate_error_prob(&a) - 0.5).abs() < 1e-12);
        let (p0, p1) = channel_outcome_probs(&a, true, BasisTag::X, BasisTag::X);
        assert!((p0 - 0.5).abs() < 1e-12 && (p1 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rotation_error_rates() {
        for k in 0..=8 {
            let theta = k as f64 * PI / 16.0;
            let a = AttackModel::rotation(theta);
            assert!(a.error_prob(BasisTag::Z).abs() < 1e-12);
            assert!((a.error_prob(BasisTag::X) - (1.0 - theta.cos()) / 2.0).abs() < 1e-12);
            let b = AttackModel::conjugate_rotation(theta);
            assert!(b.error_prob(BasisTag::X).abs() < 1e-12);
            assert!((b.error_prob(BasisTag::Z) - (1.0 - theta.cos()) / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn error_rate_attack_hits_targets() {
        let a = AttackModel::from_error_rates(0.03, 0.11).unwrap();
        assert_eq!(a.probe_dim(), 4);
        assert!((a.error_prob(BasisTag::Z) - 0.03).abs() < 1e-12);
        assert!((a.error_prob(BasisTag::X) - 0.11).abs() < 1e-12);
        assert!(AttackModel::from_error_rates(1.5, 0.0).is_err());
    }

    #[test]
    fn outcome_probs_sum_to_one() {
        let attacks = [
            AttackModel::rotation(0.7),
            AttackModel::conjugate_rotation(1.1),
            AttackModel::rotation_pair(0.4, 2.0),
        ];
        for a in &attacks {
            for bit in [false, true] {
                for sb in [BasisTag::Z, BasisTag::X] {
                    for mb in [BasisTag::Z, BasisTag::X] {
                        let (p0, p1) = a.outcome_probs(bit, sb, mb);
                        assert!((p0 + p1 - 1.0).abs() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn json_roundtrip_and_rejection() {
        let a = AttackModel::rotation(0.3);
        let back = AttackModel::from_json(&a.to_json()).unwrap();
        assert_eq!(back, a);
        let bad = r#"{"probe_dim":1,"probe_init":[[1,0]],"unitary":[[1,0],[1,0],[0,0],[1,0]]}"#;
        assert!(matches!(AttackModel::from_json(bad), Err(Error::NotUnitary(_))));
        assert!(AttackModel::from_json("{").is_err());
    }
}
