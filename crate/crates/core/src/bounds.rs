//! Finite-key security and reliability bounds, key rate, and the asymptotic
//! error-rate threshold curve.
//!
//! Bounds are returned raw. At desk-scale `n` they routinely exceed 1, which
//! only means they are vacuous; [`clamp_for_display`] exists for reporting.

use serde::Serialize;

use crate::error::{Error, Result};

/// Width of the final bisection bracket.
const BISECTION_TOLERANCE: f64 = 1e-12;

/// Binary entropy `H2(x) = -x log2 x - (1-x) log2 (1-x)`, with `H2(0) = H2(1) = 0`.
pub fn h2(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain {
            what: "binary entropy",
            value: x,
        });
    }
    let term = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.log2() };
    Ok(term(x) + term(1.0 - x))
}

fn h2_in_range(x: f64) -> f64 {
    h2(x.clamp(0.0, 1.0)).expect("clamped into domain")
}

/// Trace-distance bound for two `m`-bit keys given the conjugate-basis tail
/// probability: `2 m sqrt(tail)`.
pub fn key_distance_bound(m: usize, tail: f64) -> f64 {
    2.0 * m as f64 * tail.max(0.0).sqrt()
}

/// Parameters shared by the finite-key formulas.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundParams {
    pub n: usize,
    pub n_z: usize,
    pub n_x: usize,
    pub p_az: f64,
    pub p_ax: f64,
    pub eps_sec: f64,
    pub eps_rel: f64,
    /// Key rate `R = m / n`.
    pub rate: f64,
}

impl BoundParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n: usize,
        n_z: usize,
        n_x: usize,
        p_az: f64,
        p_ax: f64,
        eps_sec: f64,
        eps_rel: f64,
        rate: f64,
    ) -> Result<Self> {
        let p = BoundParams {
            n,
            n_z,
            n_x,
            p_az,
            p_ax,
            eps_sec,
            eps_rel,
            rate,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if self.n == 0 || self.n_z == 0 || self.n_x == 0 {
            return bad("n, n_z and n_x must be positive".into());
        }
        for (name, p) in [("p_az", self.p_az), ("p_ax", self.p_ax)] {
            if !(0.0..0.5).contains(&p) {
                return bad(format!("{name} = {p} outside [0, 1/2)"));
            }
        }
        for (name, e) in [("eps_sec", self.eps_sec), ("eps_rel", self.eps_rel)] {
            if e.is_nan() || e <= 0.0 {
                return bad(format!("{name} = {e} must be positive"));
            }
        }
        if self.rate.is_nan() || self.rate <= 0.0 || self.rate > 1.0 {
            return bad(format!("rate R = {} outside (0, 1]", self.rate));
        }
        if self.p_ax + self.eps_sec > 0.5 {
            return bad("p_ax + eps_sec exceeds 1/2".into());
        }
        if self.p_az + self.eps_rel > 0.5 {
            return bad("p_az + eps_rel exceeds 1/2".into());
        }
        Ok(())
    }

    /// Relative code distance the security argument needs: `2 (p_ax + eps_sec)`.
    pub fn delta(&self) -> f64 {
        2.0 * (self.p_ax + self.eps_sec)
    }
}

/// Expected trace distance between Eve's states for two keys:
/// `2 R n exp(-(n_x / (n + n_x))^2 n eps_sec^2)`.
pub fn security_exponent_bound(p: &BoundParams) -> f64 {
    let n = p.n as f64;
    let ratio = p.n_x as f64 / (n + p.n_x as f64);
    2.0 * p.rate * n * (-(ratio * ratio) * n * p.eps_sec * p.eps_sec).exp()
}

/// Probability that INFO errors exceed the correction budget while the
/// TEST-Z check passes: `exp(-2 (n_z / (n + n_z))^2 n eps_rel^2)`.
pub fn reliability_bound(p: &BoundParams) -> f64 {
    let n = p.n as f64;
    let ratio = p.n_z as f64 / (n + p.n_z as f64);
    (-2.0 * ratio * ratio * n * p.eps_rel * p.eps_rel).exp()
}

/// `1 - H2(2 p_ax + 2 eps_sec) - H2(p_az + eps_rel + 1/n)`. Passing zeros for
/// the epsilons and `inv_n` gives the asymptotic rate.
pub fn secret_rate(p_az: f64, p_ax: f64, eps_sec: f64, eps_rel: f64, inv_n: f64) -> Result<f64> {
    Ok(1.0 - h2(2.0 * p_ax + 2.0 * eps_sec)? - h2(p_az + eps_rel + inv_n)?)
}

/// Secret key rate for the given parameters; negative means no secure rate.
pub fn key_rate(p: &BoundParams) -> Result<f64> {
    secret_rate(p.p_az, p.p_ax, p.eps_sec, p.eps_rel, 1.0 / p.n as f64)
}

/// Clamps a raw bound into `[0, 1]` for display.
pub fn clamp_for_display(bound: f64) -> f64 {
    bound.clamp(0.0, 1.0)
}

/// Root of an increasing function on `[lo, hi]`.
fn bisect_increasing<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    if f(lo) >= 0.0 {
        return lo;
    }
    if f(hi) <= 0.0 {
        return hi;
    }
    while hi - lo > BISECTION_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn check_rate(what: &'static str, p: f64, max: f64) -> Result<()> {
    if !(0.0..=max).contains(&p) {
        return Err(Error::Domain { what, value: p });
    }
    Ok(())
}

/// Largest `p_ax` with `H2(2 p_ax) + H2(p_az) <= 1`.
pub fn max_p_ax(p_az: f64) -> Result<f64> {
    check_rate("p_az threshold", p_az, 0.5)?;
    let budget = 1.0 - h2(p_az)?;
    if budget <= 0.0 {
        return Ok(0.0);
    }
    Ok(bisect_increasing(|p| h2_in_range(2.0 * p) - budget, 0.0, 0.25))
}

/// Largest `p_az` with `H2(p_az) + H2(2 p_ax) <= 1`.
pub fn max_p_az(p_ax: f64) -> Result<f64> {
    check_rate("p_ax threshold", p_ax, 0.25)?;
    let budget = 1.0 - h2(2.0 * p_ax)?;
    if budget <= 0.0 {
        return Ok(0.0);
    }
    Ok(bisect_increasing(|p| h2_in_range(p) - budget, 0.0, 0.5))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurvePoint {
    pub p_az: f64,
    pub p_ax_max: f64,
}

/// The asymptotic secure-zone boundary sampled at each `p_az` of the grid.
pub fn threshold_curve(p_az_grid: &[f64]) -> Result<Vec<CurvePoint>> {
    p_az_grid
        .iter()
        .map(|&p_az| {
            Ok(CurvePoint {
                p_az,
                p_ax_max: max_p_ax(p_az)?,
            })
        })
        .collect()
}

/// `count` evenly spaced points covering `[0, 1/2]`.
pub fn uniform_grid(count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..count).map(|i| 0.5 * i as f64 / (count - 1) as f64).collect(),
    }
}

/// CSV with header `p_az,p_ax_max` and nine decimals per value.
pub fn curve_csv(points: &[CurvePoint]) -> String {
    let mut out = String::from("p_az,p_ax_max\n");
    for p in points {
        out.push_str(&format!("{:.9},{:.9}\n", p.p_az, p.p_ax_max));
    }
    out
}

/// The error rate `p` at which `H2(2p) + H2(p) = 1`: equal thresholds in
/// both bases.
pub fn symmetric_threshold() -> f64 {
    bisect_increasing(|p| h2_in_range(2.0 * p) + h2_in_range(p) - 1.0, 0.0, 0.25)
}
