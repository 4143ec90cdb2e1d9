//! Binomial tails and Wilson score intervals.

use serde::Serialize;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

fn ln_choose(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}

/// `P[X = k]` for `X ~ Binomial(n, p)`.
pub fn binomial_pmf(n: u64, p: f64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    if p <= 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if p >= 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    (ln_choose(n, k) + k as f64 * p.ln() + (n - k) as f64 * (-p).ln_1p()).exp()
}

/// `P[X >= threshold]` for `X ~ Binomial(n, p)`: the sum over integer counts
/// at least `ceil(threshold)`.
pub fn binomial_tail(n: u64, p: f64, threshold: f64) -> f64 {
    assert!((0.0..=1.0).contains(&p), "probability {p} outside [0, 1]");
    let start = threshold.ceil().max(0.0);
    if start > n as f64 {
        return 0.0;
    }
    let start = start as u64;
    let tail: f64 = (start..=n).map(|k| binomial_pmf(n, p, k)).sum();
    tail.min(1.0)
}

/// `P[X <= limit]`, counting integer values up to `floor(limit)`.
pub fn binomial_cdf(n: u64, p: f64, limit: f64) -> f64 {
    if limit < 0.0 {
        return 0.0;
    }
    let stop = (limit.floor() as u64).min(n);
    let cdf: f64 = (0..=stop).map(|k| binomial_pmf(n, p, k)).sum();
    cdf.min(1.0)
}

/// Wilson score interval for `successes` out of `trials` at normal quantile
/// `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    assert!(trials > 0, "Wilson interval needs at least one trial");
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // The endpoints are exact at the extremes; round-off would leave them
    // a hair inside.
    let low = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let high = if successes == trials {
        1.0
    } else {
        (center + half).min(1.0)
    };
    (low, high)
}

/// An empirical frequency with its Wilson 95% interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub successes: u64,
    pub trials: u64,
    pub frequency: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
}

impl Estimate {
    pub fn new(successes: u64, trials: u64) -> Self {
        let (wilson_low, wilson_high) = wilson_interval(successes, trials, Z95);
        Estimate {
            successes,
            trials,
            frequency: successes as f64 / trials as f64,
            wilson_low,
            wilson_high,
        }
    }

    /// One Wilson standard deviation: the half-width of the `z = 1` interval.
    pub fn sigma(&self) -> f64 {
        let (lo, hi) = wilson_interval(self.successes, self.trials, 1.0);
        0.5 * (hi - lo)
    }

    /// Whether the frequency is at most `bound + k * sigma`.
    pub fn consistent_with_bound(&self, bound: f64, k: f64) -> bool {
        self.frequency <= bound + k * self.sigma()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_examples() {
        assert_eq!(binomial_tail(5, 0.0, 0.5), 0.0);
        assert!((binomial_tail(1, 0.5, 0.5) - 0.5).abs() < 1e-15);
        // (C(3,2) + C(3,3)) / 8
        assert!((binomial_tail(3, 0.5, 2.0) - 0.5).abs() < 1e-15);
        assert_eq!(binomial_tail(3, 0.3, 0.0), 1.0);
        assert_eq!(binomial_tail(3, 0.3, 3.5), 0.0);
        assert!((binomial_tail(4, 1.0, 4.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pmf_sums_to_one() {
        for &p in &[0.0, 0.03, 0.5, 0.97, 1.0] {
            let total: f64 = (0..=20).map(|k| binomial_pmf(20, p, k)).sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cdf_complements_tail() {
        for t in 0..=6 {
            let s = binomial_cdf(6, 0.2, t as f64 - 1.0) + binomial_tail(6, 0.2, t as f64);
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn wilson_brackets_frequency() {
        let e = Estimate::new(30, 100);
        assert!(e.wilson_low < 0.3 && 0.3 < e.wilson_high);
        let zero = Estimate::new(0, 1000);
        assert_eq!(zero.wilson_low, 0.0);
        assert!(zero.wilson_high > 0.0 && zero.wilson_high < 0.01);
        assert!(zero.consistent_with_bound(0.0, 3.0));
    }
}
