//! Exhaustive verification suites.
//!
//! Every suite produces one [`InstanceReport`] per checked instance, holding
//! the two sides of an inequality `lhs <= rhs`. `VerifyOptions::rhs_scale`
//! multiplies every right-hand side; setting it to zero is a self-test that
//! must turn satisfied instances into violations.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::Serialize;

use crate::bounds::key_distance_bound;
use crate::codes::{for_each_combination, CodePair};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};
use crate::protocol::{hoeffding_exhaustive, monte_carlo_joint_event, pass_probability, ProtocolParams};
use crate::quantum::{conjugate_error_prob, rho_hat, trace_distance, AttackModel, DensityMatrix};
use crate::stats::binomial_tail;

/// Absolute slack allowed on floating-point comparisons.
pub const VERIFY_TOLERANCE: f64 = 1e-9;

/// Most codes [`enumerate_codes`] may return.
pub const CODE_BUDGET: usize = 500;

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    pub rhs_scale: f64,
    /// Monte Carlo trials per attack in the joint-event suite.
    pub trials: u64,
}

impl VerifyOptions {
    pub fn new(seed: u64) -> Self {
        VerifyOptions {
            seed,
            rhs_scale: 1.0,
            trials: 2000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstanceReport {
    pub suite: &'static str,
    pub instance: String,
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
}

impl InstanceReport {
    fn new(suite: &'static str, instance: String, lhs: f64, rhs: f64) -> Self {
        InstanceReport {
            suite,
            instance,
            lhs,
            rhs,
            satisfied: lhs <= rhs + VERIFY_TOLERANCE,
        }
    }
}

/// The nine rotation attacks `θ = kπ/16`, `k = 0..=8`.
pub fn rotation_family() -> Vec<(String, AttackModel)> {
    (0..=8)
        .map(|k| {
            (
                format!("rotation:{k}pi/16"),
                AttackModel::rotation(k as f64 * PI / 16.0),
            )
        })
        .collect()
}

fn canonical_form(rows: &[u64], r: usize, n: usize, perms: &[Vec<usize>]) -> Vec<u64> {
    let permute = |v: u64, p: &[usize]| (0..n).fold(0u64, |acc, j| acc | (((v >> j) & 1) << p[j]));
    perms
        .iter()
        .map(|p| {
            // Parity-check row order carries no meaning; key row order does.
            let mut pc: Vec<u64> = rows[..r].iter().map(|&v| permute(v, p)).collect();
            pc.sort_unstable();
            pc.extend(rows[r..].iter().map(|&v| permute(v, p)));
            pc
        })
        .min()
        .expect("at least the identity permutation")
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    permute_into(&mut current, 0, &mut out);
    out
}

fn permute_into(v: &mut Vec<usize>, start: usize, out: &mut Vec<Vec<usize>>) {
    if start == v.len() {
        out.push(v.clone());
        return;
    }
    for i in start..v.len() {
        v.swap(start, i);
        permute_into(v, start + 1, out);
        v.swap(start, i);
    }
}

/// All code pairs with the given shapes, one per class of column
/// permutations (parity-check rows taken as an unordered set). Fails when
/// more than `budget` classes exist.
pub fn enumerate_codes(ns: &[usize], rs: &[usize], ms: &[usize], budget: usize) -> Result<Vec<CodePair>> {
    let mut codes = Vec::new();
    for &n in ns {
        if n > 6 {
            return Err(Error::GuardExceeded {
                what: "code enumeration block length",
                size: n as u128,
                limit: 6,
            });
        }
        let perms = permutations(n);
        for &r in rs {
            for &m in ms {
                if m == 0 || r + m > n {
                    continue;
                }
                let mut seen = BTreeSet::new();
                let mut rows = vec![0u64; r + m];
                collect_row_tuples(n, r, 0, &mut rows, &mut |rows| {
                    seen.insert(canonical_form(rows, r, n, &perms));
                });
                for form in seen {
                    let to_matrix =
                        |slice: &[u64]| BitMatrix::new(n, slice.iter().map(|&v| BitVector::from_u64(n, v)).collect());
                    codes.push(CodePair::new(to_matrix(&form[..r])?, to_matrix(&form[r..])?)?);
                    if codes.len() > budget {
                        return Err(Error::GuardExceeded {
                            what: "code enumeration",
                            size: codes.len() as u128,
                            limit: budget as u128,
                        });
                    }
                }
            }
        }
    }
    Ok(codes)
}

/// Visits every ordered tuple of linearly independent rows.
fn collect_row_tuples<F: FnMut(&[u64])>(n: usize, r: usize, depth: usize, rows: &mut Vec<u64>, visit: &mut F) {
    if depth == rows.len() {
        visit(rows);
        return;
    }
    for v in 1..1u64 << n {
        // Independence of the prefix plus v: v must avoid the span so far.
        let mut span = vec![0u64];
        for &w in &rows[..depth] {
            let shifted: Vec<u64> = span.iter().map(|&s| s ^ w).collect();
            span.extend(shifted);
        }
        if span.contains(&v) {
            continue;
        }
        // Keep parity rows increasing to avoid listing reorderings.
        if depth > 0 && depth < r && v <= rows[depth - 1] {
            continue;
        }
        rows[depth] = v;
        collect_row_tuples(n, r, depth + 1, rows, visit);
    }
}

fn code_label(code: &CodePair) -> String {
    let rows = |m: &BitMatrix| m.rows().iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
    format!(
        "n={} r={} m={} pc=[{}] pk=[{}]",
        code.n(),
        code.r(),
        code.m(),
        rows(code.pc_rows()),
        rows(code.pk_rows())
    )
}

/// Eve's states `ρ̂_k` for every key, one vector per syndrome, with INFO
/// bits in the z basis.
fn rho_hats(code: &CodePair, attack: &AttackModel) -> Result<Vec<Vec<DensityMatrix>>> {
    let bprime = BitVector::zeros(code.n());
    (0..1u64 << code.r())
        .map(|xi| {
            let xi = BitVector::from_u64(code.r(), xi);
            (0..1u64 << code.m())
                .map(|k| rho_hat(attack, code, &bprime, &xi, &BitVector::from_u64(code.m(), k)))
                .collect()
        })
        .collect()
}

/// Largest and mean (over syndromes, max over key pairs) trace distance.
fn key_distances(states: &[Vec<DensityMatrix>]) -> Result<(f64, f64)> {
    let mut max = 0.0f64;
    let mut mean = 0.0;
    for per_key in states {
        let mut worst = 0.0f64;
        for a in 0..per_key.len() {
            for b in a + 1..per_key.len() {
                worst = worst.max(trace_distance(&per_key[a], &per_key[b])?);
            }
        }
        max = max.max(worst);
        mean += worst;
    }
    Ok((max, mean / states.len() as f64))
}

/// For every code and attack: the largest trace distance between Eve's
/// states for two keys against `2 m sqrt(P[|C̃_I| >= d_{r,m}/2])`, and
/// Eve's expected difference (tests of size `n` at threshold 1/4) against
/// the bound with the test-passing event included.
pub fn key_distance_sweep(
    codes: &[CodePair],
    attacks: &[(String, AttackModel)],
    options: &VerifyOptions,
) -> Result<Vec<InstanceReport>> {
    let mut direct = Vec::new();
    let mut averaged = Vec::new();
    for code in codes {
        for (name, attack) in attacks {
            let label = format!("{} attack={name}", code_label(code));
            let (max_td, mean_td) = key_distances(&rho_hats(code, attack)?)?;
            let q = conjugate_error_prob(attack);
            let tail = binomial_tail(code.n() as u64, q, code.d_rm() as f64 / 2.0);
            direct.push(InstanceReport::new(
                "key_distance",
                label.clone(),
                max_td,
                options.rhs_scale * key_distance_bound(code.m(), tail),
            ));
            let params = ProtocolParams::new(code.n(), code.n(), 0.25, 0.25, code.clone())?;
            let pass = pass_probability(&params, attack);
            averaged.push(InstanceReport::new(
                "expected_difference",
                label,
                pass * mean_td,
                options.rhs_scale * key_distance_bound(code.m(), tail * pass),
            ));
        }
    }
    direct.extend(averaged);
    Ok(direct)
}

/// For each shape `(n, n_x, eps, p_ax)`, the worst pool against the
/// sampling bound `exp(-2 (n_x/(n+n_x))^2 n eps^2)`.
pub fn hoeffding_suite(max_pool: usize, options: &VerifyOptions) -> Result<Vec<InstanceReport>> {
    let mut out = Vec::new();
    for n in [2usize, 4, 6] {
        for n_x in 1..=max_pool.saturating_sub(n) {
            let size = n + n_x;
            for eps in [0.1, 0.2] {
                for p_ax in [0.0, 0.25] {
                    let mut worst = 0.0f64;
                    let mut worst_pool = 0u64;
                    for pool in 0..1u64 << size {
                        let p = hoeffding_exhaustive(&BitVector::from_u64(size, pool), n, n_x, p_ax, eps)?;
                        if p > worst {
                            worst = p;
                            worst_pool = pool;
                        }
                    }
                    let ratio = n_x as f64 / size as f64;
                    let bound = (-2.0 * ratio * ratio * n as f64 * eps * eps).exp();
                    out.push(InstanceReport::new(
                        "hoeffding",
                        format!(
                            "n={n} n_x={n_x} eps={eps} p_ax={p_ax} worst_pool={}",
                            BitVector::from_u64(size, worst_pool)
                        ),
                        worst,
                        options.rhs_scale * bound,
                    ));
                }
            }
        }
    }
    Ok(out)
}

/// Single-error correction of every codeword of the [7,4] Hamming code,
/// plus its minimum distance. A correction instance has `lhs` equal to the
/// Hamming distance between the decoded and the sent word, `rhs` zero.
pub fn decoder_suite() -> Result<Vec<InstanceReport>> {
    let code = CodePair::hamming74();
    let n = code.n();
    let mut out = Vec::new();
    for value in 0..1u64 << n {
        let c = BitVector::from_u64(n, value);
        if !code.syndrome(&c)?.is_zero() {
            continue;
        }
        let xi = code.syndrome(&c)?;
        for_each_combination(n, 1, |pos| {
            let mut received = c.clone();
            received.flip(pos[0]);
            let decoded = code.correct(&received, &xi).expect("lengths match");
            let miss = crate::gf2::hamming_distance(&decoded, &c).expect("lengths match");
            out.push(InstanceReport::new(
                "decoder",
                format!("codeword={c} flip={}", pos[0]),
                miss as f64,
                0.0,
            ));
        });
    }
    // 3 <= d and d <= 3 as two one-sided checks folded into |d - 3| <= 0.
    out.push(InstanceReport::new(
        "decoder",
        "hamming74 min_distance=3".into(),
        (code.min_distance() as f64 - 3.0).abs(),
        0.0,
    ));
    Ok(out)
}

/// Monte Carlo estimate of `P[|C̃_I| >= d_{r,m}/2 and tests pass]` for the
/// [7,4] Hamming code with `n_z = n_x = 7`, `p_ax = 0.05`, `eps = 0.1`,
/// against the sampling bound plus three Wilson sigmas. Here
/// `d_{r,m}/2n = 3/14` exceeds `p_ax + eps`.
pub fn joint_event_suite(attacks: &[(String, AttackModel)], options: &VerifyOptions) -> Result<Vec<InstanceReport>> {
    let (p_ax, eps) = (0.05, 0.1);
    let params = ProtocolParams::new(7, 7, 0.05, p_ax, CodePair::hamming74())?;
    let ratio = params.n_x as f64 / (params.n + params.n_x) as f64;
    let bound = (-2.0 * ratio * ratio * params.n as f64 * eps * eps).exp();
    let mut out = Vec::new();
    for (i, (name, attack)) in attacks.iter().enumerate() {
        let seed = options.seed.wrapping_add((i as u64) << 32);
        let e = monte_carlo_joint_event(&params, attack, options.trials, seed)?.estimate;
        out.push(InstanceReport::new(
            "joint_event",
            format!("attack={name} trials={} hits={}", e.trials, e.successes),
            e.frequency,
            options.rhs_scale * (bound + 3.0 * e.sigma()),
        ));
    }
    Ok(out)
}

/// Runs every suite with the standard parameters.
pub fn run_all(options: &VerifyOptions) -> Result<Vec<InstanceReport>> {
    let codes = enumerate_codes(&[1, 2, 3, 4], &[0, 1], &[1, 2], CODE_BUDGET)?;
    let attacks = rotation_family();
    let mut rows = key_distance_sweep(&codes, &attacks, options)?;
    rows.extend(hoeffding_suite(12, options)?);
    rows.extend(decoder_suite()?);
    rows.extend(joint_event_suite(&attacks, options)?);
    Ok(rows)
}

/// CSV with header `suite,instance,lhs,rhs,satisfied`.
pub fn report_csv(rows: &[InstanceReport]) -> String {
    let mut out = String::from("suite,instance,lhs,rhs,satisfied\n");
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{:.12e},{:.12e},{}",
            row.suite, row.instance, row.lhs, row.rhs, row.satisfied
        );
    }
    out
}

pub fn violations(rows: &[InstanceReport]) -> Vec<&InstanceReport> {
    rows.iter().filter(|r| !r.satisfied).collect()
}
