//! Error correction and privacy amplification.
//!
//! A [`CodePair`] holds the parity-check rows `v_1..v_r` (the matrix `P_C`)
//! and the key rows `v_{r+1}..v_{r+m}` (the matrix `P_K`). Decoding is exact
//! coset-leader decoding through a syndrome table built at construction.

use std::cmp::Ordering;

use rand::Rng;

use crate::error::{Error, Result};
use crate::gf2::{self, BitMatrix, BitVector, ENUMERATION_LIMIT_LOG2};

/// Upper bound on error patterns visited while filling the syndrome table.
const LEADER_SEARCH_LIMIT: u128 = 1 << 24;

#[derive(Clone, Debug, PartialEq)]
pub struct CodePair {
    pc_rows: BitMatrix,
    pk_rows: BitMatrix,
    d_rm: usize,
    min_distance: usize,
    t_corr: usize,
    /// Coset leader for each syndrome, indexed by the syndrome read as an
    /// integer (entry `j` of the syndrome is bit `j`).
    leaders: Vec<BitVector>,
}

/// Builds and validates a code pair.
pub fn make_code_pair(pc_rows: BitMatrix, pk_rows: BitMatrix) -> Result<CodePair> {
    CodePair::new(pc_rows, pk_rows)
}

impl CodePair {
    pub fn new(pc_rows: BitMatrix, pk_rows: BitMatrix) -> Result<Self> {
        let n = pc_rows.ncols();
        if pk_rows.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: pk_rows.ncols(),
            });
        }
        if n == 0 {
            return Err(Error::InvalidParams("block length must be positive".into()));
        }
        let (r, m) = (pc_rows.nrows(), pk_rows.nrows());
        if r > ENUMERATION_LIMIT_LOG2 {
            return Err(Error::GuardExceeded {
                what: "syndrome table",
                size: 1u128 << r,
                limit: 1u128 << ENUMERATION_LIMIT_LOG2,
            });
        }
        let all = pc_rows.stack(&pk_rows)?;
        if !gf2::is_linearly_independent(&all) {
            return Err(Error::DependentRows);
        }
        let d_rm = gf2::compute_d_rm(&all, r, m)?;
        let min_distance = gf2::min_code_distance(&pc_rows)?;
        let leaders = coset_leaders(&pc_rows)?;
        Ok(CodePair {
            pc_rows,
            pk_rows,
            d_rm,
            min_distance,
            t_corr: (min_distance - 1) / 2,
            leaders,
        })
    }

    pub fn n(&self) -> usize {
        self.pc_rows.ncols()
    }

    pub fn r(&self) -> usize {
        self.pc_rows.nrows()
    }

    pub fn m(&self) -> usize {
        self.pk_rows.nrows()
    }

    pub fn pc_rows(&self) -> &BitMatrix {
        &self.pc_rows
    }

    pub fn pk_rows(&self) -> &BitMatrix {
        &self.pk_rows
    }

    /// `d_{r,m}` of the concatenated rows.
    pub fn d_rm(&self) -> usize {
        self.d_rm
    }

    /// Minimum distance of the code `C = ker P_C`.
    pub fn min_distance(&self) -> usize {
        self.min_distance
    }

    /// Number of errors the code is guaranteed to correct.
    pub fn t_corr(&self) -> usize {
        self.t_corr
    }

    /// All `r + m` rows, parity checks first.
    pub fn all_rows(&self) -> BitMatrix {
        self.pc_rows.stack(&self.pk_rows).expect("widths validated")
    }

    /// `ξ = x P_C^T`.
    pub fn syndrome(&self, x: &BitVector) -> Result<BitVector> {
        gf2::mul_transpose(x, &self.pc_rows)
    }

    /// `k = x P_K^T`.
    pub fn final_key(&self, x: &BitVector) -> Result<BitVector> {
        gf2::mul_transpose(x, &self.pk_rows)
    }

    /// Bob's estimate of Alice's string: `x_b` plus the coset leader of the
    /// syndrome difference.
    pub fn correct(&self, x_b: &BitVector, xi: &BitVector) -> Result<BitVector> {
        if xi.len() != self.r() {
            return Err(Error::DimensionMismatch {
                expected: self.r(),
                found: xi.len(),
            });
        }
        let mut diff = self.syndrome(x_b)?;
        diff += xi;
        let leader = &self.leaders[syndrome_index(&diff)];
        Ok(x_b + leader)
    }

    /// The coset leader for a syndrome.
    pub fn coset_leader(&self, syndrome: &BitVector) -> Result<&BitVector> {
        if syndrome.len() != self.r() {
            return Err(Error::DimensionMismatch {
                expected: self.r(),
                found: syndrome.len(),
            });
        }
        Ok(&self.leaders[syndrome_index(syndrome)])
    }

    /// Text form: header `n=<n> r=<r> m=<m>`, then the parity-check rows,
    /// then the key rows.
    pub fn to_text(&self) -> String {
        let mut out = format!("n={} r={} m={}\n", self.n(), self.r(), self.m());
        self.pc_rows.write_rows(&mut out);
        self.pk_rows.write_rows(&mut out);
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("missing code header".into()))?;
        let fields = gf2::parse_header(header, &["n", "r", "m"])?;
        let (n, r, m) = (fields[0], fields[1], fields[2]);
        let rows = lines.map(str::parse).collect::<Result<Vec<BitVector>>>()?;
        if rows.len() != r + m {
            return Err(Error::Parse(format!(
                "header announces {} rows, found {}",
                r + m,
                rows.len()
            )));
        }
        let pc = BitMatrix::new(n, rows[..r].to_vec())?;
        let pk = BitMatrix::new(n, rows[r..].to_vec())?;
        Self::new(pc, pk)
    }

    /// The [7,4] Hamming code with the all-ones key row: `d_{3,1} = 3`,
    /// `t_corr = 1`.
    pub fn hamming74() -> Self {
        let pc = BitMatrix::from_strs(7, &["1010101", "0110011", "0001111"]).expect("valid rows");
        let pk = BitMatrix::new(7, vec![BitVector::ones(7)]).expect("valid row");
        Self::new(pc, pk).expect("hamming code pair is valid")
    }

    /// No error correction, a single parity key bit over all `n` positions.
    pub fn parity_key(n: usize) -> Result<Self> {
        Self::new(BitMatrix::empty(n), BitMatrix::new(n, vec![BitVector::ones(n)])?)
    }
}

pub fn syndrome(code: &CodePair, x: &BitVector) -> Result<BitVector> {
    code.syndrome(x)
}

pub fn final_key(code: &CodePair, x: &BitVector) -> Result<BitVector> {
    code.final_key(x)
}

pub fn correct(code: &CodePair, x_b: &BitVector, xi: &BitVector) -> Result<BitVector> {
    code.correct(x_b, xi)
}

fn syndrome_index(s: &BitVector) -> usize {
    s.to_u64() as usize
}

/// Minimum-weight representative of every syndrome class, ties broken by the
/// lexicographically smallest pattern.
fn coset_leaders(pc_rows: &BitMatrix) -> Result<Vec<BitVector>> {
    let n = pc_rows.ncols();
    let classes = 1usize << pc_rows.nrows();
    // (weight, pattern); weights are visited in increasing order so an entry
    // only ever competes with patterns of its own weight.
    let mut table: Vec<Option<(usize, BitVector)>> = vec![None; classes];
    let mut filled = 0;
    let mut visited: u128 = 0;
    for w in 0..=n {
        visited += binomial(n, w);
        if visited > LEADER_SEARCH_LIMIT {
            return Err(Error::GuardExceeded {
                what: "coset leader search",
                size: visited,
                limit: LEADER_SEARCH_LIMIT,
            });
        }
        for_each_combination(n, w, |support| {
            let mut e = BitVector::zeros(n);
            for &i in support {
                e.set(i, true);
            }
            let idx = syndrome_index(&gf2::mul_transpose(&e, pc_rows).expect("width checked"));
            match &mut table[idx] {
                None => {
                    table[idx] = Some((w, e));
                    filled += 1;
                }
                Some((weight, best)) => {
                    if *weight == w && e.lex_cmp(best) == Ordering::Less {
                        *best = e;
                    }
                }
            }
        });
        if filled == classes {
            break;
        }
    }
    table
        .into_iter()
        .map(|e| e.map(|(_, v)| v).ok_or(Error::DependentRows))
        .collect()
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Visits every `k`-subset of `0..n` as an ascending index list.
pub(crate) fn for_each_combination<F: FnMut(&[usize])>(n: usize, k: usize, mut visit: F) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        visit(&idx);
        let Some(pos) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return;
        };
        idx[pos] += 1;
        for j in pos + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Samples random independent row sets until one meets `d_{r,m}/n > delta`
/// and corrects at least `t_target` errors. Returns `Ok(None)` when no
/// candidate qualifies within `max_iters`.
pub fn search_code_pair<R: Rng + ?Sized>(
    n: usize,
    r: usize,
    m: usize,
    delta: f64,
    t_target: usize,
    rng: &mut R,
    max_iters: usize,
) -> Result<Option<CodePair>> {
    if n == 0 || m == 0 || r + m > n {
        return Err(Error::InvalidParams(format!(
            "need n >= r + m and m >= 1 (n={n}, r={r}, m={m})"
        )));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidParams(format!("delta = {delta} outside (0, 1]")));
    }
    if n - r > ENUMERATION_LIMIT_LOG2 || r > ENUMERATION_LIMIT_LOG2 {
        return Err(Error::GuardExceeded {
            what: "code search",
            size: 1u128 << (n - r).max(r),
            limit: 1u128 << ENUMERATION_LIMIT_LOG2,
        });
    }
    // d_rm <= n and the code distance is at most n.
    if 2 * t_target + 1 > n || delta >= 1.0 {
        return Ok(None);
    }
    for _ in 0..max_iters {
        let rows: Vec<BitVector> = (0..r + m)
            .map(|_| BitVector::from_bits((0..n).map(|_| rng.random::<bool>())))
            .collect();
        let all = BitMatrix::new(n, rows)?;
        if !gf2::is_linearly_independent(&all) {
            continue;
        }
        let pc = all.prefix(r);
        let pk = BitMatrix::new(n, all.rows()[r..].to_vec())?;
        let code = CodePair::new(pc, pk)?;
        if code.d_rm() as f64 / n as f64 > delta && code.t_corr() >= t_target {
            return Ok(Some(code));
        }
    }
    Ok(None)
}
