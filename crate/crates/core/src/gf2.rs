//! Linear algebra over F_2.
//!
//! Bit strings are packed into `u64` words, bit `i` of the string living in
//! word `i / 64` at position `i % 64`. The textual form writes index 0 first,
//! so `"1011"` has bits 0, 2 and 3 set.
//!
//! Span and code distances are computed by exhaustive enumeration. Every
//! enumeration is guarded by [`ENUMERATION_LIMIT_LOG2`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest span or kernel dimension we are willing to enumerate.
pub const ENUMERATION_LIMIT_LOG2: usize = 20;

const WORD: usize = 64;

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

fn check_enumeration(what: &'static str, dim: usize) -> Result<()> {
    if dim > ENUMERATION_LIMIT_LOG2 {
        return Err(Error::GuardExceeded {
            what,
            size: 1u128 << dim.min(127),
            limit: 1u128 << ENUMERATION_LIMIT_LOG2,
        });
    }
    Ok(())
}

/// An element of F_2^len.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self::zeros(len);
        for i in 0..len {
            v.set(i, true);
        }
        v
    }

    /// Unit vector with a single one at `index`.
    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(index, true);
        v
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let bits: Vec<bool> = bits.into_iter().collect();
        let mut v = Self::zeros(bits.len());
        for (i, b) in bits.into_iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    /// Builds a vector from the low `len` bits of `value`, bit `i` of the
    /// integer becoming entry `i`.
    pub fn from_u64(len: usize, value: u64) -> Self {
        assert!(len <= WORD, "from_u64 supports at most 64 bits");
        let mut v = Self::zeros(len);
        if len > 0 {
            let mask = if len == WORD { u64::MAX } else { (1u64 << len) - 1 };
            v.words[0] = value & mask;
        }
        v
    }

    /// Inverse of [`BitVector::from_u64`]; only valid for `len <= 64`.
    pub fn to_u64(&self) -> u64 {
        assert!(self.len <= WORD, "to_u64 supports at most 64 bits");
        self.words.first().copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, index: usize) -> bool {
        assert!(index < self.len, "bit index {index} out of range {}", self.len);
        (self.words[index / WORD] >> (index % WORD)) & 1 == 1
    }

    pub fn set(&mut self, index: usize, value: bool) {
        assert!(index < self.len, "bit index {index} out of range {}", self.len);
        let mask = 1u64 << (index % WORD);
        if value {
            self.words[index / WORD] |= mask;
        } else {
            self.words[index / WORD] &= !mask;
        }
    }

    pub fn flip(&mut self, index: usize) {
        assert!(index < self.len, "bit index {index} out of range {}", self.len);
        self.words[index / WORD] ^= 1u64 << (index % WORD);
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Indices of the one entries, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len).filter(|&i| self.get(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Hamming weight `|v|`.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Inner product mod 2.
    pub fn dot(&self, other: &BitVector) -> Result<bool> {
        self.check_len(other)?;
        Ok(self.dot_unchecked(other))
    }

    pub(crate) fn dot_unchecked(&self, other: &BitVector) -> bool {
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones % 2 == 1
    }

    pub fn xor(&self, other: &BitVector) -> Result<BitVector> {
        self.check_len(other)?;
        let mut out = self.clone();
        out.xor_assign_unchecked(other);
        Ok(out)
    }

    pub(crate) fn xor_assign_unchecked(&mut self, other: &BitVector) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// The entries of `self` at the one positions of `mask`, in index order.
    pub fn restrict(&self, mask: &BitVector) -> Result<BitVector> {
        self.check_len(mask)?;
        Ok(BitVector::from_bits(
            (0..self.len).filter(|&i| mask.get(i)).map(|i| self.get(i)),
        ))
    }

    /// Lexicographic order on the textual form (index 0 most significant).
    pub fn lex_cmp(&self, other: &BitVector) -> Ordering {
        for (a, b) in self.words.iter().zip(&other.words) {
            let diff = a ^ b;
            if diff != 0 {
                let first = diff.trailing_zeros();
                return if (a >> first) & 1 == 0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                };
            }
        }
        self.len.cmp(&other.len)
    }

    fn check_len(&self, other: &BitVector) -> Result<()> {
        if self.len != other.len {
            return Err(Error::DimensionMismatch {
                expected: self.len,
                found: other.len,
            });
        }
        Ok(())
    }
}

/// Hamming distance `|u + v|`.
pub fn hamming_distance(u: &BitVector, v: &BitVector) -> Result<usize> {
    u.check_len(v)?;
    Ok(u.words
        .iter()
        .zip(&v.words)
        .map(|(a, b)| (a ^ b).count_ones() as usize)
        .sum())
}

/// Hamming weight `|v|`.
pub fn weight(v: &BitVector) -> usize {
    v.weight()
}

impl Add for &BitVector {
    type Output = BitVector;

    /// Componentwise XOR. Panics on length mismatch; use [`BitVector::xor`]
    /// for a fallible version.
    fn add(self, rhs: &BitVector) -> BitVector {
        self.xor(rhs).expect("bit vector lengths differ")
    }
}

impl AddAssign<&BitVector> for BitVector {
    fn add_assign(&mut self, rhs: &BitVector) {
        assert_eq!(self.len, rhs.len, "bit vector lengths differ");
        self.xor_assign_unchecked(rhs);
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl FromStr for BitVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("unexpected character {other:?} in bit string"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitVector::from_bits)
    }
}

impl Serialize for BitVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A rectangular matrix over F_2 stored by rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    ncols: usize,
    rows: Vec<BitVector>,
}

impl BitMatrix {
    pub fn new(ncols: usize, rows: Vec<BitVector>) -> Result<Self> {
        for row in &rows {
            if row.len() != ncols {
                return Err(Error::DimensionMismatch {
                    expected: ncols,
                    found: row.len(),
                });
            }
        }
        Ok(BitMatrix { ncols, rows })
    }

    pub fn empty(ncols: usize) -> Self {
        BitMatrix {
            ncols,
            rows: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        BitMatrix {
            ncols: n,
            rows: (0..n).map(|i| BitVector::unit(n, i)).collect(),
        }
    }

    /// Parses rows given as `'0'/'1'` strings; all rows must share a length.
    pub fn from_strs(ncols: usize, rows: &[&str]) -> Result<Self> {
        let rows = rows.iter().map(|r| r.parse()).collect::<Result<Vec<BitVector>>>()?;
        Self::new(ncols, rows)
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i]
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn stack(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.ncols != other.ncols {
            return Err(Error::DimensionMismatch {
                expected: self.ncols,
                found: other.ncols,
            });
        }
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(BitMatrix {
            ncols: self.ncols,
            rows,
        })
    }

    /// The first `count` rows.
    pub fn prefix(&self, count: usize) -> BitMatrix {
        BitMatrix {
            ncols: self.ncols,
            rows: self.rows[..count].to_vec(),
        }
    }

    /// All rows except the one at `skip`.
    pub fn without_row(&self, skip: usize) -> BitMatrix {
        BitMatrix {
            ncols: self.ncols,
            rows: self
                .rows
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, r)| r.clone())
                .collect(),
        }
    }

    /// Rank over F_2.
    pub fn rank(&self) -> usize {
        let mut reduced: Vec<BitVector> = Vec::with_capacity(self.rows.len());
        let mut pivots: Vec<usize> = Vec::new();
        for row in &self.rows {
            let mut v = row.clone();
            for (r, &p) in reduced.iter().zip(&pivots) {
                if v.get(p) {
                    v.xor_assign_unchecked(r);
                }
            }
            if let Some(p) = (0..self.ncols).find(|&i| v.get(i)) {
                reduced.push(v);
                pivots.push(p);
            }
        }
        reduced.len()
    }

    /// Visits every element of the row span, starting with the zero vector.
    /// Uses a Gray-code walk so each step costs one XOR.
    pub fn for_each_span_element<F: FnMut(&BitVector)>(&self, mut visit: F) -> Result<()> {
        let k = self.rows.len();
        check_enumeration("span enumeration", k)?;
        let mut current = BitVector::zeros(self.ncols);
        visit(&current);
        for step in 1u64..(1u64 << k) {
            let flip = step.trailing_zeros() as usize;
            current.xor_assign_unchecked(&self.rows[flip]);
            visit(&current);
        }
        Ok(())
    }

    /// Reduced row echelon form: returns the reduced nonzero rows and their
    /// pivot columns.
    fn rref(&self) -> (Vec<BitVector>, Vec<usize>) {
        let mut rows: Vec<BitVector> = self.rows.clone();
        let mut pivots = Vec::new();
        let mut next = 0;
        for col in 0..self.ncols {
            let Some(found) = (next..rows.len()).find(|&i| rows[i].get(col)) else {
                continue;
            };
            rows.swap(next, found);
            let pivot_row = rows[next].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != next && row.get(col) {
                    row.xor_assign_unchecked(&pivot_row);
                }
            }
            pivots.push(col);
            next += 1;
            if next == rows.len() {
                break;
            }
        }
        rows.truncate(next);
        (rows, pivots)
    }

    /// A basis of `{x : x M^T = 0}`.
    pub fn kernel_basis(&self) -> BitMatrix {
        let (reduced, pivots) = self.rref();
        let mut basis = Vec::new();
        for free in (0..self.ncols).filter(|c| !pivots.contains(c)) {
            let mut v = BitVector::unit(self.ncols, free);
            for (row, &p) in reduced.iter().zip(&pivots) {
                if row.get(free) {
                    v.set(p, true);
                }
            }
            basis.push(v);
        }
        BitMatrix {
            ncols: self.ncols,
            rows: basis,
        }
    }

    /// Text form: header `n=<len> rows=<count>` then one `'0'/'1'` row per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("n={} rows={}\n", self.ncols, self.rows.len());
        self.write_rows(&mut out);
        out
    }

    pub(crate) fn write_rows(&self, out: &mut String) {
        for row in &self.rows {
            out.push_str(&row.to_string());
            out.push('\n');
        }
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("missing matrix header".into()))?;
        let fields = parse_header(header, &["n", "rows"])?;
        let (ncols, count) = (fields[0], fields[1]);
        let rows = lines.map(str::parse).collect::<Result<Vec<BitVector>>>()?;
        if rows.len() != count {
            return Err(Error::Parse(format!(
                "header announces {count} rows, found {}",
                rows.len()
            )));
        }
        Self::new(ncols, rows)
    }
}

/// Parses `k1=v1 k2=v2 ...` with exactly the given keys in order.
pub(crate) fn parse_header(line: &str, keys: &[&str]) -> Result<Vec<usize>> {
    let parts: Vec<&str> = line.split_whitespace().collect();
    if parts.len() != keys.len() {
        return Err(Error::Parse(format!("malformed header {line:?}")));
    }
    parts
        .iter()
        .zip(keys)
        .map(|(part, key)| {
            let value = part
                .strip_prefix(key)
                .and_then(|rest| rest.strip_prefix('='))
                .ok_or_else(|| Error::Parse(format!("expected {key}=<value> in header {line:?}")))?;
            value
                .parse()
                .map_err(|_| Error::Parse(format!("bad value for {key} in header {line:?}")))
        })
        .collect()
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows.iter().map(|r| r.to_string())).finish()
    }
}

/// `x M^T`: entry `j` is the inner product of `x` with row `j` of `m`.
pub fn mul_transpose(x: &BitVector, m: &BitMatrix) -> Result<BitVector> {
    if x.len() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.ncols(),
            found: x.len(),
        });
    }
    Ok(BitVector::from_bits(m.rows().iter().map(|row| x.dot_unchecked(row))))
}

pub fn is_linearly_independent(rows: &BitMatrix) -> bool {
    rows.rank() == rows.nrows()
}

/// Minimum Hamming distance from `v` to the span of `basis` (the span of an
/// empty basis is `{0}`).
pub fn span_min_distance(v: &BitVector, basis: &BitMatrix) -> Result<usize> {
    if v.len() != basis.ncols() {
        return Err(Error::DimensionMismatch {
            expected: basis.ncols(),
            found: v.len(),
        });
    }
    let mut best = usize::MAX;
    basis.for_each_span_element(|w| {
        if best > 0 {
            best = best.min(hamming_distance(v, w).expect("lengths checked"));
        }
    })?;
    Ok(best)
}

fn check_code_rows(vectors: &BitMatrix, r: usize, m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidParams("m must be at least 1".into()));
    }
    if vectors.nrows() != r + m {
        return Err(Error::DimensionMismatch {
            expected: r + m,
            found: vectors.nrows(),
        });
    }
    if !is_linearly_independent(vectors) {
        return Err(Error::DependentRows);
    }
    Ok(())
}

/// `d_{r,m}`: the smallest distance from a privacy-amplification row
/// `v_{r'+1}` to the span of all rows before it, over `r <= r' < r+m`.
pub fn compute_d_rm(vectors: &BitMatrix, r: usize, m: usize) -> Result<usize> {
    check_code_rows(vectors, r, m)?;
    (r..r + m)
        .map(|rp| span_min_distance(vectors.row(rp), &vectors.prefix(rp)))
        .try_fold(usize::MAX, |acc, d| d.map(|d| acc.min(d)))
}

/// `d_j`: distance from `v_{r+j}` to the span of every other row (`j` is
/// 1-based).
pub fn compute_d_j(vectors: &BitMatrix, r: usize, m: usize, j: usize) -> Result<usize> {
    check_code_rows(vectors, r, m)?;
    if j == 0 || j > m {
        return Err(Error::InvalidParams(format!("j = {j} outside 1..={m}")));
    }
    let idx = r + j - 1;
    span_min_distance(vectors.row(idx), &vectors.without_row(idx))
}

/// Minimum weight of a nonzero codeword of the code with the given parity
/// check rows.
pub fn min_code_distance(parity_rows: &BitMatrix) -> Result<usize> {
    let kernel = parity_rows.kernel_basis();
    if kernel.nrows() == 0 {
        return Err(Error::EmptyKernel);
    }
    check_enumeration("kernel enumeration", kernel.nrows())?;
    let mut best = usize::MAX;
    kernel.for_each_span_element(|c| {
        let w = c.weight();
        if w > 0 {
            best = best.min(w);
        }
    })?;
    Ok(best)
}
