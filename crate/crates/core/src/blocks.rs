//! Balanced contiguous partitions of a sequence of weights in `[0, 1]`.
//!
//! A partition into `n` blocks is a choice of boundaries
//! `0 = x_0 <= x_1 <= ... <= x_n = m` into the prefix-sum array, so it is a
//! transversal of the sequence `{0}, P, ..., P, {a_m}` where `P` holds all
//! prefix sums. Consecutive prefix sums differ by at most one, which is what
//! lets the finite window solver guarantee a spread of at most one.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sets1d::{ClosedSet1D, TAU};
use crate::transversal1d::{solve_exact_finite_from, GridSequence1D};

/// Default bound on the number of boundary tuples the oracle may enumerate.
pub const DEFAULT_ORACLE_CAP: u128 = 10_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct BlockInstance {
    values: Vec<f64>,
    n: usize,
}

impl BlockInstance {
    pub fn new(values: Vec<f64>, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Validation("block count must be at least 1".into()));
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(Error::Validation(format!(
                "value s_{} = {v} is outside [0, 1]",
                i + 1
            )));
        }
        Ok(BlockInstance { values, n })
    }

    /// Divides every value by the largest one so that the instance fits in
    /// `[0, 1]`. Returns the instance and the factor that was divided out
    /// (1 when all values are zero).
    pub fn scaled(values: &[f64], n: usize) -> Result<(Self, f64)> {
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::Validation(format!(
                "value {v} must be finite and nonnegative"
            )));
        }
        let max = values.iter().copied().fold(0.0, f64::max);
        let scale = if max > 0.0 { max } else { 1.0 };
        let scaled = values.iter().map(|v| (v / scale).min(1.0)).collect();
        Ok((Self::new(scaled, n)?, scale))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.values.len()
    }
}

/// `(a_0, ..., a_m)` with `a_0 = 0` and `a_i = s_1 + ... + s_i`.
pub fn prefix_sums(values: &[f64]) -> Result<Vec<f64>> {
    if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::Validation(format!("value {v} is outside [0, 1]")));
    }
    Ok(prefix_unchecked(values))
}

fn prefix_unchecked(values: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len() + 1);
    let mut acc = 0.0;
    out.push(acc);
    for v in values {
        acc += v;
        out.push(acc);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockPartition {
    pub boundaries: Vec<usize>,
    pub sizes: Vec<f64>,
    pub spread: f64,
}

impl BlockPartition {
    /// Sizes and spread computed from the prefix array.
    pub fn from_boundaries(prefix: &[f64], boundaries: Vec<usize>) -> Self {
        let sizes: Vec<f64> = boundaries
            .windows(2)
            .map(|w| prefix[w[1]] - prefix[w[0]])
            .collect();
        let spread = crate::transversal1d::spread_of(&sizes);
        BlockPartition {
            boundaries,
            sizes,
            spread,
        }
    }

    /// The blocks as slices of the original sequence.
    pub fn blocks<'a, T>(&self, values: &'a [T]) -> Vec<&'a [T]> {
        self.boundaries
            .windows(2)
            .map(|w| &values[w[0]..w[1]])
            .collect()
    }
}

/// A partition into `n` contiguous blocks with spread at most one.
pub fn partition(inst: &BlockInstance) -> Result<BlockPartition> {
    let prefix = prefix_unchecked(&inst.values);
    let m = inst.m();
    let n = inst.n;
    let total = prefix[m];
    if n == 1 {
        return Ok(BlockPartition::from_boundaries(&prefix, vec![0, m]));
    }
    let pts = ClosedSet1D::points(prefix.iter().copied())?;
    let seq = GridSequence1D::from_interior(vec![pts; n - 1], total, false)?;
    // Block sizes are nonnegative, so the smallest one is a valid offset >= 0.
    let t = solve_exact_finite_from(&seq, 0.0)?;

    let mut boundaries = Vec::with_capacity(n + 1);
    boundaries.push(0usize);
    let mut prev = 0usize;
    for (j, &v) in t.points.iter().enumerate().take(n).skip(1) {
        let k = (prev..=m)
            .find(|&k| (prefix[k] - v).abs() <= TAU)
            .ok_or_else(|| Error::ExtractionFailure {
                index: j,
                detail: format!("value {v} has no prefix index at or after {prev}"),
            })?;
        boundaries.push(k);
        prev = k;
    }
    boundaries.push(m);
    Ok(BlockPartition::from_boundaries(&prefix, boundaries))
}

/// Number of monotone boundary tuples, `C(m + n - 1, n - 1)`, saturating.
pub fn tuple_count(m: usize, n: usize) -> u128 {
    let k = (n - 1) as u128;
    let top = (m + n - 1) as u128;
    let mut c: u128 = 1;
    for i in 0..k {
        c = match c.checked_mul(top - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    c
}

/// Exhaustive minimum spread over all partitions, with the lexicographically
/// smallest optimal boundary tuple as witness.
pub fn oracle_min_spread(inst: &BlockInstance, cap: u128) -> Result<(f64, BlockPartition)> {
    let m = inst.m();
    let n = inst.n;
    let needed = tuple_count(m, n);
    if needed > cap {
        return Err(Error::CapExceeded { needed, cap });
    }
    let prefix = prefix_unchecked(&inst.values);
    let mut cur = vec![0usize; n + 1];
    cur[n] = m;
    let mut best: Option<(f64, Vec<usize>)> = None;
    loop {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for w in cur.windows(2) {
            let b = prefix[w[1]] - prefix[w[0]];
            lo = lo.min(b);
            hi = hi.max(b);
        }
        let spread = hi - lo;
        if best.as_ref().is_none_or(|(s, _)| spread < *s) {
            best = Some((spread, cur.clone()));
        }
        // next nondecreasing tuple in positions 1..n-1
        let mut j = n - 1;
        while j >= 1 && cur[j] == m {
            j -= 1;
        }
        if j == 0 {
            break;
        }
        let v = cur[j] + 1;
        for slot in &mut cur[j..n] {
            *slot = v;
        }
    }
    let (spread, b) = best.expect("at least one tuple");
    Ok((spread, BlockPartition::from_boundaries(&prefix, b)))
}
