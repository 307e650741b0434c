//! Closed subsets of the real line.
//!
//! A [`ClosedSet1D`] is a finite union of closed intervals (possibly
//! unbounded), single points and arithmetic lattices. That is enough to
//! describe prefix-sum sets, integer grids and the usual test fixtures, and
//! it keeps the order queries used by window propagation cheap: every query
//! is a scan over the parts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for point membership and order queries.
pub const TAU: f64 = 1e-12;

/// Largest common-period multiplier tried when deciding density of a union of lattices.
const MAX_PERIOD_MULTIPLIER: u64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Part {
    Interval {
        #[serde(with = "crate::extf64")]
        lo: f64,
        #[serde(with = "crate::extf64")]
        hi: f64,
    },
    Point {
        at: f64,
    },
    /// `{offset + k * period : k in Z}`
    Lattice {
        offset: f64,
        period: f64,
    },
}

impl Part {
    fn validate(&self) -> Result<()> {
        match *self {
            Part::Interval { lo, hi } => {
                if lo.is_nan()
                    || hi.is_nan()
                    || lo > hi
                    || lo == f64::INFINITY
                    || hi == f64::NEG_INFINITY
                {
                    return Err(Error::Validation(format!("bad interval [{lo}, {hi}]")));
                }
            }
            Part::Point { at } => {
                if !at.is_finite() {
                    return Err(Error::Validation(format!("point must be finite, got {at}")));
                }
            }
            Part::Lattice { offset, period } => {
                if !offset.is_finite() || !period.is_finite() || period <= 0.0 {
                    return Err(Error::Validation(format!(
                        "bad lattice offset {offset} period {period}"
                    )));
                }
            }
        }
        Ok(())
    }

    fn contains(&self, x: f64) -> bool {
        match *self {
            Part::Interval { lo, hi } => lo - TAU <= x && x <= hi + TAU,
            Part::Point { at } => (x - at).abs() <= TAU,
            Part::Lattice { offset, period } => {
                let r = (x - offset) / period;
                (r - r.round()).abs() * period <= TAU
            }
        }
    }

    fn successor(&self, x: f64) -> Option<f64> {
        match *self {
            Part::Interval { lo, hi } => (hi >= x - TAU).then(|| x.clamp(lo, hi)),
            Part::Point { at } => (at >= x - TAU).then_some(at),
            Part::Lattice { offset, period } => {
                let k = ((x - offset) / period).ceil();
                let mut c = offset + k * period;
                if c - period >= x - TAU {
                    c -= period;
                } else if c < x - TAU {
                    c += period;
                }
                Some(c)
            }
        }
    }

    fn predecessor(&self, x: f64) -> Option<f64> {
        match *self {
            Part::Interval { lo, hi } => (lo <= x + TAU).then(|| x.clamp(lo, hi)),
            Part::Point { at } => (at <= x + TAU).then_some(at),
            Part::Lattice { offset, period } => {
                let k = ((x - offset) / period).floor();
                let mut c = offset + k * period;
                if c + period <= x + TAU {
                    c += period;
                } else if c > x + TAU {
                    c -= period;
                }
                Some(c)
            }
        }
    }

    fn shifted(&self, c: f64) -> Part {
        match *self {
            Part::Interval { lo, hi } => Part::Interval {
                lo: lo + c,
                hi: hi + c,
            },
            Part::Point { at } => Part::Point { at: at + c },
            Part::Lattice { offset, period } => Part::Lattice {
                offset: offset + c,
                period,
            },
        }
    }
}

/// A closed set on the line, stored as the union of its parts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSet")]
pub struct ClosedSet1D {
    parts: Vec<Part>,
}

#[derive(Deserialize)]
struct RawSet {
    parts: Vec<Part>,
}

impl TryFrom<RawSet> for ClosedSet1D {
    type Error = Error;

    fn try_from(raw: RawSet) -> Result<Self> {
        ClosedSet1D::new(raw.parts)
    }
}

impl ClosedSet1D {
    pub fn new(parts: Vec<Part>) -> Result<Self> {
        for p in &parts {
            p.validate()?;
        }
        Ok(ClosedSet1D { parts })
    }

    pub fn empty() -> Self {
        ClosedSet1D { parts: Vec::new() }
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![Part::Interval { lo, hi }])
    }

    pub fn real_line() -> Self {
        ClosedSet1D {
            parts: vec![Part::Interval {
                lo: f64::NEG_INFINITY,
                hi: f64::INFINITY,
            }],
        }
    }

    pub fn point(at: f64) -> Result<Self> {
        Self::new(vec![Part::Point { at }])
    }

    pub fn points<I: IntoIterator<Item = f64>>(pts: I) -> Result<Self> {
        Self::new(pts.into_iter().map(|at| Part::Point { at }).collect())
    }

    pub fn lattice(offset: f64, period: f64) -> Result<Self> {
        Self::new(vec![Part::Lattice { offset, period }])
    }

    /// The integers.
    pub fn integers() -> Self {
        ClosedSet1D {
            parts: vec![Part::Lattice {
                offset: 0.0,
                period: 1.0,
            }],
        }
    }

    pub fn union(mut self, other: ClosedSet1D) -> Self {
        self.parts.extend(other.parts);
        self
    }

    pub fn parts(&self) -> &[Part] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.parts.iter().any(|p| p.contains(x))
    }

    /// Smallest element `>= x` (up to [`TAU`]).
    pub fn successor(&self, x: f64) -> Result<f64> {
        self.parts
            .iter()
            .filter_map(|p| p.successor(x))
            .reduce(f64::min)
            .ok_or(Error::NoElementAbove(x))
    }

    /// Largest element `<= x` (up to [`TAU`]).
    pub fn predecessor(&self, x: f64) -> Result<f64> {
        self.parts
            .iter()
            .filter_map(|p| p.predecessor(x))
            .reduce(f64::max)
            .ok_or(Error::NoElementBelow(x))
    }

    pub fn shift(&self, c: f64) -> ClosedSet1D {
        ClosedSet1D {
            parts: self.parts.iter().map(|p| p.shifted(c)).collect(),
        }
    }

    /// If the set is a finite union of points (degenerate intervals included),
    /// return them sorted and deduplicated.
    pub fn finite_points(&self) -> Option<Vec<f64>> {
        let mut pts = Vec::with_capacity(self.parts.len());
        for p in &self.parts {
            match *p {
                Part::Point { at } => pts.push(at),
                Part::Interval { lo, hi } if lo == hi => pts.push(lo),
                _ => return None,
            }
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        Some(pts)
    }

    /// Is this exactly the singleton `{v}`?
    pub fn is_singleton(&self, v: f64) -> bool {
        !self.parts.is_empty()
            && self.parts.iter().all(|p| match *p {
                Part::Point { at } => (at - v).abs() <= TAU,
                Part::Interval { lo, hi } => (lo - v).abs() <= TAU && (hi - v).abs() <= TAU,
                Part::Lattice { .. } => false,
            })
    }

    /// Does every closed interval of length one meet the set?
    ///
    /// Decided by sweeping the sorted parts over a window that contains every
    /// finite endpoint plus two common lattice periods on each side; outside
    /// that window the set is either covered by an unbounded interval or
    /// repeats with the common period. Unions of lattices whose periods have
    /// no common multiple (up to `10^4` times the first period) are reported
    /// as not dense.
    pub fn is_unit_dense(&self) -> bool {
        if self.parts.is_empty() {
            return false;
        }
        let mut periods = Vec::new();
        let (mut below, mut above) = (false, false);
        let (mut fmin, mut fmax) = (0.0f64, 0.0f64);
        for p in &self.parts {
            match *p {
                Part::Interval { lo, hi } => {
                    below |= lo == f64::NEG_INFINITY;
                    above |= hi == f64::INFINITY;
                    for v in [lo, hi] {
                        if v.is_finite() {
                            fmin = fmin.min(v);
                            fmax = fmax.max(v);
                        }
                    }
                }
                Part::Point { at } => {
                    fmin = fmin.min(at);
                    fmax = fmax.max(at);
                }
                Part::Lattice { period, .. } => {
                    if period <= 1.0 + TAU {
                        return true;
                    }
                    below = true;
                    above = true;
                    periods.push(period);
                }
            }
        }
        if !(below && above) {
            return false;
        }
        let common = if periods.is_empty() {
            0.0
        } else {
            match common_period(&periods) {
                Some(p) => p,
                None => return false,
            }
        };
        let (wlo, whi) = (fmin - 2.0 * common - 2.0, fmax + 2.0 * common + 2.0);

        let mut segs: Vec<(f64, f64)> = Vec::new();
        for p in &self.parts {
            match *p {
                Part::Interval { lo, hi } => {
                    if hi >= wlo && lo <= whi {
                        segs.push((lo.max(wlo), hi.min(whi)));
                    }
                }
                Part::Point { at } => segs.push((at, at)),
                Part::Lattice { offset, period } => {
                    let k0 = ((wlo - offset) / period).ceil() as i64;
                    let k1 = ((whi - offset) / period).floor() as i64;
                    for k in k0..=k1 {
                        let v = offset + k as f64 * period;
                        segs.push((v, v));
                    }
                }
            }
        }
        segs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut reach = match segs.first() {
            Some(s) => s.1,
            None => return false,
        };
        for &(lo, hi) in &segs[1..] {
            if lo - reach > 1.0 + TAU {
                return false;
            }
            reach = reach.max(hi);
        }
        true
    }
}

/// A common period of lattices with the given periods, if one exists with a
/// small multiplier.
fn common_period(periods: &[f64]) -> Option<f64> {
    let base = periods[0];
    let mut k: u64 = 1;
    for &p in &periods[1..] {
        let ratio = p / base;
        let (num, _den) = rational_approx(ratio, 1000)?;
        k = lcm(k, num);
        if k > MAX_PERIOD_MULTIPLIER {
            return None;
        }
    }
    Some(base * k as f64)
}

/// `r ~= num / den` with `den <= max_den`, reduced.
fn rational_approx(r: f64, max_den: u64) -> Option<(u64, u64)> {
    for den in 1..=max_den {
        let num = (r * den as f64).round();
        if num >= 1.0 && (r * den as f64 - num).abs() <= 1e-9 * num {
            let num = num as u64;
            let g = gcd(num, den);
            return Some((num / g, den / g));
        }
    }
    None
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}
