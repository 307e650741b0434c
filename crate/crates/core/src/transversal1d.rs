//! Window propagation and transversal search on the line.
//!
//! For an offset `x`, the window `J_i(x) = [L_i(x), R_i(x)]` holds every
//! position reachable at step `i` by a partial transversal whose steps all
//! lie in `[x, x + 1]`:
//!
//! ```text
//! L_1 = x,  R_1 = x + 1
//! L_{i+1} = x     + successor(A_i, L_i)
//! R_{i+1} = x + 1 + predecessor(A_i, R_i)
//! ```
//!
//! Both ends are nondecreasing in `x`, so the offsets whose last window
//! contains the target form an interval that bisection can find. The
//! relaxed form with two offsets `x_lo <= x_hi` (steps in `[x_lo, x_hi + 1]`)
//! turns a bisection bracket into a transversal with spread at most
//! `1 + (x_hi - x_lo)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sets1d::{ClosedSet1D, TAU};

/// Default bisection width.
pub const DEFAULT_EPS: f64 = 1e-9;

/// Hard limit on bracket growth.
const BRACKET_LIMIT: f64 = (1u64 << 60) as f64;

/// Slack allowed when checking a backtracked point against its window.
const EXTRACT_SLACK: f64 = 1e-9;

/// Width below which the finite solver stops bisecting and switches to
/// enumerating candidate breakpoints.
const FINITE_BRACKET: f64 = 1e-7;

/// `A_0, ..., A_n` with `A_0 = {0}` and `A_n = {s}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSequence")]
pub struct GridSequence1D {
    sets: Vec<ClosedSet1D>,
    #[serde(rename = "s")]
    target: f64,
    dense: bool,
}

#[derive(Deserialize)]
struct RawSequence {
    sets: Vec<ClosedSet1D>,
    s: f64,
    #[serde(default = "default_dense")]
    dense: bool,
}

fn default_dense() -> bool {
    true
}

impl TryFrom<RawSequence> for GridSequence1D {
    type Error = Error;

    fn try_from(raw: RawSequence) -> Result<Self> {
        GridSequence1D::new(raw.sets, raw.s, raw.dense)
    }
}

impl GridSequence1D {
    /// Validates the endpoint sets and, when `dense` is set, unit density of
    /// every interior set.
    pub fn new(sets: Vec<ClosedSet1D>, target: f64, dense: bool) -> Result<Self> {
        if sets.len() < 2 {
            return Err(Error::Validation(
                "a sequence needs at least A_0 and A_n".into(),
            ));
        }
        if !target.is_finite() {
            return Err(Error::Validation(format!(
                "target must be finite, got {target}"
            )));
        }
        if !sets[0].is_singleton(0.0) {
            return Err(Error::Validation("A_0 must be the singleton {0}".into()));
        }
        let n = sets.len() - 1;
        if !sets[n].is_singleton(target) {
            return Err(Error::Validation(format!(
                "A_{n} must be the singleton {{{target}}}"
            )));
        }
        if dense {
            if let Some(i) = (1..n).find(|&i| !sets[i].is_unit_dense()) {
                return Err(Error::DensityViolation(format!(
                    "A_{i} misses some closed interval of length 1"
                )));
            }
        }
        Ok(GridSequence1D {
            sets,
            target,
            dense,
        })
    }

    /// Parses sequence JSON, keeping the typed error of a failed sequence check.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawSequence = serde_json::from_str(text)?;
        Self::new(raw.sets, raw.s, raw.dense)
    }

    /// Builds `{0}, interior..., {s}`.
    pub fn from_interior(interior: Vec<ClosedSet1D>, target: f64, dense: bool) -> Result<Self> {
        let mut sets = Vec::with_capacity(interior.len() + 2);
        sets.push(ClosedSet1D::point(0.0)?);
        sets.extend(interior);
        sets.push(ClosedSet1D::point(target)?);
        Self::new(sets, target, dense)
    }

    pub fn n(&self) -> usize {
        self.sets.len() - 1
    }

    pub fn target(&self) -> f64 {
        self.target
    }

    pub fn is_dense(&self) -> bool {
        self.dense
    }

    pub fn sets(&self) -> &[ClosedSet1D] {
        &self.sets
    }

    pub fn set(&self, i: usize) -> &ClosedSet1D {
        &self.sets[i]
    }

    /// The shifted system `A_i - i*s/n` with target 0. Differences between
    /// steps are unchanged.
    pub fn normalized(&self) -> GridSequence1D {
        let n = self.n();
        let t = self.target / n as f64;
        let mut sets = Vec::with_capacity(n + 1);
        sets.push(self.sets[0].clone());
        for i in 1..n {
            sets.push(self.sets[i].shift(-(i as f64) * t));
        }
        sets.push(ClosedSet1D::point(0.0).expect("finite"));
        GridSequence1D {
            sets,
            target: 0.0,
            dense: self.dense,
        }
    }
}

/// Why propagation stopped early.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Blockage {
    /// No element of `A_i` at or above `L_i`: the window ran past the set, `L = +inf`.
    InfeasibleLow,
    /// No element of `A_i` at or below `R_i`: `R = -inf`.
    InfeasibleHigh,
    /// `J_i` misses `A_i` although the set extends on both sides.
    Empty,
}

/// Windows `J_1, ..., J_h` for the offset pair `(x_lo, x_hi)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowState {
    pub x_lo: f64,
    pub x_hi: f64,
    lower: Vec<f64>,
    upper: Vec<f64>,
    blocked: Option<(usize, Blockage)>,
}

impl WindowState {
    /// Number of computed windows (the last defined index is `len()` unless blocked).
    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    /// `[L_i, R_i]` for `i >= 1`, or `None` past a blockage.
    pub fn window(&self, i: usize) -> Option<(f64, f64)> {
        if i == 0 || i > self.lower.len() {
            return None;
        }
        Some((self.lower[i - 1], self.upper[i - 1]))
    }

    /// First index whose window is undefined, with the reason.
    pub fn blocked(&self) -> Option<(usize, Blockage)> {
        self.blocked
    }

    pub fn lower_bounds(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper_bounds(&self) -> &[f64] {
        &self.upper
    }
}

/// Runs the relaxed recursion up to `J_n`.
pub fn propagate(seq: &GridSequence1D, x_lo: f64, x_hi: f64) -> Result<WindowState> {
    propagate_to(seq, x_lo, x_hi, seq.n())
}

/// Runs the relaxed recursion up to `J_h`.
pub fn propagate_to(seq: &GridSequence1D, x_lo: f64, x_hi: f64, h: usize) -> Result<WindowState> {
    if !(x_lo.is_finite() && x_hi.is_finite()) || x_lo > x_hi {
        return Err(Error::Validation(format!(
            "bad offset window [{x_lo}, {x_hi}]"
        )));
    }
    if h == 0 || h > seq.n() {
        return Err(Error::Validation(format!(
            "window index {h} outside 1..={}",
            seq.n()
        )));
    }
    let mut lower = Vec::with_capacity(h);
    let mut upper = Vec::with_capacity(h);
    let (mut l, mut r) = (x_lo, x_hi + 1.0);
    lower.push(l);
    upper.push(r);
    let mut blocked = None;
    for i in 1..h {
        let set = &seq.sets[i];
        let succ = match set.successor(l) {
            Ok(v) => v,
            Err(_) => {
                blocked = Some((i + 1, Blockage::InfeasibleLow));
                break;
            }
        };
        let pred = match set.predecessor(r) {
            Ok(v) => v,
            Err(_) => {
                blocked = Some((i + 1, Blockage::InfeasibleHigh));
                break;
            }
        };
        if succ > r + TAU {
            blocked = Some((i + 1, Blockage::Empty));
            break;
        }
        l = x_lo + succ;
        r = x_hi + 1.0 + pred;
        lower.push(l);
        upper.push(r);
    }
    Ok(WindowState {
        x_lo,
        x_hi,
        lower,
        upper,
        blocked,
    })
}

/// Position of a target relative to `J_h(x)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Probe {
    /// `R_h(x) < p`: increase `x`.
    Below,
    /// `L_h(x) > p`: decrease `x`.
    Above,
    Hit,
    Gap,
}

fn probe(seq: &GridSequence1D, x: f64, p: f64, h: usize) -> Result<Probe> {
    let state = propagate_to(seq, x, x, h)?;
    Ok(match state.blocked {
        Some((_, Blockage::InfeasibleLow)) => Probe::Above,
        Some((_, Blockage::InfeasibleHigh)) => Probe::Below,
        Some((_, Blockage::Empty)) => Probe::Gap,
        None => {
            let (l, r) = state.window(h).expect("propagated to h");
            if r < p - TAU {
                Probe::Below
            } else if l > p + TAU {
                Probe::Above
            } else {
                Probe::Hit
            }
        }
    })
}

fn gap_error(x: f64) -> Error {
    Error::Infeasible(format!("window at offset {x} falls into a gap of some set"))
}

/// Result of the offset search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WindowOffset {
    pub x_lo: f64,
    pub x_hi: f64,
    /// `p` lies in `J_h(x_lo)` and `x_lo == x_hi`.
    pub exact: bool,
}

/// Finds offsets with `x_hi - x_lo <= eps` whose relaxed window `J'_h`
/// contains `p`.
pub fn find_window_offset(
    seq: &GridSequence1D,
    p: f64,
    h: usize,
    eps: f64,
) -> Result<WindowOffset> {
    check_search_args(seq, p, h, eps)?;
    let center = p / h as f64;
    let (lo, hi) = match grow_bracket(seq, p, h, center)? {
        Bracket::Hit(x) => {
            return Ok(WindowOffset {
                x_lo: x,
                x_hi: x,
                exact: true,
            })
        }
        Bracket::Range(lo, hi) => (lo, hi),
    };
    bisect(seq, p, h, lo, hi, eps)
}

fn check_search_args(seq: &GridSequence1D, p: f64, h: usize, eps: f64) -> Result<()> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::Validation(format!(
            "eps must be positive, got {eps}"
        )));
    }
    if !p.is_finite() {
        return Err(Error::Validation(format!("target must be finite, got {p}")));
    }
    if h == 0 || h > seq.n() {
        return Err(Error::Validation(format!(
            "window index {h} outside 1..={}",
            seq.n()
        )));
    }
    Ok(())
}

enum Bracket {
    Hit(f64),
    Range(f64, f64),
}

/// Doubles outward from `center +- 1` until `R_h(lo) < p < L_h(hi)`.
fn grow_bracket(seq: &GridSequence1D, p: f64, h: usize, center: f64) -> Result<Bracket> {
    let mut lo = center - 1.0;
    let mut step = 1.0;
    loop {
        match probe(seq, lo, p, h)? {
            Probe::Below => break,
            Probe::Hit => return Ok(Bracket::Hit(lo)),
            Probe::Gap => return Err(gap_error(lo)),
            Probe::Above => {}
        }
        lo -= step;
        step *= 2.0;
        if lo.abs() > BRACKET_LIMIT {
            return Err(Error::BracketFailure(format!(
                "no lower bracket for target {p}"
            )));
        }
    }
    let mut hi = center + 1.0;
    let mut step = 1.0;
    loop {
        match probe(seq, hi, p, h)? {
            Probe::Above => break,
            Probe::Hit => return Ok(Bracket::Hit(hi)),
            Probe::Gap => return Err(gap_error(hi)),
            Probe::Below => {}
        }
        hi += step;
        step *= 2.0;
        if hi.abs() > BRACKET_LIMIT {
            return Err(Error::BracketFailure(format!(
                "no upper bracket for target {p}"
            )));
        }
    }
    Ok(Bracket::Range(lo, hi))
}

/// Bisection on the three-way test, given `R_h(lo) < p < L_h(hi)`.
fn bisect(
    seq: &GridSequence1D,
    p: f64,
    h: usize,
    mut lo: f64,
    mut hi: f64,
    eps: f64,
) -> Result<WindowOffset> {
    while hi - lo > eps {
        let mid = lo + (hi - lo) / 2.0;
        if mid <= lo || mid >= hi {
            break;
        }
        match probe(seq, mid, p, h)? {
            Probe::Below => lo = mid,
            Probe::Above => hi = mid,
            Probe::Hit => {
                return Ok(WindowOffset {
                    x_lo: mid,
                    x_hi: mid,
                    exact: true,
                })
            }
            Probe::Gap => return Err(gap_error(mid)),
        }
    }
    Ok(WindowOffset {
        x_lo: lo,
        x_hi: hi,
        exact: false,
    })
}

/// A selection `a_0, ..., a_n` with `a_i` in `A_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Transversal1D {
    pub points: Vec<f64>,
    /// Offset window used to build it, when it came from a solver.
    pub offset_window: Option<(f64, f64)>,
}

impl Transversal1D {
    pub fn new(points: Vec<f64>) -> Self {
        Transversal1D {
            points,
            offset_window: None,
        }
    }

    /// Steps `z_i = a_i - a_{i-1}`, `i = 1..=n`.
    pub fn z(&self) -> Vec<f64> {
        self.points.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// `max z - min z`.
    pub fn spread(&self) -> f64 {
        spread_of(&self.z())
    }

    /// Checks `a_0 = 0`, `a_n = s` and membership of every point.
    pub fn verify(&self, seq: &GridSequence1D) -> Result<()> {
        if self.points.len() != seq.sets.len() {
            return Err(Error::Validation(format!(
                "transversal has {} points, sequence has {} sets",
                self.points.len(),
                seq.sets.len()
            )));
        }
        for (i, (&a, set)) in self.points.iter().zip(&seq.sets).enumerate() {
            if !set.contains(a) {
                return Err(Error::MembershipViolation {
                    index: i,
                    detail: format!("{a} not in A_{i}"),
                });
            }
        }
        Ok(())
    }

    pub fn report(&self) -> TransversalReport {
        let z = self.z();
        TransversalReport {
            spread: spread_of(&z),
            points: self.points.clone(),
            z,
            offset_window: self.offset_window,
        }
    }
}

/// JSON form of a [`Transversal1D`].
#[derive(Clone, Debug, Serialize)]
pub struct TransversalReport {
    pub points: Vec<f64>,
    pub z: Vec<f64>,
    pub spread: f64,
    pub offset_window: Option<(f64, f64)>,
}

pub(crate) fn spread_of(z: &[f64]) -> f64 {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = z.iter().copied().fold(f64::INFINITY, f64::min);
    if z.is_empty() {
        0.0
    } else {
        max - min
    }
}

/// Backtracks a transversal whose steps lie in `[x_lo, x_hi + 1]`, taking
/// the smallest admissible element at every step.
pub fn extract(seq: &GridSequence1D, state: &WindowState) -> Result<Transversal1D> {
    let n = seq.n();
    if state.blocked.is_some_and(|(i, _)| i <= n) || state.len() < n {
        return Err(Error::ExtractionFailure {
            index: n,
            detail: "window state does not reach the last set".into(),
        });
    }
    let s = seq.target;
    let (ln, rn) = state.window(n).expect("checked length");
    if s < ln - EXTRACT_SLACK || s > rn + EXTRACT_SLACK {
        return Err(Error::ExtractionFailure {
            index: n,
            detail: format!("target {s} outside final window [{ln}, {rn}]"),
        });
    }
    let mut points = vec![0.0; n + 1];
    points[n] = s;
    for i in (1..n).rev() {
        let (li, ri) = state.window(i).expect("checked length");
        let next = points[i + 1];
        let lower = li.max(next - state.x_hi - 1.0);
        let upper = ri.min(next - state.x_lo);
        let a = seq.sets[i]
            .successor(lower)
            .map_err(|e| Error::ExtractionFailure {
                index: i,
                detail: e.to_string(),
            })?;
        if a > upper + EXTRACT_SLACK {
            return Err(Error::ExtractionFailure {
                index: i,
                detail: format!("smallest admissible element {a} exceeds {upper}"),
            });
        }
        points[i] = a;
    }
    points[0] = 0.0;
    Ok(Transversal1D {
        points,
        offset_window: Some((state.x_lo, state.x_hi)),
    })
}

/// Transversal with spread at most `1 + eps` (at most 1 when the search hits
/// exactly) for a dense sequence.
pub fn solve(seq: &GridSequence1D, eps: f64) -> Result<Transversal1D> {
    if !seq.dense {
        return Err(Error::Validation(
            "solve needs a dense sequence; use the finite solver".into(),
        ));
    }
    let n = seq.n();
    check_search_args(seq, 0.0, n, eps)?;
    let t = seq.target / n as f64;
    let norm = seq.normalized();

    // With target 0, J_n(-1) lies in (-inf, 0] and J_n(0) in [0, inf).
    let offset = match (probe(&norm, -1.0, 0.0, n)?, probe(&norm, 0.0, 0.0, n)?) {
        (Probe::Hit, _) => WindowOffset {
            x_lo: -1.0,
            x_hi: -1.0,
            exact: true,
        },
        (_, Probe::Hit) => WindowOffset {
            x_lo: 0.0,
            x_hi: 0.0,
            exact: true,
        },
        (Probe::Below, Probe::Above) => bisect(&norm, 0.0, n, -1.0, 0.0, eps)?,
        _ => find_window_offset(&norm, 0.0, n, eps)?,
    };
    let state = propagate(&norm, offset.x_lo, offset.x_hi)?;
    let normalized = extract(&norm, &state)?;
    let mut points: Vec<f64> = normalized
        .points
        .iter()
        .enumerate()
        .map(|(i, a)| a + i as f64 * t)
        .collect();
    points[0] = 0.0;
    points[n] = seq.target;
    Ok(Transversal1D {
        points,
        offset_window: Some((offset.x_lo + t, offset.x_hi + t)),
    })
}

/// Exact solver for sequences whose interior sets are finite point sets.
pub fn solve_exact_finite(seq: &GridSequence1D) -> Result<Transversal1D> {
    solve_exact_finite_from(seq, f64::NEG_INFINITY)
}

/// Like [`solve_exact_finite`], restricted to offsets `x >= min_offset`.
///
/// Every `L_i` and `R_i` has the form `x + const` between breakpoints, and
/// the breakpoints are the differences `a - a'` and `a - a' - 1` of points
/// `a, a'` of `P` (interior points together with `0` and `s`). The feasible
/// offsets form a closed interval whose ends are breakpoints, so the largest
/// feasible offset is itself a breakpoint. Bisection first narrows the range
/// around it, then only the breakpoints inside the final bracket are
/// searched. Taking the largest offset makes the smallest step as large as
/// the window scheme allows.
///
/// Interior point sets must not contain gaps wider than one, otherwise a
/// window hull could claim reachability that no transversal realises.
pub fn solve_exact_finite_from(seq: &GridSequence1D, min_offset: f64) -> Result<Transversal1D> {
    let n = seq.n();
    let mut pool = vec![0.0, seq.target];
    for i in 1..n {
        let pts = seq.sets[i]
            .finite_points()
            .ok_or_else(|| Error::Validation(format!("A_{i} is not a finite union of points")))?;
        if let Some(w) = pts.windows(2).find(|w| w[1] - w[0] > 1.0 + TAU) {
            return Err(Error::Validation(format!(
                "A_{i} has a gap wider than one between {} and {}",
                w[0], w[1]
            )));
        }
        pool.extend(pts);
    }
    pool.sort_by(f64::total_cmp);
    pool.dedup();
    let span = pool[pool.len() - 1] - pool[0];
    let s = seq.target;

    // Invariant: probe(lo) is not Above, probe(hi) is Above.
    let mut lo = (-span - 1.0).max(min_offset);
    let mut hi = lo.max(span) + 2.0;
    match probe(seq, lo, s, n)? {
        Probe::Above => {
            return Err(Error::Infeasible(format!(
                "no offset >= {lo} reaches the target"
            )))
        }
        Probe::Gap => return Err(gap_error(lo)),
        Probe::Below | Probe::Hit => {}
    }
    match probe(seq, hi, s, n)? {
        Probe::Above => {}
        Probe::Gap => return Err(gap_error(hi)),
        _ => {
            return Err(Error::Infeasible(format!(
                "offset {hi} does not overshoot the target"
            )))
        }
    }
    while hi - lo > FINITE_BRACKET {
        let mid = lo + (hi - lo) / 2.0;
        match probe(seq, mid, s, n)? {
            Probe::Above => hi = mid,
            Probe::Below | Probe::Hit => lo = mid,
            Probe::Gap => return Err(gap_error(mid)),
        }
    }
    let cands = offset_candidates(&pool, lo, hi);
    // first candidate that overshoots
    let (mut l, mut r) = (0usize, cands.len());
    while l < r {
        let mid = l + (r - l) / 2;
        match probe(seq, cands[mid], s, n)? {
            Probe::Above => r = mid,
            Probe::Below | Probe::Hit => l = mid + 1,
            Probe::Gap => return Err(gap_error(cands[mid])),
        }
    }
    let x = match l.checked_sub(1).map(|k| cands[k]) {
        Some(x) if probe(seq, x, s, n)? == Probe::Hit => x,
        _ if probe(seq, lo, s, n)? == Probe::Hit => lo,
        _ => {
            return Err(Error::Infeasible(format!(
                "no breakpoint in [{lo}, {hi}] reaches the target"
            )))
        }
    };
    let state = propagate(seq, x, x)?;
    extract(seq, &state)
}

/// Breakpoints `a - a'` and `a - a' - 1` inside `[lo, hi]`, sorted, with the
/// midpoints between consecutive breakpoints interleaved.
pub(crate) fn offset_candidates(pool: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let mut c = Vec::new();
    for &b in pool {
        for shift in [0.0, 1.0] {
            // a in [lo + b + shift, hi + b + shift]
            let from = pool.partition_point(|&a| a - b - shift < lo);
            for &a in &pool[from..] {
                let d = a - b - shift;
                if d > hi {
                    break;
                }
                c.push(d);
            }
        }
    }
    c.sort_by(f64::total_cmp);
    c.dedup();
    let mut out = Vec::with_capacity(2 * c.len());
    for (k, &v) in c.iter().enumerate() {
        if k > 0 {
            out.push(c[k - 1] + (v - c[k - 1]) / 2.0);
        }
        out.push(v);
    }
    out
}
