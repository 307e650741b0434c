//! Planar primitives: vectors, norms, closed unions of axis-aligned boxes.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default resolution of the sampled density check.
pub const DEFAULT_SAMPLE_STEP: f64 = 0.05;

/// Default tolerance of the certified density check.
pub const DEFAULT_CERTIFY_TOL: f64 = 1e-9;

/// Membership tolerance for planar points.
pub const MEMBER_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn swapped(self) -> Self {
        Vec2 {
            x: self.y,
            y: self.x,
        }
    }

    pub fn norm(self, kind: NormKind) -> f64 {
        match kind {
            NormKind::Euclidean => self.x.hypot(self.y),
            NormKind::Maximum => self.x.abs().max(self.y.abs()),
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<[f64; 2]> for Vec2 {
    fn from(a: [f64; 2]) -> Self {
        Vec2 { x: a[0], y: a[1] }
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    #[default]
    Euclidean,
    #[serde(rename = "linf", alias = "maximum", alias = "max")]
    Maximum,
}

impl std::str::FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" | "l2" => Ok(NormKind::Euclidean),
            "linf" | "maximum" | "max" => Ok(NormKind::Maximum),
            other => Err(Error::Validation(format!("unknown norm {other:?}"))),
        }
    }
}

/// Component kinds of the generated construction, in classification priority order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Component {
    N,
    S,
    E,
    W,
    QNE,
    QNW,
    QSE,
    QSW,
}

impl Component {
    /// The label a component gets after reflecting about the line `x = y`.
    pub fn reflected(self) -> Component {
        use Component::*;
        match self {
            N => E,
            E => N,
            S => W,
            W => S,
            QNE => QNE,
            QSW => QSW,
            QNW => QSE,
            QSE => QNW,
        }
    }

    pub fn is_corner(self) -> bool {
        matches!(
            self,
            Component::QNE | Component::QNW | Component::QSE | Component::QSW
        )
    }
}

impl std::fmt::Display for Component {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Debug::fmt(self, f)
    }
}

/// Closed box `[x.0, x.1] x [y.0, y.1]`; bounds may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Box2 {
    #[serde(with = "crate::extf64::pair")]
    pub x: (f64, f64),
    #[serde(with = "crate::extf64::pair")]
    pub y: (f64, f64),
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<Component>,
}

impl Box2 {
    pub fn new(x: (f64, f64), y: (f64, f64)) -> Self {
        Box2 { x, y, label: None }
    }

    pub fn labeled(x: (f64, f64), y: (f64, f64), label: Component) -> Self {
        Box2 {
            x,
            y,
            label: Some(label),
        }
    }

    pub fn point(p: Vec2) -> Self {
        Box2::new((p.x, p.x), (p.y, p.y))
    }

    fn validate(&self) -> Result<()> {
        let ok = |(lo, hi): (f64, f64)| {
            !lo.is_nan() && !hi.is_nan() && lo <= hi && lo < f64::INFINITY && hi > f64::NEG_INFINITY
        };
        if ok(self.x) && ok(self.y) {
            Ok(())
        } else {
            Err(Error::Validation(format!(
                "bad box x={:?} y={:?}",
                self.x, self.y
            )))
        }
    }

    pub fn clamp(&self, p: Vec2) -> Vec2 {
        Vec2::new(p.x.clamp(self.x.0, self.x.1), p.y.clamp(self.y.0, self.y.1))
    }

    pub fn distance(&self, p: Vec2, norm: NormKind) -> f64 {
        (p - self.clamp(p)).norm(norm)
    }

    pub fn contains(&self, p: Vec2, tol: f64) -> bool {
        self.x.0 - tol <= p.x
            && p.x <= self.x.1 + tol
            && self.y.0 - tol <= p.y
            && p.y <= self.y.1 + tol
    }

    pub fn shifted(&self, v: Vec2) -> Box2 {
        Box2 {
            x: (self.x.0 + v.x, self.x.1 + v.x),
            y: (self.y.0 + v.y, self.y.1 + v.y),
            label: self.label,
        }
    }

    /// Mirror image about `x = y`, with the label mapped accordingly.
    pub fn swapped(&self) -> Box2 {
        Box2 {
            x: self.y,
            y: self.x,
            label: self.label.map(Component::reflected),
        }
    }
}

/// A closed planar set given as a finite union of boxes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBoxes")]
pub struct BoxUnionSet2D {
    boxes: Vec<Box2>,
}

#[derive(Deserialize)]
struct RawBoxes {
    boxes: Vec<Box2>,
}

impl TryFrom<RawBoxes> for BoxUnionSet2D {
    type Error = Error;
    fn try_from(raw: RawBoxes) -> Result<Self> {
        BoxUnionSet2D::new(raw.boxes)
    }
}

impl BoxUnionSet2D {
    pub fn new(boxes: Vec<Box2>) -> Result<Self> {
        for b in &boxes {
            b.validate()?;
        }
        Ok(BoxUnionSet2D { boxes })
    }

    pub fn singleton(p: Vec2) -> Self {
        BoxUnionSet2D {
            boxes: vec![Box2::point(p)],
        }
    }

    pub fn plane() -> Self {
        let all = (f64::NEG_INFINITY, f64::INFINITY);
        BoxUnionSet2D {
            boxes: vec![Box2::new(all, all)],
        }
    }

    /// Degenerate point boxes at `period * (i, j)` for `|i|, |j| <= half_extent`.
    pub fn grid_points(period: f64, half_extent: i64) -> Self {
        let mut boxes = Vec::new();
        for i in -half_extent..=half_extent {
            for j in -half_extent..=half_extent {
                boxes.push(Box2::point(Vec2::new(i as f64 * period, j as f64 * period)));
            }
        }
        BoxUnionSet2D { boxes }
    }

    pub fn boxes(&self) -> &[Box2] {
        &self.boxes
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn contains(&self, p: Vec2, tol: f64) -> bool {
        self.boxes.iter().any(|b| b.contains(p, tol))
    }

    pub fn is_singleton(&self, p: Vec2) -> bool {
        !self.boxes.is_empty()
            && self.boxes.iter().all(|b| {
                (b.x.0 - p.x).abs() <= MEMBER_TOL
                    && (b.x.1 - p.x).abs() <= MEMBER_TOL
                    && (b.y.0 - p.y).abs() <= MEMBER_TOL
                    && (b.y.1 - p.y).abs() <= MEMBER_TOL
            })
    }

    /// Index of the box realising the distance, plus the nearest point.
    pub fn nearest(&self, p: Vec2, norm: NormKind) -> Result<(usize, Vec2)> {
        let mut best: Option<(usize, Vec2, f64)> = None;
        for (k, b) in self.boxes.iter().enumerate() {
            let q = b.clamp(p);
            let d = (p - q).norm(norm);
            if best.is_none_or(|(_, _, bd)| d < bd) {
                best = Some((k, q, d));
            }
        }
        best.map(|(k, q, _)| (k, q)).ok_or(Error::EmptySet)
    }

    pub fn distance(&self, p: Vec2, norm: NormKind) -> Result<f64> {
        self.boxes
            .iter()
            .map(|b| b.distance(p, norm))
            .reduce(f64::min)
            .ok_or(Error::EmptySet)
    }

    pub fn shift(&self, v: Vec2) -> BoxUnionSet2D {
        BoxUnionSet2D {
            boxes: self.boxes.iter().map(|b| b.shifted(v)).collect(),
        }
    }

    pub fn swapped(&self) -> BoxUnionSet2D {
        BoxUnionSet2D {
            boxes: self.boxes.iter().map(Box2::swapped).collect(),
        }
    }
}

/// Point of `set` closest to `p`; ties go to the lowest box index.
pub fn nearest_point(set: &BoxUnionSet2D, p: Vec2, norm: NormKind) -> Result<Vec2> {
    set.nearest(p, norm).map(|(_, q)| q)
}

/// How to decide whether a set meets every unit ball.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DensityProbe {
    /// Check the lattice `window.0 + h * (i, j)` inside the window
    /// `[x0, x1] x [y0, y1]`. Cheap, but blind between samples.
    Sampled { window: [f64; 4], h: f64 },
    /// Branch-and-bound over cells. Distance to a box is convex, so its
    /// maximum over a cell sits at a corner; a cell is settled once one box
    /// is within `1 + tol` of all four corners. A corner farther than
    /// `1 + tol` from the set is a counterexample. Beyond the finite box
    /// coordinates the set is translation invariant, so a window two units
    /// wider than those coordinates decides the whole plane.
    Certified { tol: f64 },
}

impl Default for DensityProbe {
    fn default() -> Self {
        DensityProbe::Certified {
            tol: DEFAULT_CERTIFY_TOL,
        }
    }
}

/// Does every closed unit ball of `norm` meet `set`?
pub fn is_grid_dense_2d(set: &BoxUnionSet2D, norm: NormKind, probe: DensityProbe) -> bool {
    if set.is_empty() {
        return false;
    }
    match probe {
        DensityProbe::Sampled { window, h } => sampled_density(set, norm, window, h),
        DensityProbe::Certified { tol } => certified_density(set, norm, tol),
    }
}

fn sampled_density(set: &BoxUnionSet2D, norm: NormKind, w: [f64; 4], h: f64) -> bool {
    let nx = ((w[1] - w[0]) / h).round() as i64;
    let ny = ((w[3] - w[2]) / h).round() as i64;
    for i in 0..=nx {
        for j in 0..=ny {
            let p = Vec2::new(w[0] + i as f64 * h, w[2] + j as f64 * h);
            if set.distance(p, norm).expect("nonempty") > 1.0 + MEMBER_TOL {
                return false;
            }
        }
    }
    true
}

fn axis_lines(set: &BoxUnionSet2D, pick: impl Fn(&Box2) -> (f64, f64)) -> Vec<f64> {
    let mut v = vec![0.0];
    for b in set.boxes() {
        let (lo, hi) = pick(b);
        v.extend([lo, hi].into_iter().filter(|c| c.is_finite()));
    }
    v.sort_by(f64::total_cmp);
    v.dedup();
    let (lo, hi) = (v[0] - 2.0, v[v.len() - 1] + 2.0);
    let mut lines = vec![lo];
    lines.extend(v.iter().copied());
    lines.push(hi);
    // gap midlines are where a set is tight against two opposite boxes
    let mut out = Vec::with_capacity(2 * lines.len());
    for (k, &c) in lines.iter().enumerate() {
        if k > 0 {
            out.push(lines[k - 1] + (c - lines[k - 1]) / 2.0);
        }
        out.push(c);
    }
    out
}

fn certified_density(set: &BoxUnionSet2D, norm: NormKind, tol: f64) -> bool {
    const MAX_CELLS: usize = 5_000_000;
    let xs = axis_lines(set, |b| b.x);
    let ys = axis_lines(set, |b| b.y);
    let mut stack: Vec<(f64, f64, f64, f64)> = Vec::new();
    for xw in xs.windows(2) {
        for yw in ys.windows(2) {
            stack.push((xw[0], xw[1], yw[0], yw[1]));
        }
    }
    let limit = 1.0 + tol;
    let mut visited = 0usize;
    while let Some((x0, x1, y0, y1)) = stack.pop() {
        visited += 1;
        if visited > MAX_CELLS {
            return false;
        }
        let corners = [
            Vec2::new(x0, y0),
            Vec2::new(x1, y0),
            Vec2::new(x0, y1),
            Vec2::new(x1, y1),
        ];
        let mut covered = false;
        for b in set.boxes() {
            if corners.iter().all(|&c| b.distance(c, norm) <= limit) {
                covered = true;
                break;
            }
        }
        if covered {
            continue;
        }
        if corners
            .iter()
            .any(|&c| set.distance(c, norm).expect("nonempty") > limit)
        {
            return false;
        }
        let half_diag = Vec2::new(x1 - x0, y1 - y0).norm(NormKind::Euclidean) / 2.0;
        if half_diag <= tol {
            continue;
        }
        let (xm, ym) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
        stack.extend([
            (x0, xm, y0, ym),
            (xm, x1, y0, ym),
            (x0, xm, ym, y1),
            (xm, x1, ym, y1),
        ]);
    }
    true
}

/// `max_{i,j} |z_i - z_j|` by a pairwise scan.
pub fn diameter(zs: &[Vec2], norm: NormKind) -> f64 {
    let mut best = 0.0f64;
    for (i, &a) in zs.iter().enumerate() {
        for &b in &zs[i + 1..] {
            best = best.max((a - b).norm(norm));
        }
    }
    best
}

/// A selection `a_0, ..., a_n` of planar points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transversal2D {
    pub points: Vec<Vec2>,
}

impl Transversal2D {
    pub fn new(points: Vec<Vec2>) -> Self {
        Transversal2D { points }
    }

    /// `z_i = a_i - a_{i-1}` for `i = 1..=n`.
    pub fn z(&self) -> Vec<Vec2> {
        self.points.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn diameter(&self, norm: NormKind) -> f64 {
        diameter(&self.z(), norm)
    }
}
