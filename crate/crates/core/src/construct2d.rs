//! Planar grid-like sequences: the two-arm construction, explicit
//! transversals, normalization, lifting from the line and jump analysis.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom2d::{
    is_grid_dense_2d, nearest_point, Box2, BoxUnionSet2D, Component, DensityProbe, NormKind,
    Transversal2D, Vec2, MEMBER_TOL,
};
use crate::sets1d::Part;
use crate::transversal1d::GridSequence1D;

const INF: f64 = f64::INFINITY;

/// `4 sqrt(2 - sqrt 3)`, the diameter of the equilateral triangle the
/// two-arm construction forces.
pub fn triangle_bound() -> f64 {
    4.0 * (2.0 - 3f64.sqrt()).sqrt()
}

/// `A_0, ..., A_n` in the plane with `A_0 = {0}` and `A_n = {s}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSequence")]
pub struct GridSequence2D {
    sets: Vec<BoxUnionSet2D>,
    s: Vec2,
}

#[derive(Deserialize)]
struct RawSequence {
    sets: Vec<BoxUnionSet2D>,
    s: Vec2,
    #[serde(default = "default_dense")]
    dense: bool,
}

fn default_dense() -> bool {
    true
}

impl TryFrom<RawSequence> for GridSequence2D {
    type Error = Error;

    fn try_from(raw: RawSequence) -> Result<Self> {
        GridSequence2D::new(raw.sets, raw.s, raw.dense)
    }
}

impl GridSequence2D {
    /// Validates the endpoint sets and, when `dense` is set, the certified
    /// euclidean density of every interior set.
    pub fn new(sets: Vec<BoxUnionSet2D>, s: Vec2, dense: bool) -> Result<Self> {
        let seq = Self::structural(sets, s)?;
        if dense {
            seq.check_density(NormKind::Euclidean, DensityProbe::default())?;
        }
        Ok(seq)
    }

    /// Parses sequence JSON, keeping the typed error of a failed sequence check.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawSequence = serde_json::from_str(text)?;
        Self::new(raw.sets, raw.s, raw.dense)
    }

    /// Builds `{0}, interior..., {s}`.
    pub fn from_interior(interior: Vec<BoxUnionSet2D>, s: Vec2, dense: bool) -> Result<Self> {
        let mut sets = Vec::with_capacity(interior.len() + 2);
        sets.push(BoxUnionSet2D::singleton(Vec2::ZERO));
        sets.extend(interior);
        sets.push(BoxUnionSet2D::singleton(s));
        Self::new(sets, s, dense)
    }

    fn structural(sets: Vec<BoxUnionSet2D>, s: Vec2) -> Result<Self> {
        if sets.len() < 2 {
            return Err(Error::Validation(
                "a sequence needs at least A_0 and A_n".into(),
            ));
        }
        if !s.is_finite() {
            return Err(Error::Validation(format!(
                "target must be finite, got {s:?}"
            )));
        }
        if !sets[0].is_singleton(Vec2::ZERO) {
            return Err(Error::Validation(
                "A_0 must be the singleton {(0, 0)}".into(),
            ));
        }
        let n = sets.len() - 1;
        if !sets[n].is_singleton(s) {
            return Err(Error::Validation(format!(
                "A_{n} must be the singleton {{({}, {})}}",
                s.x, s.y
            )));
        }
        Ok(GridSequence2D { sets, s })
    }

    /// Errors with the first interior index whose set misses some unit ball.
    pub fn check_density(&self, norm: NormKind, probe: DensityProbe) -> Result<()> {
        match (1..self.n()).find(|&i| !is_grid_dense_2d(&self.sets[i], norm, probe)) {
            Some(i) => Err(Error::DensityViolation(format!(
                "A_{i} misses some closed unit ball"
            ))),
            None => Ok(()),
        }
    }

    pub fn n(&self) -> usize {
        self.sets.len() - 1
    }

    pub fn target(&self) -> Vec2 {
        self.s
    }

    /// `t = s / n`.
    pub fn step(&self) -> Vec2 {
        self.s * (1.0 / self.n() as f64)
    }

    pub fn sets(&self) -> &[BoxUnionSet2D] {
        &self.sets
    }

    pub fn set(&self, i: usize) -> &BoxUnionSet2D {
        &self.sets[i]
    }

    pub fn is_labeled(&self) -> bool {
        self.sets[1..self.n()]
            .iter()
            .all(|s| s.boxes().iter().all(|b| b.label.is_some()))
    }

    /// Errors unless `t` picks one point from each set, within `tol`.
    pub fn verify(&self, t: &Transversal2D, tol: f64) -> Result<()> {
        if t.points.len() != self.sets.len() {
            return Err(Error::Validation(format!(
                "transversal has {} points, sequence has {} sets",
                t.points.len(),
                self.sets.len()
            )));
        }
        for (i, (set, &a)) in self.sets.iter().zip(&t.points).enumerate() {
            if !set.contains(a, tol) {
                return Err(Error::MembershipViolation {
                    index: i,
                    detail: format!("({}, {}) is not in A_{i}", a.x, a.y),
                });
            }
        }
        Ok(())
    }
}

/// Size parameter of the two-arm construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionParams {
    m: usize,
}

impl ConstructionParams {
    pub fn new(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::Validation(format!("m must be at least 2, got {m}")));
        }
        Ok(ConstructionParams { m })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `3 / (m - 1)`
    pub fn delta(&self) -> f64 {
        3.0 / (self.m - 1) as f64
    }

    /// `2m + 1`
    pub fn n(&self) -> usize {
        2 * self.m + 1
    }
}

/// Half-width of the vertical strips of `A_i`, `3 - (i - 1) delta`, with
/// `A_m` hitting zero exactly.
fn arm_width(p: ConstructionParams, i: usize) -> f64 {
    3.0 * (p.m - i) as f64 / (p.m - 1) as f64
}

fn first_arm_set(a: f64) -> BoxUnionSet2D {
    use Component::*;
    let (c, e, f) = (a + 1.0, a + 1.5, 1.5);
    let boxes = vec![
        Box2::labeled((-a, a), (1.0, INF), N),
        Box2::labeled((-a, a), (-INF, -1.0), S),
        Box2::labeled((c, INF), (0.0, 0.0), E),
        Box2::labeled((-INF, -c), (0.0, 0.0), W),
        Box2::labeled((e, INF), (f, INF), QNE),
        Box2::labeled((-INF, -e), (f, INF), QNW),
        Box2::labeled((e, INF), (-INF, -f), QSE),
        Box2::labeled((-INF, -e), (-INF, -f), QSW),
    ];
    BoxUnionSet2D::new(boxes).expect("construction boxes are well formed")
}

/// The labeled sequence of `2m + 2` sets: `A_1..A_m` shrink their vertical
/// strips to halflines, `A_{m+1}..A_{2m}` mirror them about `x = y`.
pub fn build_theorem3(p: ConstructionParams) -> GridSequence2D {
    let m = p.m;
    let mut sets = Vec::with_capacity(p.n() + 1);
    sets.push(BoxUnionSet2D::singleton(Vec2::ZERO));
    for i in 1..=m {
        sets.push(first_arm_set(arm_width(p, i)));
    }
    for i in m + 1..=2 * m {
        let mirrored = sets[2 * m + 1 - i].swapped();
        sets.push(mirrored);
    }
    sets.push(BoxUnionSet2D::singleton(Vec2::ZERO));
    GridSequence2D {
        sets,
        s: Vec2::ZERO,
    }
}

/// The two-arm transversal whose `Z` is the equilateral triangle with
/// vertices `(2 sqrt 3 - 3, 1)`, `(1, -1)`, `(-1, 3 - 2 sqrt 3)`.
pub fn claim1_transversal(p: ConstructionParams) -> Result<Transversal2D> {
    let m = p.m;
    let k = 2.0 * 3f64.sqrt() - 3.0;
    let mut points = Vec::with_capacity(p.n() + 1);
    points.push(Vec2::ZERO);
    for i in 1..=m {
        points.push(Vec2::new((m - i) as f64 / (m - 1) as f64 * k, 1.0));
    }
    for i in 1..=m {
        points.push(Vec2::new(1.0, (i - 1) as f64 / (m - 1) as f64 * k));
    }
    points.push(Vec2::ZERO);
    let t = Transversal2D::new(points);
    build_theorem3(p).verify(&t, 0.0)?;
    Ok(t)
}

/// `a_i` = nearest point of `A_i` to `i t`; then `|a_i - i t| <= 1` for a
/// grid-like input and the diameter is at most 4.
pub fn trivial_transversal(seq: &GridSequence2D, norm: NormKind) -> Result<Transversal2D> {
    let n = seq.n();
    let t = seq.step();
    let mut points = Vec::with_capacity(n + 1);
    points.push(Vec2::ZERO);
    for i in 1..n {
        let target = t * i as f64;
        let a = nearest_point(seq.set(i), target, norm)?;
        if (a - target).norm(norm) > 1.0 + MEMBER_TOL {
            return Err(Error::DensityViolation(format!(
                "A_{i} has no point within 1 of ({}, {})",
                target.x, target.y
            )));
        }
        points.push(a);
    }
    points.push(seq.target());
    Ok(Transversal2D::new(points))
}

/// `A*_i = A_i - i t`, so the target becomes the origin.
pub fn normalize(seq: &GridSequence2D) -> GridSequence2D {
    let t = seq.step();
    let sets: Vec<BoxUnionSet2D> = seq
        .sets
        .iter()
        .enumerate()
        .map(|(i, set)| set.shift(-(t * i as f64)))
        .collect();
    let mut out = GridSequence2D {
        sets,
        s: Vec2::ZERO,
    };
    // the last shift is s - n (s / n), which need not round to zero
    let n = out.n();
    out.sets[n] = BoxUnionSet2D::singleton(Vec2::ZERO);
    out
}

/// Carries a transversal of `seq` to the normalized sequence.
pub fn normalize_transversal(seq: &GridSequence2D, t: &Transversal2D) -> Transversal2D {
    let step = seq.step();
    let n = seq.n();
    let points = t
        .points
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            if i == n {
                Vec2::ZERO
            } else {
                a - step * i as f64
            }
        })
        .collect();
    Transversal2D::new(points)
}

/// `A_0, A_1 x R, ..., A_{n-1} x R, {(s, 0)}`.
///
/// Lattices are only accepted together with a window `[lo, hi]`, inside
/// which their points are expanded.
pub fn lift_1d(seq: &GridSequence1D, window: Option<(f64, f64)>) -> Result<GridSequence2D> {
    let n = seq.n();
    let s = Vec2::new(seq.target(), 0.0);
    let mut sets = Vec::with_capacity(n + 1);
    sets.push(BoxUnionSet2D::singleton(Vec2::ZERO));
    for i in 1..n {
        let mut boxes = Vec::new();
        for part in seq.set(i).parts() {
            match *part {
                Part::Interval { lo, hi } => boxes.push(Box2::new((lo, hi), (-INF, INF))),
                Part::Point { at } => boxes.push(Box2::new((at, at), (-INF, INF))),
                Part::Lattice { offset, period } => {
                    let Some((lo, hi)) = window else {
                        return Err(Error::UnsupportedPrimitive(format!(
                            "A_{i} contains the unbounded lattice {offset} + {period}Z"
                        )));
                    };
                    let first = ((lo - offset) / period).ceil() as i64;
                    let last = ((hi - offset) / period).floor() as i64;
                    for k in first..=last {
                        let x = offset + k as f64 * period;
                        boxes.push(Box2::new((x, x), (-INF, INF)));
                    }
                }
            }
        }
        sets.push(BoxUnionSet2D::new(boxes)?);
    }
    sets.push(BoxUnionSet2D::singleton(s));
    GridSequence2D::structural(sets, s)
}

/// A change of component label between `a_{index-1}` and `a_index`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Jump {
    pub index: usize,
    pub from: Component,
    pub to: Component,
}

/// Component holding each interior `a_i`, lowest label in priority order
/// when several boxes contain it.
pub fn classify(seq: &GridSequence2D, t: &Transversal2D) -> Result<Vec<Component>> {
    seq.verify(t, MEMBER_TOL)?;
    let n = seq.n();
    let mut labels = Vec::with_capacity(n.saturating_sub(1));
    for i in 1..n {
        let mut best: Option<Component> = None;
        for b in seq
            .set(i)
            .boxes()
            .iter()
            .filter(|b| b.contains(t.points[i], MEMBER_TOL))
        {
            let label = b.label.ok_or(Error::UnlabeledSequence(i))?;
            best = Some(best.map_or(label, |cur| cur.min(label)));
        }
        labels.push(best.expect("membership verified"));
    }
    Ok(labels)
}

/// Interior indices where the component label changes.
pub fn jump_sequence(seq: &GridSequence2D, t: &Transversal2D) -> Result<Vec<Jump>> {
    let labels = classify(seq, t)?;
    Ok(labels
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0] != w[1])
        .map(|(k, w)| Jump {
            index: k + 2,
            from: w[0],
            to: w[1],
        })
        .collect())
}

/// Soft checks that a near-optimal transversal of the two-arm sequence is
/// expected to pass. Violations are reported, never raised.
pub fn optimality_warnings(seq: &GridSequence2D, t: &Transversal2D) -> Result<Vec<String>> {
    use Component::*;
    let mut out = Vec::new();
    for (k, z) in t.z().iter().enumerate() {
        if z.y < -1.1 || z.x > 1.1 {
            out.push(format!(
                "z_{} = ({}, {}) leaves the half-planes y >= -1.1, x <= 1.1",
                k + 1,
                z.x,
                z.y
            ));
        }
    }
    let labels = classify(seq, t)?;
    for (k, &label) in labels.iter().enumerate() {
        if label == QNW || label == QSE {
            out.push(format!("a_{} visits {label}", k + 1));
        }
    }
    let forbidden = [
        (QNW, N),
        (N, QNE),
        (QSW, S),
        (S, QSE),
        (W, E),
        (QNW, W),
        (W, QSW),
        (QNE, E),
        (E, QSE),
        (N, S),
        (E, W),
        (S, N),
    ];
    for j in jump_sequence(seq, t)? {
        if forbidden.contains(&(j.from, j.to)) {
            out.push(format!("jump {} -> {} at index {}", j.from, j.to, j.index));
        }
    }
    Ok(out)
}
