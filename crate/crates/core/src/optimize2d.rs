//! Numerical search for low-diameter planar transversals.
//!
//! Results are the best found, not certified optima.
//!
//! Randomness comes from ChaCha8 (`rand_chacha`), seeded with
//! `seed_from_u64(seed)` and switched to stream `restart` for each restart,
//! so a run is reproducible on every platform and independent of how
//! restarts are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construct2d::{
    claim1_transversal, trivial_transversal, ConstructionParams, GridSequence2D,
};
use crate::error::{Error, Result};
use crate::geom2d::{
    diameter, nearest_point, Box2, Component, NormKind, Transversal2D, Vec2, MEMBER_TOL,
};

/// Candidate positions tried per move.
pub const SLATE_SIZE: usize = 16;
/// Required improvement for a move to be accepted.
pub const ACCEPT_MARGIN: f64 = 1e-12;
/// Perturbation radius at the first and last move.
pub const RADIUS_START: f64 = 1.0;
pub const RADIUS_END: f64 = 1e-4;
/// Half-width of the box around `i t` that random initial points are drawn from.
pub const RANDOM_INIT_SPREAD: f64 = 3.0;
/// Iterations of the subgradient method.
pub const SUBGRADIENT_ITERS: usize = 20_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialKind {
    #[default]
    Trivial,
    Claim1,
    Random,
}

impl std::str::FromStr for InitialKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trivial" => Ok(InitialKind::Trivial),
            "claim1" => Ok(InitialKind::Claim1),
            "random" => Ok(InitialKind::Random),
            other => Err(Error::Validation(format!(
                "unknown initial transversal {other:?}"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub restarts: usize,
    /// Moves per restart.
    pub iterations: usize,
    pub seed: u64,
    pub initial: InitialKind,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            restarts: 20,
            iterations: 10_000,
            seed: 0,
            initial: InitialKind::Trivial,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchOutcome {
    pub transversal: Transversal2D,
    pub diameter: f64,
    /// Restart that produced the result.
    pub restart: usize,
    /// Diameter of that restart at its start and after every sweep of `n - 1` moves.
    pub trace: Vec<f64>,
}

/// Per-coordinate moves with shrinking random perturbations, keeping only
/// strict improvements of the diameter. Restarts run in parallel and are
/// merged by (diameter, restart index).
pub fn local_search(
    seq: &GridSequence2D,
    norm: NormKind,
    cfg: &SearchConfig,
) -> Result<SearchOutcome> {
    let restarts = cfg.restarts.max(1);
    let shared = match cfg.initial {
        InitialKind::Trivial => Some(trivial_transversal(seq, norm)?),
        InitialKind::Claim1 => Some(claim1_start(seq)?),
        InitialKind::Random => None,
    };
    let runs: Vec<Result<SearchOutcome>> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(r as u64);
            let start = match &shared {
                Some(t) => t.clone(),
                None => random_start(seq, norm, &mut rng)?,
            };
            Ok(improve(seq, norm, start, cfg.iterations, &mut rng, r))
        })
        .collect();
    let mut best: Option<SearchOutcome> = None;
    for run in runs {
        let run = run?;
        if best.as_ref().is_none_or(|b| run.diameter < b.diameter) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn claim1_start(seq: &GridSequence2D) -> Result<Transversal2D> {
    let n = seq.n();
    if n.is_multiple_of(2) {
        return Err(Error::Validation(format!(
            "claim1 start needs n = 2m + 1, got n = {n}"
        )));
    }
    let t = claim1_transversal(ConstructionParams::new((n - 1) / 2)?)?;
    seq.verify(&t, MEMBER_TOL)?;
    Ok(t)
}

fn random_start(
    seq: &GridSequence2D,
    norm: NormKind,
    rng: &mut ChaCha8Rng,
) -> Result<Transversal2D> {
    let n = seq.n();
    let t = seq.step();
    let mut points = Vec::with_capacity(n + 1);
    points.push(Vec2::ZERO);
    for i in 1..n {
        let jitter = Vec2::new(
            rng.gen_range(-RANDOM_INIT_SPREAD..=RANDOM_INIT_SPREAD),
            rng.gen_range(-RANDOM_INIT_SPREAD..=RANDOM_INIT_SPREAD),
        );
        points.push(nearest_point(seq.set(i), t * i as f64 + jitter, norm)?);
    }
    points.push(seq.target());
    Ok(Transversal2D::new(points))
}

fn radius(k: usize, iterations: usize) -> f64 {
    if iterations <= 1 {
        return RADIUS_START;
    }
    let frac = k as f64 / (iterations - 1) as f64;
    RADIUS_START * (RADIUS_END / RADIUS_START).powf(frac)
}

/// Pairs of z-indices at distance within `ACCEPT_MARGIN` of the diameter.
fn critical_pairs(z: &[Vec2], d: f64, norm: NormKind) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for j in 0..z.len() {
        for k in j + 1..z.len() {
            if (z[j] - z[k]).norm(norm) >= d - ACCEPT_MARGIN {
                out.push((j, k));
            }
        }
    }
    out
}

fn improve(
    seq: &GridSequence2D,
    norm: NormKind,
    start: Transversal2D,
    iterations: usize,
    rng: &mut ChaCha8Rng,
    restart: usize,
) -> SearchOutcome {
    let n = seq.n();
    let mut a = start.points;
    let mut z: Vec<Vec2> = a.windows(2).map(|w| w[1] - w[0]).collect();
    let mut d = diameter(&z, norm);
    let mut critical = critical_pairs(&z, d, norm);
    let mut trace = vec![d];
    let sweep = (n - 1).max(1);
    let mut rest = Vec::with_capacity(z.len());
    for k in 0..iterations {
        if n < 2 {
            break;
        }
        let i = if k < n - 1 {
            k + 1
        } else {
            rng.gen_range(1..n)
        };
        let r = radius(k, iterations);
        let offsets: [Vec2; SLATE_SIZE] =
            std::array::from_fn(|_| Vec2::new(rng.gen_range(-r..=r), rng.gen_range(-r..=r)));
        // moving a_i only changes z_i and z_{i+1}, stored at i - 1 and i
        let touches = |(p, q): &(usize, usize)| [*p, *q].iter().any(|&x| x == i - 1 || x == i);
        if critical.iter().all(touches) {
            rest.clear();
            rest.extend(
                z.iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i - 1 && j != i)
                    .map(|(_, &v)| v),
            );
            let hull = convex_hull(&rest);
            let d_rest = diameter(&hull, norm);
            let mut best: Option<(f64, Vec2)> = None;
            let mid = (a[i - 1] + a[i + 1]) * 0.5;
            for (c, off) in offsets.into_iter().enumerate() {
                // half the slate perturbs a_i, half the midpoint of its neighbours
                let centre = if c % 2 == 0 { a[i] } else { mid };
                let Ok(q) = nearest_point(seq.set(i), centre + off, norm) else {
                    continue;
                };
                let (zi, zn) = (q - a[i - 1], a[i + 1] - q);
                let mut dn = d_rest.max((zi - zn).norm(norm));
                for &h in &hull {
                    dn = dn.max((zi - h).norm(norm)).max((zn - h).norm(norm));
                }
                if best.is_none_or(|(bd, _)| dn < bd) {
                    best = Some((dn, q));
                }
            }
            if let Some((dn, q)) = best {
                if dn < d - ACCEPT_MARGIN {
                    a[i] = q;
                    z[i - 1] = q - a[i - 1];
                    z[i] = a[i + 1] - q;
                    d = diameter(&z, norm);
                    critical = critical_pairs(&z, d, norm);
                }
            }
        }
        if (k + 1) % sweep == 0 || k + 1 == iterations {
            trace.push(d);
        }
    }
    SearchOutcome {
        transversal: Transversal2D::new(a),
        diameter: d,
        restart,
        trace,
    }
}

/// Vertices of the convex hull, counter-clockwise; collinear points dropped.
pub fn convex_hull(points: &[Vec2]) -> Vec<Vec2> {
    let mut p: Vec<Vec2> = points.to_vec();
    p.sort_by(|u, v| u.x.total_cmp(&v.x).then(u.y.total_cmp(&v.y)));
    p.dedup();
    if p.len() < 3 {
        return p;
    }
    let cross = |o: Vec2, a: Vec2, b: Vec2| (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    let mut hull: Vec<Vec2> = Vec::with_capacity(2 * p.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Vec2>> = if pass == 0 {
            Box::new(p.iter())
        } else {
            Box::new(p.iter().rev())
        };
        for &q in iter {
            while hull.len() >= start + 2
                && cross(hull[hull.len() - 2], hull[hull.len() - 1], q) <= 0.0
            {
                hull.pop();
            }
            hull.push(q);
        }
        hull.pop();
    }
    hull
}

/// Boxes selected by `pattern`, one per interior index.
fn pattern_boxes(seq: &GridSequence2D, pattern: &[Component]) -> Result<Vec<Box2>> {
    let n = seq.n();
    if pattern.len() + 1 != n {
        return Err(Error::Validation(format!(
            "pattern has {} labels, sequence has {} interior sets",
            pattern.len(),
            n.saturating_sub(1)
        )));
    }
    pattern
        .iter()
        .enumerate()
        .map(|(k, &label)| {
            let i = k + 1;
            seq.set(i)
                .boxes()
                .iter()
                .find(|b| b.label == Some(label))
                .copied()
                .ok_or_else(|| Error::InfeasiblePattern {
                    index: i,
                    detail: format!("A_{i} has no {label} component"),
                })
        })
        .collect()
}

/// Minimum diameter over transversals with `a_i` in the `pattern[i - 1]`
/// component of `A_i`, by projected subgradient descent with step
/// `c / sqrt(k)`.
pub fn assignment_search(
    seq: &GridSequence2D,
    pattern: &[Component],
    norm: NormKind,
) -> Result<Transversal2D> {
    let boxes = pattern_boxes(seq, pattern)?;
    let n = seq.n();
    let t = seq.step();
    let mut a: Vec<Vec2> = Vec::with_capacity(n + 1);
    a.push(Vec2::ZERO);
    a.extend(
        boxes
            .iter()
            .enumerate()
            .map(|(k, b)| b.clamp(t * (k + 1) as f64)),
    );
    a.push(seq.target());
    if n < 2 {
        return Ok(Transversal2D::new(a));
    }
    let mut best = (f64::INFINITY, a.clone());
    let mut z = vec![Vec2::ZERO; n];
    let mut grad = vec![Vec2::ZERO; n + 1];
    let mut c = 0.0;
    for k in 1..=SUBGRADIENT_ITERS {
        for j in 0..n {
            z[j] = a[j + 1] - a[j];
        }
        let (mut d, mut pair) = (-1.0, (0, 0));
        for j in 0..n {
            for l in j + 1..n {
                let v = (z[j] - z[l]).norm(norm);
                if v > d {
                    d = v;
                    pair = (j, l);
                }
            }
        }
        if d < best.0 {
            best = (d, a.clone());
        }
        if d <= 0.0 {
            break;
        }
        if k == 1 {
            c = d / 4.0;
        }
        let (j, l) = pair;
        let u = norm_gradient(z[j] - z[l], norm);
        grad.iter_mut().for_each(|g| *g = Vec2::ZERO);
        // z_j = a_{j+1} - a_j in 0-based storage
        grad[j + 1] = grad[j + 1] + u;
        grad[j] = grad[j] - u;
        grad[l + 1] = grad[l + 1] - u;
        grad[l] = grad[l] + u;
        let step = c / (k as f64).sqrt();
        for i in 1..n {
            a[i] = boxes[i - 1].clamp(a[i] - grad[i] * step);
        }
    }
    Ok(Transversal2D::new(best.1))
}

/// A subgradient of the norm at `v`, for `v != 0`.
fn norm_gradient(v: Vec2, norm: NormKind) -> Vec2 {
    match norm {
        NormKind::Euclidean => v * (1.0 / v.norm(norm)),
        NormKind::Maximum => {
            if v.x.abs() >= v.y.abs() {
                Vec2::new(v.x.signum(), 0.0)
            } else {
                Vec2::new(0.0, v.y.signum())
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Triangle {
    pub diameter: f64,
    pub z1: Vec2,
    pub zj: Vec2,
    pub zn: Vec2,
}

/// Smallest euclidean diameter of a triangle `z_1, z_j, z_n` with
/// `y_1 >= 1`, `x_j >= 1 - delta`, `y_j <= -1 + delta`, `x_n <= -1`.
///
/// All four constraints are active at the optimum, which leaves `x_1` and
/// `y_n` free; the diameter is jointly convex in them, so a coarse grid
/// followed by nested ternary search finds the minimum.
pub fn min_triangle_diameter(delta: f64) -> Result<Triangle> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::Validation(format!(
            "delta must lie in [0, 1), got {delta}"
        )));
    }
    let zj = Vec2::new(1.0 - delta, -1.0 + delta);
    let eval = |x1: f64, yn: f64| {
        let (z1, zn) = (Vec2::new(x1, 1.0), Vec2::new(-1.0, yn));
        diameter(&[z1, zj, zn], NormKind::Euclidean)
    };
    const SPAN: f64 = 3.0;
    const GRID: usize = 120;
    let h = 2.0 * SPAN / GRID as f64;
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for p in 0..=GRID {
        for q in 0..=GRID {
            let (x1, yn) = (-SPAN + p as f64 * h, -SPAN + q as f64 * h);
            let v = eval(x1, yn);
            if v < best.0 {
                best = (v, x1, yn);
            }
        }
    }
    let inner = |x1: f64| {
        let yn = ternary(|yn| eval(x1, yn), best.2 - h, best.2 + h);
        (eval(x1, yn), yn)
    };
    let x1 = ternary(|x1| inner(x1).0, best.1 - h, best.1 + h);
    let (diam, yn) = inner(x1);
    Ok(Triangle {
        diameter: diam,
        z1: Vec2::new(x1, 1.0),
        zj,
        zn: Vec2::new(-1.0, yn),
    })
}

fn ternary(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..100 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if f(m1) <= f(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    (lo + hi) / 2.0
}
