//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always reach the output; exits nonzero on failure.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use blockline::blocks::{oracle_min_spread, partition, BlockInstance, DEFAULT_ORACLE_CAP};
use blockline::construct2d::{
    build_theorem3, claim1_transversal, jump_sequence, lift_1d, normalize, normalize_transversal,
    trivial_transversal, ConstructionParams, GridSequence2D, Jump,
};
use blockline::geom2d::{
    Box2, BoxUnionSet2D, Component, DensityProbe, NormKind, Transversal2D, Vec2,
};
use blockline::optimize2d::{local_search, min_triangle_diameter, InitialKind, SearchConfig};
use blockline::sets1d::ClosedSet1D;
use blockline::transversal1d::{
    find_window_offset, propagate, propagate_to, solve, GridSequence1D,
};
use common::{dense_sequence, quantize};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        match $cond {
            true => {}
            false => return Err(format!($($fmt)+)),
        }
    };
}

/// `4 sqrt(2 - sqrt 3)`, recomputed here rather than taken from the library.
fn bound() -> f64 {
    4.0 * (2.0 - 3f64.sqrt()).sqrt()
}

fn euclid(a: Vec2, b: Vec2) -> f64 {
    ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt()
}

/// Pairwise diameter of the consecutive differences, independent of the library.
fn z_diameter(points: &[Vec2]) -> f64 {
    let z: Vec<Vec2> = points
        .windows(2)
        .map(|w| Vec2::new(w[1].x - w[0].x, w[1].y - w[0].y))
        .collect();
    let mut d: f64 = 0.0;
    for i in 0..z.len() {
        for j in i + 1..z.len() {
            d = d.max(euclid(z[i], z[j]));
        }
    }
    d
}

fn within(limit: Duration, start: Instant) -> Outcome {
    let took = start.elapsed();
    if took <= limit {
        Ok(format!("{:.2?}", took))
    } else {
        Err(format!("took {:.2?}, limit {:.0?}", took, limit))
    }
}

fn c1_partition_exactness() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for k in 0..500 {
        let m = rng.gen_range(0..=20);
        let n = rng.gen_range(1..=6);
        let values: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..=1.0)).collect();
        let inst = BlockInstance::new(values.clone(), n).map_err(|e| e.to_string())?;
        let part = partition(&inst).map_err(|e| format!("instance {k}: {e}"))?;
        ensure!(
            part.boundaries.len() == n + 1,
            "instance {k}: {} boundaries",
            part.boundaries.len()
        );
        ensure!(
            part.boundaries[0] == 0 && part.boundaries[n] == m,
            "instance {k}: boundaries do not span"
        );
        let sizes: Vec<f64> = part
            .boundaries
            .windows(2)
            .map(|w| values[w[0]..w[1]].iter().sum())
            .collect();
        let spread = sizes.iter().cloned().fold(f64::MIN, f64::max)
            - sizes.iter().cloned().fold(f64::MAX, f64::min);
        ensure!(
            part.spread <= 1.0,
            "instance {k}: solver spread {}",
            part.spread
        );
        ensure!(
            spread <= 1.0 + 1e-12,
            "instance {k}: recomputed spread {spread}"
        );
        let (best, _) = oracle_min_spread(&inst, DEFAULT_ORACLE_CAP).map_err(|e| e.to_string())?;
        ensure!(
            best <= part.spread,
            "instance {k}: oracle {best} above solver {}",
            part.spread
        );
        worst = worst.max(part.spread);
    }
    within(Duration::from_secs(30), start).map(|t| format!("worst spread {worst:.6}, {t}"))
}

fn c2_tightness() -> Outcome {
    let inst = BlockInstance::new(vec![1.0, 1.0, 1.0], 2).map_err(|e| e.to_string())?;
    let part = partition(&inst).map_err(|e| e.to_string())?;
    ensure!(
        (part.spread - 1.0).abs() <= 1e-12,
        "blocks spread {}",
        part.spread
    );
    let seq = GridSequence1D::from_interior(vec![ClosedSet1D::integers()], 1.0, true)
        .map_err(|e| e.to_string())?;
    let t = solve(&seq, 1e-9).map_err(|e| e.to_string())?;
    let z: Vec<f64> = t.points.windows(2).map(|w| w[1] - w[0]).collect();
    let spread =
        z.iter().cloned().fold(f64::MIN, f64::max) - z.iter().cloned().fold(f64::MAX, f64::min);
    ensure!((spread - 1.0).abs() <= 1e-12, "lattice spread {spread}");
    Ok(format!(
        "blocks spread {}, lattice spread {spread}",
        part.spread
    ))
}

fn c3_covering() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for k in 0..200 {
        let seq = dense_sequence(&mut rng, 8, false);
        let h = rng.gen_range(1..=seq.n());
        let p = rng.gen_range(-10.0..10.0);
        let off = find_window_offset(&seq, p, h, 1e-9).map_err(|e| format!("sequence {k}: {e}"))?;
        let state = propagate_to(&seq, off.x_lo, off.x_hi, h).map_err(|e| e.to_string())?;
        let (l, r) = state
            .window(h)
            .ok_or(format!("sequence {k}: window {h} undefined"))?;
        ensure!(
            l <= p + 1e-12 && p <= r + 1e-12,
            "sequence {k}: {p} outside [{l}, {r}]"
        );
        let t = solve(&seq, 1e-9).map_err(|e| format!("sequence {k}: {e}"))?;
        t.verify(&seq).map_err(|e| format!("sequence {k}: {e}"))?;
        let z: Vec<f64> = t.points.windows(2).map(|w| w[1] - w[0]).collect();
        let spread =
            z.iter().cloned().fold(f64::MIN, f64::max) - z.iter().cloned().fold(f64::MAX, f64::min);
        ensure!(spread <= 1.0 + 1e-9, "sequence {k}: spread {spread}");
        worst = worst.max(spread);
    }
    Ok(format!("200 sequences, worst spread {worst:.12}"))
}

fn c4_monotone_windows() -> Outcome {
    // dyadic data keeps every sum exact, so the comparisons below are exact
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut checked = 0;
    let mut seq = dense_sequence(&mut rng, 10, true);
    for k in 0..10_000 {
        if k % 50 == 0 {
            seq = dense_sequence(&mut rng, 10, true);
        }
        let x = quantize(rng.gen_range(-4.0..4.0), 10);
        let y = x + quantize(rng.gen_range(0.0..2.0), 10);
        let a = propagate(&seq, x, x).map_err(|e| e.to_string())?;
        let b = propagate(&seq, y, y).map_err(|e| e.to_string())?;
        ensure!(
            a.blocked().is_none() && b.blocked().is_none(),
            "pair {k}: blocked window"
        );
        for i in 1..=seq.n() {
            let (la, ra) = a.window(i).unwrap();
            let (lb, rb) = b.window(i).unwrap();
            ensure!(
                la <= lb && ra <= rb,
                "pair {k}, i = {i}: [{la}, {ra}] vs [{lb}, {rb}] at x {x} < {y}"
            );
            ensure!(ra - la >= 1.0, "pair {k}, i = {i}: width {}", ra - la);
            checked += 1;
        }
    }
    Ok(format!("10000 pairs, {checked} window comparisons"))
}

fn c5_two_arm() -> Outcome {
    let start = Instant::now();
    for m in [2, 10, 100] {
        let p = ConstructionParams::new(m).map_err(|e| e.to_string())?;
        let seq = build_theorem3(p);
        let t = claim1_transversal(p).map_err(|e| e.to_string())?;
        seq.verify(&t, 0.0).map_err(|e| format!("m = {m}: {e}"))?;
        let d = z_diameter(&t.points);
        ensure!((d - bound()).abs() <= 1e-12, "m = {m}: diameter {d}");
        ensure!(
            (d - 2.070_552_360_8).abs() <= 1e-10,
            "m = {m}: diameter {d}"
        );
    }
    within(Duration::from_secs(1), start)
}

fn check_trivial(seq: &GridSequence2D, label: &str) -> Result<f64, String> {
    let t = trivial_transversal(seq, NormKind::Euclidean).map_err(|e| format!("{label}: {e}"))?;
    seq.verify(&t, 1e-9).map_err(|e| format!("{label}: {e}"))?;
    let n = seq.n() as f64;
    let s = seq.target();
    for (i, &a) in t.points.iter().enumerate() {
        let it = Vec2::new(s.x * i as f64 / n, s.y * i as f64 / n);
        ensure!(
            euclid(a, it) <= 1.0 + 1e-9,
            "{label}: |a_{i} - i t| = {}",
            euclid(a, it)
        );
    }
    let d = z_diameter(&t.points);
    ensure!(d <= 4.0 + 1e-9, "{label}: diameter {d}");
    Ok(d)
}

fn c6_trivial() -> Outcome {
    let mut worst: f64 = 0.0;
    for m in [2, 10, 50] {
        let seq = build_theorem3(ConstructionParams::new(m).unwrap());
        worst = worst.max(check_trivial(&seq, &format!("m = {m}"))?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for k in 0..100 {
        let seq = dense_sequence(&mut rng, 8, false);
        let lifted = lift_1d(&seq, Some((-60.0, 60.0))).map_err(|e| e.to_string())?;
        worst = worst.max(check_trivial(&lifted, &format!("lifted {k}"))?);
    }
    Ok(format!("worst diameter {worst:.6}"))
}

fn c7_empirical_lower_bound() -> Outcome {
    let start = Instant::now();
    let seq = build_theorem3(ConstructionParams::new(50).unwrap());
    let random = SearchConfig {
        restarts: 100,
        iterations: 2000,
        seed: 7,
        initial: InitialKind::Random,
    };
    let best = local_search(&seq, NormKind::Euclidean, &random).map_err(|e| e.to_string())?;
    seq.verify(&best.transversal, 1e-9)
        .map_err(|e| e.to_string())?;
    let d = z_diameter(&best.transversal.points);
    ensure!(d >= bound() - 0.05, "random restarts reached {d}");
    let claim = SearchConfig {
        restarts: 1,
        iterations: 2000,
        seed: 7,
        initial: InitialKind::Claim1,
    };
    let from_claim = local_search(&seq, NormKind::Euclidean, &claim).map_err(|e| e.to_string())?;
    let dc = z_diameter(&from_claim.transversal.points);
    ensure!(dc <= bound() + 1e-9, "two-arm start ended at {dc}");
    within(Duration::from_secs(300), start)
        .map(|t| format!("best random {d:.6}, two-arm start {dc:.12}, {t}"))
}

fn c8_triangle() -> Outcome {
    let start = Instant::now();
    let tri = min_triangle_diameter(0.0).map_err(|e| e.to_string())?;
    let r3 = 3f64.sqrt();
    ensure!(
        (tri.diameter - bound()).abs() <= 1e-4,
        "diameter {}",
        tri.diameter
    );
    let want = [
        (tri.z1, Vec2::new(2.0 * r3 - 3.0, 1.0)),
        (tri.zj, Vec2::new(1.0, -1.0)),
        (tri.zn, Vec2::new(-1.0, 3.0 - 2.0 * r3)),
    ];
    for (got, w) in want {
        ensure!(
            (got.x - w.x).abs() <= 1e-3 && (got.y - w.y).abs() <= 1e-3,
            "vertex {got:?}, expected {w:?}"
        );
    }
    within(Duration::from_secs(10), start).map(|t| format!("diameter {:.9}, {t}", tri.diameter))
}

/// Random box sequence and member transversal on a dyadic grid, with `n` a
/// power of two so that `i s / n` is exact.
fn dyadic_instance(rng: &mut ChaCha8Rng) -> (GridSequence2D, Transversal2D) {
    let n = 1usize << rng.gen_range(1..=5);
    let s = Vec2::new(
        quantize(rng.gen_range(-6.0..6.0), 4),
        quantize(rng.gen_range(-6.0..6.0), 4),
    );
    let mut interior = Vec::new();
    let mut points = vec![Vec2::ZERO];
    for _ in 1..n {
        let mut boxes = Vec::new();
        for _ in 0..rng.gen_range(1..4) {
            let x = quantize(rng.gen_range(-8.0..8.0), 4);
            let y = quantize(rng.gen_range(-8.0..8.0), 4);
            let w = quantize(rng.gen_range(0.0..3.0), 4);
            let h = quantize(rng.gen_range(0.0..3.0), 4);
            boxes.push(Box2::new((x, x + w), (y, y + h)));
        }
        let b = boxes[rng.gen_range(0..boxes.len())];
        points.push(b.clamp(Vec2::new(
            quantize(rng.gen_range(-9.0..9.0), 4),
            quantize(rng.gen_range(-9.0..9.0), 4),
        )));
        interior.push(BoxUnionSet2D::new(boxes).unwrap());
    }
    points.push(s);
    (
        GridSequence2D::from_interior(interior, s, false).unwrap(),
        Transversal2D::new(points),
    )
}

fn c9_normalization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for k in 0..100 {
        let (seq, t) = dyadic_instance(&mut rng);
        let norm_seq = normalize(&seq);
        let moved = normalize_transversal(&seq, &t);
        ensure!(
            norm_seq.target() == Vec2::ZERO,
            "instance {k}: target {:?}",
            norm_seq.target()
        );
        norm_seq
            .verify(&moved, 0.0)
            .map_err(|e| format!("instance {k}: {e}"))?;
        let (z, zs) = (t.z(), moved.z());
        for i in 0..z.len() {
            for j in 0..z.len() {
                ensure!(
                    z[i] - z[j] == zs[i] - zs[j],
                    "instance {k}: z_{i} - z_{j} changed"
                );
            }
        }
        let (d, ds) = (z_diameter(&t.points), z_diameter(&moved.points));
        ensure!(d == ds, "instance {k}: diameter {d} became {ds}");
        let n = zs.len() as f64;
        let mean = zs.iter().fold(Vec2::ZERO, |acc, &v| acc + v) * (1.0 / n);
        ensure!(
            mean.x.abs() <= 1e-9 && mean.y.abs() <= 1e-9,
            "instance {k}: mean {mean:?}"
        );
    }
    Ok("100 instances, exact agreement".into())
}

fn c10_jumps() -> Outcome {
    for m in [2, 10, 50] {
        let p = ConstructionParams::new(m).unwrap();
        let jumps = jump_sequence(&build_theorem3(p), &claim1_transversal(p).unwrap())
            .map_err(|e| e.to_string())?;
        let want = vec![Jump {
            index: m + 1,
            from: Component::N,
            to: Component::E,
        }];
        ensure!(jumps == want, "m = {m}: {jumps:?}");
    }
    Ok("single N -> E jump at m + 1 for m = 2, 10, 50".into())
}

fn main() {
    // the density certificate is part of every generated sequence's contract
    for m in [2, 5, 10, 50] {
        let seq = build_theorem3(ConstructionParams::new(m).unwrap());
        seq.check_density(NormKind::Euclidean, DensityProbe::default())
            .expect("construction is grid-like");
    }
    let criteria: [Criterion; 10] = [
        (1, "block partition exactness", c1_partition_exactness),
        (2, "tightness on the line", c2_tightness),
        (3, "covering windows", c3_covering),
        (4, "window monotonicity and width", c4_monotone_windows),
        (5, "two-arm transversal", c5_two_arm),
        (6, "nearest-point transversal", c6_trivial),
        (
            7,
            "empirical lower bound at m = 50",
            c7_empirical_lower_bound,
        ),
        (8, "triangle minimization", c8_triangle),
        (9, "normalization", c9_normalization),
        (10, "jump structure", c10_jumps),
    ];
    let mut failed = 0;
    for (id, name, run) in criteria {
        let outcome =
            catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS criterion {id:>2} {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {id:>2} {name}: {detail}");
            }
        }
    }
    println!("N/A  criterion 11 out-of-scope planar construction: documentation only");
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
