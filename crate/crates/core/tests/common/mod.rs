//! Random instance generators shared by the integration tests.
#![allow(dead_code)]

use blockline::sets1d::ClosedSet1D;
use blockline::transversal1d::GridSequence1D;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const INF: f64 = f64::INFINITY;

/// Rounds to a multiple of `2^-bits`.
pub fn quantize(v: f64, bits: i32) -> f64 {
    let s = 2f64.powi(bits);
    (v * s).round() / s
}

fn q(v: f64, dyadic: bool) -> f64 {
    if dyadic {
        quantize(v, 6)
    } else {
        v
    }
}

/// A closed subset of the line meeting every closed interval of length 1.
///
/// With `dyadic` every parameter is a multiple of `2^-6` (periods of
/// `2^-4`), so sums and differences of moderate size stay exact.
pub fn dense_set(rng: &mut ChaCha8Rng, dyadic: bool) -> ClosedSet1D {
    let set = match rng.gen_range(0..5) {
        0 => {
            let period = if dyadic {
                rng.gen_range(4..=16) as f64 / 16.0
            } else {
                rng.gen_range(0.2..=1.0)
            };
            ClosedSet1D::lattice(q(rng.gen_range(-1.0..1.0), dyadic), period).unwrap()
        }
        1 => {
            // two interleaved lattices of period up to 2
            let period = if dyadic {
                rng.gen_range(17..=32) as f64 / 16.0
            } else {
                rng.gen_range(1.05..=2.0)
            };
            let o = q(rng.gen_range(-1.0..1.0), dyadic);
            ClosedSet1D::lattice(o, period)
                .unwrap()
                .union(ClosedSet1D::lattice(o + period / 2.0, period).unwrap())
        }
        2 => {
            // two rays joined by points with gaps at most 1
            let a = q(rng.gen_range(-6.0..2.0), dyadic);
            let mut pts = vec![];
            let mut x = a;
            let b = a + q(rng.gen_range(0.0..8.0), dyadic);
            while x < b {
                x += q(rng.gen_range(0.1..=1.0), dyadic).max(2f64.powi(-6));
                pts.push(x.min(b));
            }
            let mut s = ClosedSet1D::interval(-INF, a)
                .unwrap()
                .union(ClosedSet1D::interval(b, INF).unwrap());
            s = s.union(ClosedSet1D::points(pts).unwrap());
            s
        }
        3 => {
            // a sparse lattice with extra intervals filling a window
            let lat = ClosedSet1D::lattice(q(rng.gen_range(-1.0..1.0), dyadic), 1.0).unwrap();
            let c = q(rng.gen_range(-4.0..4.0), dyadic);
            lat.union(ClosedSet1D::interval(c, c + q(rng.gen_range(0.0..3.0), dyadic)).unwrap())
        }
        _ => {
            // three interleaved lattices of period 5/2
            let o = q(rng.gen_range(-1.0..1.0), dyadic);
            let d1 = q(rng.gen_range(0.75..=1.0), dyadic);
            let d2 = q(rng.gen_range(0.75..=1.0), dyadic);
            let mut s = ClosedSet1D::lattice(o, 2.5).unwrap();
            s = s.union(ClosedSet1D::lattice(o + d1, 2.5).unwrap());
            s = s.union(ClosedSet1D::lattice(o + d1 + d2, 2.5).unwrap());
            s.union(ClosedSet1D::point(q(rng.gen_range(-5.0..5.0), dyadic)).unwrap())
        }
    };
    assert!(
        set.is_unit_dense(),
        "generator produced a non-dense set: {set:?}"
    );
    set
}

/// `{0}, A_1, ..., A_{n-1}, {s}` with dense interior sets and `2 <= n <= max_n`.
pub fn dense_sequence(rng: &mut ChaCha8Rng, max_n: usize, dyadic: bool) -> GridSequence1D {
    let n = rng.gen_range(2..=max_n);
    let interior = (1..n).map(|_| dense_set(rng, dyadic)).collect();
    let s = q(rng.gen_range(-8.0..8.0), dyadic);
    GridSequence1D::from_interior(interior, s, true).unwrap()
}
