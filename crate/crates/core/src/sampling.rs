//! Deterministic low-discrepancy sample points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fields::{Chart, Point};
use crate::DIM;

const PRIMES: [u64; DIM] = [2, 3, 5, 7, 11, 13, 17];

/// Points kept this fraction away from each face of the chart.
const MARGIN: f64 = 0.05;

fn radical_inverse(mut n: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while n > 0 {
        out += (n % base) as f64 * inv;
        n /= base;
        inv /= base as f64;
    }
    out
}

/// `count` Halton points with a seeded Cranley–Patterson rotation, mapped
/// into the interior of the chart.
pub fn sample_points(chart: &Chart, count: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: [f64; DIM] = std::array::from_fn(|_| rng.random::<f64>());
    (1..=count as u64)
        .map(|n| {
            std::array::from_fn(|i| {
                let u = (radical_inverse(n, PRIMES[i]) + shift[i]).fract();
                let t = MARGIN + (1.0 - 2.0 * MARGIN) * u;
                chart.lo[i] + t * (chart.hi[i] - chart.lo[i])
            })
        })
        .collect()
}
