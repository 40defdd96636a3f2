//! Timing of the crossing search, for checking that it scales linearly with
//! the profile window.

use std::time::Instant;

use rand::Rng;
use serde::Serialize;

use crate::mixer::find_intersections;
use crate::profile::{ProfileConfig, RangeProfile};
use crate::seed::SeedKey;

pub const SPAN_BINS: usize = 512;

#[derive(Debug, Clone, Serialize)]
pub struct BenchResult {
    pub bins: usize,
    pub points: usize,
    pub iters: usize,
    pub mean_ns: f64,
    pub crossings: usize,
}

/// Two profiles of `points` components each, searched `iters` times. Returns
/// the mean wall time per search.
///
/// Components are spread over the same physical span (the first
/// [`SPAN_BINS`] bins) whatever the window, so the crossings stay the same
/// and only the window length changes between runs.
pub fn bench_find_intersections(bins: usize, points: usize, iters: usize, seed: u64) -> BenchResult {
    let cfg = ProfileConfig { window: bins, ..Default::default() };
    let mut rng = SeedKey::new("bench").u64(seed).rng();
    let make = |rng: &mut rand_chacha::ChaCha8Rng| {
        let mut p = RangeProfile::zeros(&cfg);
        for _ in 0..points {
            p.add_component(rng.random_range(0.0..(SPAN_BINS.min(bins) - 1) as f64));
        }
        p
    };
    let (a, b) = (make(&mut rng), make(&mut rng));
    let crossings = find_intersections(&a, &b, 1e-6).map(|x| x.len()).unwrap_or(0);
    // Warm up caches and branch predictors before timing.
    for _ in 0..iters.min(100) {
        std::hint::black_box(find_intersections(std::hint::black_box(&a), std::hint::black_box(&b), 1e-6).ok());
    }
    let start = Instant::now();
    for _ in 0..iters {
        std::hint::black_box(find_intersections(std::hint::black_box(&a), std::hint::black_box(&b), 1e-6).ok());
    }
    let mean_ns = start.elapsed().as_nanos() as f64 / iters.max(1) as f64;
    BenchResult { bins, points, iters, mean_ns, crossings }
}
