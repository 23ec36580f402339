//! Inputs shared by the benchmarks.

use std::f64::consts::PI;

use cvtda_core::PointCloud;

/// `n` points on a unit circle, the workload used throughout the benches.
pub fn circle(n: usize) -> PointCloud {
    let rows: Vec<[f64; 2]> = (0..n)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / n as f64;
            [t.cos(), t.sin()]
        })
        .collect();
    PointCloud::from_rows(&rows).expect("finite")
}
