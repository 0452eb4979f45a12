//! Shared inputs for the benchmarks.

use torsion_lab::MaterialParameters;

/// Parameter set used by every benchmark.
pub fn reference_parameters() -> MaterialParameters {
    MaterialParameters {
        mu_macro: 1.0,
        lambda_macro: 1.0,
        mu_e: 2.0,
        lambda_e: 1.0,
        mu_micro: 2.0,
        lambda_micro: 1.0,
        mu_c: 0.5,
        mu: 1.0,
        a1: 0.2,
        a2: 0.3,
        a3: 1.0 / 7.0,
        a4: 0.4,
        lc: 1.0,
    }
}

/// `count` log-spaced values between `lo` and `hi`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}
