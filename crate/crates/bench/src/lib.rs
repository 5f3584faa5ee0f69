//! Fixtures shared by the benchmarks.

use modwave::{solve_wave, ModelSpec, SolverOptions, WaveProfile};

/// Gravity wave of amplitude `a` at carrier `kappa`, default truncation.
pub fn gravity_wave(kappa: f64, a: f64) -> WaveProfile {
    let spec = ModelSpec::fdch_surface(0.0).expect("T = 0 is valid");
    solve_wave(&spec, kappa, a, 0.0, &SolverOptions::default()).expect("small wave converges")
}
