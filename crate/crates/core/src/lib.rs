//! Small-amplitude periodic traveling waves of the full-dispersion
//! Camassa-Holm family: existence expansions, modulational instability
//! indices, critical wave numbers, stability diagrams and a Floquet-Hill
//! spectral cross-check.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagram;
pub mod dispersion;
pub mod error;
pub mod expansion;
pub mod indices;
pub mod solver;
pub mod spectrum;
pub mod validation;

pub use dispersion::{phase_speed_minimum, DispersionSpec, Resonance, SymbolKind};
pub use error::{Error, Result};
pub use expansion::{
    ch_expansion_coeffs, expansion_coeffs, fdch_expansion_coeffs, wave_expansion,
    ExpansionCoefficients, Model, ModelSpec, WaveExpansion,
};
pub use solver::{evaluate_profile, galerkin_residual, solve_wave, SolverOptions, WaveProfile};
pub use indices::{
    critical_wavenumbers, delta, index_components, strong_tension_limit, Classification,
    CriticalRoot, Factor, Flag, IndexComponents, IndexReport, TensionLimit,
};
pub use spectrum::{
    cubic_coefficients, delta0, hill_matrix, hill_spectrum, max_growth_rate, omega,
    reduced_matrices, CubicCoefficients, HillSpectrum, ReducedMatrices,
};
