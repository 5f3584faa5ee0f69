//! Second-order small-amplitude expansions of the periodic traveling waves.
//!
//! A wave of carrier `kappa` with amplitude parameter `a` and integration
//! constant `b` is, to second order,
//!
//! ```text
//! eta(z) = b (1 - c(kappa)) + a cos z + a^2 (h0 + h2 cos 2z)
//! speed  = c(kappa) + b * c0_slope + a^2 c2
//! ```

use serde::{Deserialize, Serialize};

use crate::dispersion::{DispersionSpec, Resonance, RESONANCE_TOL};
use crate::error::{Error, Result};

/// Tolerance on the denominators `c(kappa) - 1` and `c(kappa) - c(2 kappa)`.
pub const DENOMINATOR_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Model {
    /// Full-dispersion Camassa-Holm equation for the surface displacement.
    #[serde(rename = "fdch_surface")]
    FdchSurface,
    /// Full-dispersion Camassa-Holm equation for the horizontal velocity.
    #[serde(rename = "fdch_velocity")]
    FdchVelocity,
    #[serde(rename = "camassa_holm")]
    CamassaHolm,
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::FdchSurface => "fdch_surface",
            Model::FdchVelocity => "fdch_velocity",
            Model::CamassaHolm => "camassa_holm",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub model: Model,
    #[serde(rename = "T")]
    pub tension: f64,
}

impl ModelSpec {
    pub fn new(model: Model, tension: f64) -> Result<Self> {
        if !(tension.is_finite() && tension >= 0.0) {
            return Err(Error::Domain(format!(
                "surface tension must be finite and nonnegative, got {tension}"
            )));
        }
        let tension = if model == Model::CamassaHolm { 0.0 } else { tension };
        Ok(Self { model, tension })
    }

    pub fn fdch_surface(tension: f64) -> Result<Self> {
        Self::new(Model::FdchSurface, tension)
    }

    pub fn fdch_velocity(tension: f64) -> Result<Self> {
        Self::new(Model::FdchVelocity, tension)
    }

    pub fn camassa_holm() -> Self {
        Self {
            model: Model::CamassaHolm,
            tension: 0.0,
        }
    }

    pub fn is_water_wave(&self) -> bool {
        self.model != Model::CamassaHolm
    }

    pub fn symbol(&self) -> DispersionSpec {
        match self.model {
            Model::CamassaHolm => DispersionSpec::camassa_holm(),
            _ => DispersionSpec {
                kind: crate::dispersion::SymbolKind::WaterWave,
                tension: self.tension,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionCoefficients {
    pub h0: f64,
    pub h2: f64,
    pub c2: f64,
    /// Eigenfunction correction; only defined for the surface equation.
    pub p1: Option<f64>,
    /// Derivative of the constant state with respect to `b` at `b = 0`.
    pub eta0_slope: f64,
    /// Derivative of the bifurcation speed with respect to `b` at `b = 0`.
    pub c0_slope: f64,
}

fn check_denominator(name: &'static str, value: f64) -> Result<()> {
    if value.abs() <= DENOMINATOR_TOL || !value.is_finite() {
        Err(Error::SingularCoefficient {
            denominator: name,
            value,
        })
    } else {
        Ok(())
    }
}

fn check_carrier(kappa: f64) -> Result<()> {
    if kappa.is_finite() && kappa > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "carrier wave number must be positive, got {kappa}"
        )))
    }
}

/// Expansion coefficients of the surface FDCH wave.
pub fn fdch_expansion_coeffs(kappa: f64, tension: f64) -> Result<ExpansionCoefficients> {
    check_carrier(kappa)?;
    let symbol = DispersionSpec::water_wave(tension)?;
    let c1 = symbol.speed(kappa);
    let c2k = symbol.speed(2.0 * kappa);
    check_denominator("c(kappa) - 1", c1 - 1.0)?;
    check_denominator("c(kappa) - c(2 kappa)", c1 - c2k)?;
    match symbol.check_resonance(kappa, RESONANCE_TOL)? {
        Resonance::Clear => {}
        Resonance::Resonant { n: 2 } => {
            return Err(Error::SingularCoefficient {
                denominator: "c(kappa) - c(2 kappa)",
                value: c1 - c2k,
            })
        }
        Resonance::Resonant { n } => return Err(Error::Resonant(n)),
    }

    let k2 = kappa * kappa;
    let h0 = (3.0 / 8.0 - 7.0 * k2 / 96.0) / (c1 - 1.0);
    let h2 = (3.0 / 8.0 - 11.0 * k2 / 32.0) / (c1 - c2k);
    let c2 = (1.5 - 5.0 * k2 / 12.0) * h0 + (0.75 - 0.5 * k2) * h2 - 3.0 / 32.0;

    let p1_denominator = 18.0 - 5.0 * k2;
    let p1 = if p1_denominator.abs() > DENOMINATOR_TOL {
        Some(
            (2.25 - 3.0 / 16.0 * (3.0 - 2.0 * k2) * (12.0 - 11.0 * k2) / (c1 - c2k))
                / p1_denominator,
        )
    } else {
        None
    };

    Ok(ExpansionCoefficients {
        h0,
        h2,
        c2,
        p1,
        eta0_slope: 1.0 - c1,
        c0_slope: (1.5 - 5.0 * k2 / 12.0) * (1.0 - c1),
    })
}

/// Expansion coefficients of the Camassa-Holm wave.
pub fn ch_expansion_coeffs(kappa: f64) -> Result<ExpansionCoefficients> {
    check_carrier(kappa)?;
    let symbol = DispersionSpec::camassa_holm();
    let c1 = symbol.speed(kappa);
    let c2k = symbol.speed(2.0 * kappa);
    check_denominator("c(kappa) - 1", c1 - 1.0)?;
    check_denominator("c(kappa) - c(2 kappa)", c1 - c2k)?;

    let k2 = kappa * kappa;
    let h0 = (36.0 - 7.0 * k2) / (96.0 * (c1 - 1.0));
    let h2 = (12.0 - 7.0 * k2) * c2k / (32.0 * (c1 - c2k));
    let c2 = c1 * ((36.0 - 7.0 * k2) / 24.0 * h0 + (12.0 - 7.0 * k2) / 16.0 * h2 - 3.0 / 32.0);
    Ok(ExpansionCoefficients {
        h0,
        h2,
        c2,
        p1: None,
        eta0_slope: 1.0 - c1,
        c0_slope: (1.5 - 7.0 * k2 / 24.0) * c1 * (1.0 - c1),
    })
}

pub fn expansion_coeffs(spec: &ModelSpec, kappa: f64) -> Result<ExpansionCoefficients> {
    match spec.model {
        Model::FdchSurface => fdch_expansion_coeffs(kappa, spec.tension),
        Model::CamassaHolm => ch_expansion_coeffs(kappa),
        Model::FdchVelocity => Err(Error::UnsupportedModel(
            "no closed-form expansion is available for the velocity equation".into(),
        )),
    }
}

/// Truncated cosine series through mode 2 and the matching wave speed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveExpansion {
    pub modes: [f64; 3],
    pub speed: f64,
}

impl WaveExpansion {
    pub fn eval(&self, z: f64) -> f64 {
        self.modes[0] + self.modes[1] * z.cos() + self.modes[2] * (2.0 * z).cos()
    }
}

pub fn wave_expansion(spec: &ModelSpec, kappa: f64, a: f64, b: f64) -> Result<WaveExpansion> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain("amplitude and b must be finite".into()));
    }
    let co = expansion_coeffs(spec, kappa)?;
    let c = spec.symbol().speed(kappa);
    Ok(WaveExpansion {
        modes: [b * co.eta0_slope + a * a * co.h0, a, a * a * co.h2],
        speed: c + b * co.c0_slope + a * a * co.c2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn fdch_h0_small_carrier_asymptote() {
        let k = 1e-3;
        let co = fdch_expansion_coeffs(k, 0.0).unwrap();
        assert_relative_eq!(co.h0 * k * k, -9.0 / 4.0, max_relative = 1e-4);
    }

    #[test]
    fn fdch_coefficients_at_two() {
        let co = fdch_expansion_coeffs(2.0, 0.0).unwrap();
        let c = DispersionSpec::water_wave(0.0).unwrap();
        let (c1, c2k) = (c.speed(2.0), c.speed(4.0));
        assert!(c1 - c2k > 0.0);
        // 3/8 - 11/8 = -1 over a positive denominator
        assert!(co.h2 < 0.0);
        assert_relative_eq!(co.h2, -1.0 / (c1 - c2k), max_relative = 1e-14);
        assert_relative_eq!(co.h0, (0.375 - 7.0 * 4.0 / 96.0) / (c1 - 1.0), max_relative = 1e-14);
        for v in [co.h0, co.h2, co.c2, co.p1.unwrap(), co.eta0_slope, co.c0_slope] {
            assert!(v.is_finite());
        }
    }

    #[test]
    fn p1_two_routes_agree() {
        // p1 = 2 h0 - 24 c2 / (18 - 5 kappa^2)
        for (k, t) in [(0.7, 0.0), (1.0, 0.0), (2.5, 0.0), (1.2, 0.6), (0.4, 2.0)] {
            let co = fdch_expansion_coeffs(k, t).unwrap();
            let other = 2.0 * co.h0 - 24.0 * co.c2 / (18.0 - 5.0 * k * k);
            assert_relative_eq!(co.p1.unwrap(), other, max_relative = 1e-10, epsilon = 1e-12);
        }
    }

    #[test]
    fn fdch_second_harmonic_resonance_is_singular() {
        let s = DispersionSpec::water_wave(0.1).unwrap();
        let f = |k: f64| s.speed(k) - s.speed(2.0 * k);
        let (mut lo, mut hi) = (0.5f64, 10.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(lo) * f(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let err = fdch_expansion_coeffs(0.5 * (lo + hi), 0.1).unwrap_err();
        assert!(matches!(
            err,
            Error::SingularCoefficient {
                denominator: "c(kappa) - c(2 kappa)",
                ..
            }
        ));
    }

    #[test]
    fn ch_h0_at_six_is_exact() {
        let co = ch_expansion_coeffs(6.0).unwrap();
        assert_relative_eq!(co.h0, 1.5, max_relative = 1e-14);
        assert!(co.p1.is_none());
    }

    #[test]
    fn ch_h2_vanishes() {
        let co = ch_expansion_coeffs((12.0f64 / 7.0).sqrt()).unwrap();
        assert!(co.h2.abs() < 1e-14);
    }

    #[test]
    fn ch_h0_small_carrier_asymptote() {
        let k = 1e-3;
        let co = ch_expansion_coeffs(k).unwrap();
        assert_relative_eq!(co.h0 * k * k, -9.0 / 4.0, max_relative = 1e-4);
    }

    #[test]
    fn velocity_model_is_rejected() {
        let spec = ModelSpec::fdch_velocity(0.0).unwrap();
        assert!(matches!(
            expansion_coeffs(&spec, 1.0),
            Err(Error::UnsupportedModel(_))
        ));
    }

    #[test]
    fn rest_state_and_constant_state() {
        let spec = ModelSpec::fdch_surface(0.3).unwrap();
        let w = wave_expansion(&spec, 1.3, 0.0, 0.0).unwrap();
        assert_eq!(w.modes, [0.0, 0.0, 0.0]);
        assert_eq!(w.speed, spec.symbol().speed(1.3));

        let b = 1e-3;
        let w = wave_expansion(&spec, 1.3, 0.0, b).unwrap();
        let c = spec.symbol().speed(1.3);
        assert_relative_eq!(w.modes[0], b * (1.0 - c), max_relative = 1e-14);
        assert_eq!(w.modes[1], 0.0);
        assert_eq!(w.modes[2], 0.0);
        let k2 = 1.3f64 * 1.3;
        assert_relative_eq!(
            w.speed,
            c + b * (1.5 - 5.0 * k2 / 12.0) * (1.0 - c),
            max_relative = 1e-14
        );
    }

    #[test]
    fn coefficients_are_continuous_in_carrier() {
        let h = 1e-7;
        for k in [0.3, 0.9, 1.7, 2.6] {
            let a = fdch_expansion_coeffs(k, 0.0).unwrap();
            let b = fdch_expansion_coeffs(k + h, 0.0).unwrap();
            for (x, y) in [(a.h0, b.h0), (a.h2, b.h2), (a.c2, b.c2)] {
                assert!((x - y).abs() < 1e-4 * (1.0 + x.abs()));
            }
        }
    }
}
