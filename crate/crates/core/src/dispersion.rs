//! Phase-speed symbols of the water-wave and Camassa-Holm dispersion relations.
//!
//! All quantities are dimensionless. The water-wave symbol is
//! `sqrt((1 + T k^2) tanh(k) / k)`, the Camassa-Holm symbol is the rational
//! approximation `(12 - k^2) / (12 + k^2)`. Both equal one at `k = 0` and are
//! even in `k`; negative wave numbers are accepted through the even extension.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

/// Below this |k| the factor `tanh(k)/k` and its derivatives are evaluated by
/// their Taylor series.
pub const SERIES_CROSSOVER: f64 = 1e-2;

/// Default tolerance for [`DispersionSpec::check_resonance`].
pub const RESONANCE_TOL: f64 = 1e-8;

/// Hard bound on the harmonic index searched for resonances.
pub const MAX_HARMONIC: u64 = 1_000_000;

// tanh(k)/k = sum_j TANHC[j] k^(2j), through k^10
const TANHC: [f64; 6] = [
    1.0,
    -1.0 / 3.0,
    2.0 / 15.0,
    -17.0 / 315.0,
    62.0 / 2835.0,
    -1382.0 / 155925.0,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymbolKind {
    WaterWave,
    CamassaHolm,
}

/// Which phase-speed symbol to evaluate, with its surface-tension coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionSpec {
    pub kind: SymbolKind,
    /// Surface-tension coefficient; ignored by the Camassa-Holm symbol.
    #[serde(rename = "T")]
    pub tension: f64,
}

/// Outcome of the non-resonance check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum Resonance {
    Clear,
    Resonant { n: u64 },
}

impl Resonance {
    pub fn is_clear(&self) -> bool {
        matches!(self, Resonance::Clear)
    }
}

/// Value and first two derivatives of a symbol at one wave number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolJet {
    pub c: f64,
    pub dc: f64,
    pub d2c: f64,
}

impl SymbolJet {
    /// `(k c)'`, the group speed.
    pub fn group_speed(&self, k: f64) -> f64 {
        self.c + k * self.dc
    }

    /// `(k c)''`.
    pub fn group_speed_slope(&self, k: f64) -> f64 {
        2.0 * self.dc + k * self.d2c
    }
}

impl DispersionSpec {
    pub fn water_wave(tension: f64) -> Result<Self> {
        if !(tension.is_finite() && tension >= 0.0) {
            return Err(Error::Domain(format!(
                "surface tension must be finite and nonnegative, got {tension}"
            )));
        }
        Ok(Self {
            kind: SymbolKind::WaterWave,
            tension,
        })
    }

    pub fn camassa_holm() -> Self {
        Self {
            kind: SymbolKind::CamassaHolm,
            tension: 0.0,
        }
    }

    pub fn phase_speed(&self, k: f64) -> Result<f64> {
        ensure_finite("wave number", k)?;
        Ok(self.speed(k))
    }

    pub fn phase_speed_deriv(&self, k: f64, order: u8) -> Result<f64> {
        ensure_finite("wave number", k)?;
        let jet = self.jet(k);
        match order {
            1 => Ok(jet.dc),
            2 => Ok(jet.d2c),
            _ => Err(Error::Argument(format!(
                "derivative order must be 1 or 2, got {order}"
            ))),
        }
    }

    /// `c(k) + k c'(k)`.
    pub fn group_speed(&self, k: f64) -> Result<f64> {
        ensure_finite("wave number", k)?;
        Ok(self.jet(k).group_speed(k))
    }

    /// Unchecked evaluation of the symbol.
    pub fn speed(&self, k: f64) -> f64 {
        let k = k.abs();
        match self.kind {
            SymbolKind::WaterWave => ((1.0 + self.tension * k * k) * tanhc(k)).sqrt(),
            SymbolKind::CamassaHolm => (12.0 - k * k) / (12.0 + k * k),
        }
    }

    /// Unchecked evaluation of the symbol and its first two derivatives.
    pub fn jet(&self, k: f64) -> SymbolJet {
        let sign = if k < 0.0 { -1.0 } else { 1.0 };
        let k = k.abs();
        let jet = match self.kind {
            SymbolKind::WaterWave => {
                let t = self.tension;
                let [f, df, d2f] = tanhc_jet(k);
                let w = 1.0 + t * k * k;
                let g = w * f;
                let dg = 2.0 * t * k * f + w * df;
                let d2g = 2.0 * t * f + 4.0 * t * k * df + w * d2f;
                let c = g.sqrt();
                SymbolJet {
                    c,
                    dc: dg / (2.0 * c),
                    d2c: (2.0 * g * d2g - dg * dg) / (4.0 * g * c),
                }
            }
            SymbolKind::CamassaHolm => {
                let s = 12.0 + k * k;
                SymbolJet {
                    c: (12.0 - k * k) / s,
                    dc: -48.0 * k / (s * s),
                    d2c: 48.0 * (3.0 * k * k - 12.0) / (s * s * s),
                }
            }
        };
        SymbolJet {
            dc: sign * jet.dc,
            ..jet
        }
    }

    /// True when the symbol is strictly monotone on `(0, inf)`.
    pub fn is_monotone(&self) -> bool {
        match self.kind {
            SymbolKind::CamassaHolm => true,
            SymbolKind::WaterWave => self.tension == 0.0 || self.tension >= 1.0 / 3.0,
        }
    }

    /// Reports whether `c(kappa) = c(n kappa)` within `tol` for some `n >= 2`.
    pub fn check_resonance(&self, kappa: f64, tol: f64) -> Result<Resonance> {
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::Domain(format!(
                "carrier wave number must be positive, got {kappa}"
            )));
        }
        if !(tol > 0.0) {
            return Err(Error::Argument(format!("tolerance must be positive, got {tol}")));
        }
        if self.is_monotone() {
            return Ok(Resonance::Clear);
        }
        // 0 < T < 1/3: c dips to a minimum and then grows without bound, so
        // past the minimiser c(n kappa) only increases with n.
        let (k_min, _) = phase_speed_minimum(self.tension)?;
        let c1 = self.speed(kappa);
        for n in 2..=MAX_HARMONIC {
            let kn = n as f64 * kappa;
            let cn = self.speed(kn);
            if (c1 - cn).abs() <= tol {
                return Ok(Resonance::Resonant { n });
            }
            if kn >= k_min && cn > c1 + tol {
                break;
            }
        }
        Ok(Resonance::Clear)
    }
}

/// Unique interior minimiser of the water-wave symbol for `0 < T < 1/3`.
///
/// Returns `(k_min, c(k_min))`.
pub fn phase_speed_minimum(tension: f64) -> Result<(f64, f64)> {
    if !(tension > 0.0 && tension < 1.0 / 3.0) {
        return Err(Error::Domain(format!(
            "the phase speed has an interior minimum only for 0 < T < 1/3, got T = {tension}"
        )));
    }
    let spec = DispersionSpec::water_wave(tension)?;
    let slope = |k: f64| spec.jet(k).dc;

    // c' < 0 just right of the origin and c' > 0 for large k
    let mut lo = 1e-6;
    while slope(lo) >= 0.0 {
        lo *= 0.5;
        if lo < 1e-300 {
            return Err(Error::Numerical("no descent near the origin".into()));
        }
    }
    let mut hi = 1.0;
    while slope(hi) <= 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Numerical("no ascent at large wave number".into()));
        }
    }
    while hi - lo > 1e-12 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if slope(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let k = 0.5 * (lo + hi);
    Ok((k, spec.speed(k)))
}

/// `tanh(k) / k` with the removable singularity at zero.
pub(crate) fn tanhc(k: f64) -> f64 {
    let k = k.abs();
    if k < SERIES_CROSSOVER {
        let u = k * k;
        TANHC.iter().rev().fold(0.0, |acc, &a| acc * u + a)
    } else {
        k.tanh() / k
    }
}

/// `tanh(k)/k` and its first two derivatives for `k >= 0`.
fn tanhc_jet(k: f64) -> [f64; 3] {
    if k < SERIES_CROSSOVER {
        let u = k * k;
        let mut f = 0.0;
        let mut df = 0.0;
        let mut d2f = 0.0;
        for (j, &a) in TANHC.iter().enumerate().rev() {
            f = f * u + a;
            if j > 0 {
                let jf = j as f64;
                df = df * u + 2.0 * jf * a;
                d2f = d2f * u + 2.0 * jf * (2.0 * jf - 1.0) * a;
            }
        }
        [f, k * df, d2f]
    } else {
        let th = k.tanh();
        let sech = 1.0 / k.cosh();
        let sech2 = sech * sech;
        let f = th / k;
        let df = sech2 / k - th / (k * k);
        let d2f = -2.0 * sech2 * th / k - 2.0 * sech2 / (k * k) + 2.0 * th / (k * k * k);
        [f, df, d2f]
    }
}
