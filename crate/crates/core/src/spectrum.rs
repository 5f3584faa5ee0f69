//! Spectral side: the rest-state dispersion relation, the 3×3 reduced
//! operator near the origin with its cubic discriminant Δ0, and a
//! Floquet-Fourier-Hill discretisation of the linearisation about a solved
//! wave.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix3, Schur};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispersion::DispersionSpec;
use crate::error::{ensure_finite, Error, Result};
use crate::expansion::fdch_expansion_coeffs;
use crate::indices::T_THIRD_TOL;
use crate::solver::WaveProfile;

pub const DEFAULT_HILL_MODES: usize = 96;
/// Eigenvalues within this radius of the origin count as modulational.
pub const WINDOW_RADIUS: f64 = 0.5;
pub const DEFAULT_XI_POINTS: usize = 200;
/// Relative size allowed for the parts of the cubic that must vanish.
pub const STRUCTURE_TOL: f64 = 1e-10;
/// Hill matrices are only built about profiles solved at least this well.
pub const PROFILE_RESIDUAL_TOL: f64 = 1e-10;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Rest-state eigenvalue `λ = i ω(n + ξ)` with `μ = n + ξ`.
pub fn omega(kappa: f64, tension: f64, mu: f64) -> Result<f64> {
    ensure_finite("mu", mu)?;
    ensure_finite("kappa", kappa)?;
    let s = DispersionSpec::water_wave(tension)?;
    Ok(mu * (s.speed(kappa) - s.speed(kappa * mu)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedMatrices {
    pub l: Matrix3<Complex64>,
    pub i: Matrix3<Complex64>,
    pub xi: f64,
    pub a: f64,
    pub kappa: f64,
    pub tension: f64,
}

/// The operator restricted to the three-dimensional generalised kernel,
/// in the basis continuing cos z, sin z and 1, through the orders
/// `ξ`, `a`, `ξa` and `ξ²`.
pub fn reduced_matrices(kappa: f64, tension: f64, xi: f64, a: f64) -> Result<ReducedMatrices> {
    ensure_finite("xi", xi)?;
    ensure_finite("a", a)?;
    if (tension - 1.0 / 3.0).abs() < T_THIRD_TOL {
        return Err(Error::UnsupportedParameter(format!(
            "T = {tension} is within {T_THIRD_TOL:e} of 1/3"
        )));
    }
    let coeffs = fdch_expansion_coeffs(kappa, tension)?;
    let p1 = coeffs.p1.ok_or(Error::SingularCoefficient {
        denominator: "18 - 5 kappa^2",
        value: (18.0 - 5.0 * kappa * kappa).abs(),
    })?;
    let jet = DispersionSpec::water_wave(tension)?.jet(kappa);
    let (c, dc, d2c) = (jet.c, jet.dc, jet.d2c);
    let k2 = kappa * kappa;

    let mut l = Matrix3::<Complex64>::zeros();
    l[(2, 1)] += a * (0.75 - 5.0 * k2 / 24.0);
    l[(0, 0)] += I * xi * (-kappa * dc);
    l[(1, 1)] += I * xi * (-kappa * dc);
    l[(2, 2)] += I * xi * (c - 1.0);
    l[(0, 2)] += I * xi * a * (-0.75 + 7.0 * k2 / 24.0 + 2.0 * p1 * (c - 1.0));
    l[(2, 0)] += I * xi * a * (-0.75 + 23.0 * k2 / 48.0 + p1 * (c - 1.0));
    let skew = xi * xi * (kappa * dc + 0.5 * k2 * d2c);
    l[(0, 1)] += skew;
    l[(1, 0)] -= skew;

    let mut id = Matrix3::<Complex64>::identity();
    id[(0, 2)] += 2.0 * a * p1;
    id[(2, 0)] += a * p1;

    Ok(ReducedMatrices {
        l,
        i: id,
        xi,
        a,
        kappa,
        tension,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicCoefficients {
    pub q0: f64,
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
}

impl CubicCoefficients {
    /// Discriminant of `q3 y³ − q2 y² − q1 y + q0`, which is the reduced
    /// characteristic polynomial under `λ = −iξy`; negative when it has a
    /// complex pair.
    pub fn discriminant(&self) -> f64 {
        let CubicCoefficients { q0, q1, q2, q3 } = *self;
        18.0 * q3 * q2 * q1 * q0 + q2 * q2 * q1 * q1 + 4.0 * q2.powi(3) * q0
            + 4.0 * q3 * q1.powi(3)
            - 27.0 * q3 * q3 * q0 * q0
    }
}

/// Coefficients of `det(L − λI) = p3 λ³ + i p2 λ² + p1 λ + i p0`, scaled to
/// `q_j = p_j / ξ^(3−j)`.
pub fn cubic_coefficients(rm: &ReducedMatrices) -> Result<CubicCoefficients> {
    if !(rm.xi != 0.0 && rm.xi.is_finite()) {
        return Err(Error::Argument(format!(
            "the cubic needs a nonzero Floquet exponent, got {}",
            rm.xi
        )));
    }
    let coef = char_poly(&rm.l, &rm.i);
    // the parts that must vanish, and the ones kept
    let scaled: Vec<Complex64> = (0..4).map(|j| coef[j] / rm.xi.powi(3 - j as i32)).collect();
    let kept = [scaled[0].im, scaled[1].re, scaled[2].im, scaled[3].re];
    let stray = [scaled[0].re, scaled[1].im, scaled[2].re, scaled[3].im];
    let scale = scaled.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let worst = stray.iter().map(|x| x.abs()).fold(0.0, f64::max);
    if !(worst <= STRUCTURE_TOL * scale) {
        return Err(Error::Structure(format!(
            "characteristic polynomial has a residue {:e} relative to its size",
            worst / scale
        )));
    }
    Ok(CubicCoefficients {
        q0: kept[0],
        q1: kept[1],
        q2: kept[2],
        q3: kept[3],
    })
}

/// Coefficients `[c0, c1, c2, c3]` of `det(a − λ b)` in powers of λ.
fn char_poly(a: &Matrix3<Complex64>, b: &Matrix3<Complex64>) -> [Complex64; 4] {
    let mut coef = [Complex64::new(0.0, 0.0); 4];
    // multilinear in the columns: take each from a or from −b
    for mask in 0u32..8 {
        let mut m = *a;
        for col in 0..3 {
            if mask & (1 << col) != 0 {
                m.set_column(col, &(-b.column(col)));
            }
        }
        coef[mask.count_ones() as usize] += m.determinant();
    }
    coef
}

/// Discriminant of the reduced cubic; negative values signal a complex pair
/// of eigenvalues and hence modulational instability.
pub fn delta0(kappa: f64, tension: f64, xi: f64, a: f64) -> Result<f64> {
    let rm = reduced_matrices(kappa, tension, xi, a)?;
    Ok(cubic_coefficients(&rm)?.discriminant())
}

/// Two-sided Fourier coefficients `f̂(k)`, `0 <= k <= kmax`, of an even
/// function given by its cosine series.
fn exp_coeffs(cos: &[f64], kmax: usize) -> Vec<f64> {
    (0..=kmax)
        .map(|k| match k {
            0 => cos.first().copied().unwrap_or(0.0),
            _ => cos.get(k).copied().unwrap_or(0.0) / 2.0,
        })
        .collect()
}

/// Cosine coefficients through `kmax` of `sqrt(1 + η) − 1`.
fn sqrt_coeffs(profile: &WaveProfile, kmax: usize) -> Result<Vec<f64>> {
    let points = (4 * (profile.modes + 1)).max(2 * kmax + 2).max(64);
    let mut vals = Vec::with_capacity(points);
    for j in 0..points {
        let eta = profile.eval(2.0 * PI * j as f64 / points as f64);
        if eta <= -1.0 {
            return Err(Error::NonlinearityDomain { min_eta: eta });
        }
        vals.push(eta / (1.0 + (1.0 + eta).sqrt()));
    }
    Ok((0..=kmax)
        .map(|k| {
            let sum: f64 = vals
                .iter()
                .enumerate()
                .map(|(j, v)| v * (2.0 * PI * (k * j) as f64 / points as f64).cos())
                .sum();
            if k == 0 {
                sum / points as f64
            } else {
                2.0 * sum / points as f64
            }
        })
        .collect())
}

/// Fourier matrix of the linearisation about `profile` on `e^{i(n+ξ)z}`,
/// `|n| <= m`; row/column index `n + m`.
pub fn hill_matrix(profile: &WaveProfile, xi: f64, m: usize) -> Result<DMatrix<Complex64>> {
    ensure_finite("xi", xi)?;
    if m == 0 {
        return Err(Error::Argument("Hill truncation must be positive".into()));
    }
    if !(profile.residual_norm <= PROFILE_RESIDUAL_TOL) {
        return Err(Error::Argument(format!(
            "profile residual {:e} exceeds {PROFILE_RESIDUAL_TOL:e}; solve the wave first",
            profile.residual_norm
        )));
    }
    let symbol = DispersionSpec::water_wave(profile.tension)?;
    let kappa = profile.kappa;
    let k2 = kappa * kappa;
    let eta = exp_coeffs(&profile.coeffs, 2 * m);
    let s = exp_coeffs(&sqrt_coeffs(profile, 2 * m)?, 2 * m);

    let dim = 2 * m + 1;
    let mi = m as i64;
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);
    for r in 0..dim {
        let n = r as i64 - mi;
        let nu = n as f64 + xi;
        for col in 0..dim {
            let mm = col as i64 - mi;
            let mu = mm as f64 + xi;
            let d = n - mm;
            let k = d.unsigned_abs() as usize;
            let df = d as f64;
            let mut v = -3.0 * s[k]
                + (5.0 / 12.0 * k2 * (mu * mu + df * df) + 13.0 / 24.0 * k2 * df * mu) * eta[k];
            if d == 0 {
                v += profile.c - symbol.speed(kappa * mu);
            }
            h[(r, col)] = I * nu * v;
        }
    }
    Ok(h)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HillSpectrum {
    pub xi: f64,
    #[serde(rename = "M")]
    pub modes: usize,
    pub eigenvalues: Vec<Complex64>,
    pub max_real: f64,
}

/// All eigenvalues of a dense complex matrix.
pub fn eigenvalues(h: DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    let dim = h.nrows();
    let schur = Schur::try_new(h, f64::EPSILON, 200 * dim.max(1))
        .ok_or_else(|| Error::Numerical("Schur iteration did not converge".into()))?;
    schur
        .eigenvalues()
        .map(|v| v.iter().copied().collect())
        .ok_or_else(|| Error::Numerical("Schur form is not triangular".into()))
}

pub fn hill_spectrum(profile: &WaveProfile, xi: f64, m: usize) -> Result<HillSpectrum> {
    hill_spectrum_in(profile, xi, m, WINDOW_RADIUS)
}

/// As [`hill_spectrum`] with a custom modulational window radius.
pub fn hill_spectrum_in(profile: &WaveProfile, xi: f64, m: usize, radius: f64) -> Result<HillSpectrum> {
    let eigenvalues = eigenvalues(hill_matrix(profile, xi, m)?)?;
    let max_real = eigenvalues
        .iter()
        .filter(|z| z.norm() <= radius)
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    if max_real == f64::NEG_INFINITY {
        return Err(Error::Numerical(format!(
            "no eigenvalue within {radius} of the origin"
        )));
    }
    Ok(HillSpectrum {
        xi,
        modes: m,
        eigenvalues,
        max_real,
    })
}

/// `points` uniform Floquet exponents in `(0, 1/2]`.
pub fn default_xi_grid(points: usize) -> Vec<f64> {
    (1..=points).map(|j| 0.5 * j as f64 / points as f64).collect()
}

/// Largest modulational growth rate over `xi_grid`, as `(ξ*, rate)`.
pub fn max_growth_rate(profile: &WaveProfile, xi_grid: &[f64], m: usize) -> Result<(f64, f64)> {
    if xi_grid.is_empty() || xi_grid.iter().any(|&x| !(x > 0.0 && x <= 0.5)) {
        return Err(Error::Argument("Floquet grid must lie in (0, 1/2]".into()));
    }
    let rates = xi_grid
        .par_iter()
        .map(|&xi| hill_spectrum(profile, xi, m).map(|s| (xi, s.max_real.max(0.0))))
        .collect::<Result<Vec<_>>>()?;
    Ok(rates
        .into_iter()
        .fold((xi_grid[0], 0.0), |best, r| if r.1 > best.1 { r } else { best }))
}
