//! Fourier-Galerkin Newton solver for even periodic traveling waves of the
//! surface FDCH equation.
//!
//! The unknowns are the cosine coefficients `eta_0..eta_N` and the speed `c`.
//! The N+1 cosine projections of the profile equation are closed by the
//! normalization `eta_1 = a`, which fixes the translation invariance and
//! selects the amplitude parameter of the small-amplitude family.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dispersion::{DispersionSpec, Resonance, RESONANCE_TOL};
use crate::error::{Error, Result};
use crate::expansion::{wave_expansion, Model, ModelSpec};

pub const DEFAULT_MODES: usize = 64;
pub const MIN_MODES: usize = 16;

/// Ratio of the nonlinear high-mode coupling to the dispersive gap above
/// which a mode is not resolved.
pub const BAND_RATIO: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    /// Cosine truncation N.
    pub modes: usize,
    /// Converged once the max-norm of the residual drops below this.
    pub tol: f64,
    /// Converged once the relative Newton step drops below this.
    pub step_tol: f64,
    pub max_iter: usize,
    /// Maximum number of amplitude continuation steps after a direct failure.
    pub max_continuation: usize,
    pub amplitude_cap: f64,
    pub b_cap: f64,
    /// See [`resolvable_modes`].
    pub band_ratio: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            modes: DEFAULT_MODES,
            tol: 1e-12,
            step_tol: 1e-14,
            max_iter: 50,
            max_continuation: 8,
            amplitude_cap: 0.1,
            b_cap: 0.1,
            band_ratio: BAND_RATIO,
        }
    }
}

impl SolverOptions {
    pub fn with_modes(modes: usize) -> Self {
        Self {
            modes,
            ..Self::default()
        }
    }
}

/// Even 2pi-periodic profile `eta(z) = sum coeffs[n] cos(n z)` with its speed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveProfile {
    pub kappa: f64,
    #[serde(rename = "T")]
    pub tension: f64,
    pub b: f64,
    pub a: f64,
    #[serde(rename = "N")]
    pub modes: usize,
    pub c: f64,
    pub coeffs: Vec<f64>,
    pub residual_norm: f64,
}

impl WaveProfile {
    /// Wraps arbitrary coefficients, e.g. an expansion, and records the
    /// Galerkin residual they leave.
    pub fn trial(
        kappa: f64,
        tension: f64,
        b: f64,
        a: f64,
        coeffs: Vec<f64>,
        c: f64,
    ) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::Argument("a profile needs at least modes 0 and 1".into()));
        }
        let mut profile = Self {
            kappa,
            tension,
            b,
            a,
            modes: coeffs.len() - 1,
            c,
            coeffs,
            residual_norm: f64::INFINITY,
        };
        let r = galerkin_residual(&profile)?;
        profile.residual_norm = max_abs(&r);
        Ok(profile)
    }

    /// The rest state `eta = 0`, `c = c(kappa)`.
    pub fn rest(kappa: f64, tension: f64, modes: usize) -> Result<Self> {
        let c = DispersionSpec::water_wave(tension)?.phase_speed(kappa)?;
        Self::trial(kappa, tension, 0.0, 0.0, vec![0.0; modes + 1], c)
    }

    pub fn eval(&self, z: f64) -> f64 {
        evaluate_profile(self, z)
    }

    /// Minimum of the profile on a uniform grid of `points` samples.
    pub fn grid_min(&self, points: usize) -> f64 {
        (0..points)
            .map(|j| self.eval(2.0 * PI * j as f64 / points as f64))
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn evaluate_profile(profile: &WaveProfile, z: f64) -> f64 {
    profile
        .coeffs
        .iter()
        .enumerate()
        .map(|(n, &a)| a * (n as f64 * z).cos())
        .sum()
}

/// Residual rows of the discretized profile equation: cosine projections
/// 0..=N followed by the amplitude row `coeffs[1] - a`.
pub fn galerkin_residual(profile: &WaveProfile) -> Result<Vec<f64>> {
    let g = Galerkin::new(profile.kappa, profile.tension, profile.b, profile.a, profile.modes)?;
    g.residual(&profile.coeffs, profile.c)
}

/// Number of cosine modes the profile equation resolves at amplitude `a`.
///
/// The term `(5/12) kappa^2 eta eta_zz` couples mode n to modes n +- 1 with
/// strength about `(5/24) kappa^2 |a| n^2`, while the dispersive part acts on
/// it with `|c(n kappa) - c(kappa)|`. Once the coupling exceeds
/// `ratio` times the gap the mode expansion of the wave stops decaying
/// (its amplitude series is only asymptotic) and the truncated Galerkin
/// system picks up spurious non-decaying tails, so the band is cut at the
/// first such mode. Never fewer than the two modes of the expansion.
pub fn resolvable_modes(kappa: f64, tension: f64, a: f64, ratio: f64, max_modes: usize) -> usize {
    let symbol = DispersionSpec {
        kind: crate::dispersion::SymbolKind::WaterWave,
        tension,
    };
    let c1 = symbol.speed(kappa);
    let coupling = 5.0 / 24.0 * kappa * kappa * a.abs();
    let mut n = 2;
    while n < max_modes {
        let m = (n + 1) as f64;
        let gap = (symbol.speed(m * kappa) - c1).abs();
        if coupling * m * m > ratio * gap {
            break;
        }
        n += 1;
    }
    n.min(max_modes)
}

/// Solves for the wave of amplitude `a` and integration constant `b`.
///
/// `opts.modes` is an upper bound on the truncation; the profile carries the
/// [`resolvable_modes`] band.
pub fn solve_wave(
    spec: &ModelSpec,
    kappa: f64,
    a: f64,
    b: f64,
    opts: &SolverOptions,
) -> Result<WaveProfile> {
    solve_wave_traced(spec, kappa, a, b, opts).map(|(p, _)| p)
}

/// Like [`solve_wave`], also returning the residual norm before each Newton
/// step of the final (full-amplitude) solve.
pub fn solve_wave_traced(
    spec: &ModelSpec,
    kappa: f64,
    a: f64,
    b: f64,
    opts: &SolverOptions,
) -> Result<(WaveProfile, Vec<f64>)> {
    if spec.model != Model::FdchSurface {
        return Err(Error::UnsupportedModel(format!(
            "only fdch_surface waves are solved numerically, got {}",
            spec.model.name()
        )));
    }
    if opts.modes < MIN_MODES {
        return Err(Error::Argument(format!(
            "truncation must be at least {MIN_MODES}, got {}",
            opts.modes
        )));
    }
    if !(a.is_finite() && a.abs() <= opts.amplitude_cap) {
        return Err(Error::Domain(format!(
            "|a| must not exceed {}, got {a}",
            opts.amplitude_cap
        )));
    }
    if !(b.is_finite() && b.abs() <= opts.b_cap) {
        return Err(Error::Domain(format!("|b| must not exceed {}, got {b}", opts.b_cap)));
    }
    if let Resonance::Resonant { n } = spec.symbol().check_resonance(kappa, RESONANCE_TOL)? {
        return Err(Error::Resonant(n));
    }

    let modes = resolvable_modes(kappa, spec.tension, a, opts.band_ratio, opts.modes);
    let guess = |amp: f64| -> Result<DVector<f64>> {
        let w = wave_expansion(spec, kappa, amp, b)?;
        let mut x = DVector::zeros(modes + 2);
        x.as_mut_slice()[..3].copy_from_slice(&w.modes);
        x[modes + 1] = w.speed;
        Ok(x)
    };

    let direct = Galerkin::new(kappa, spec.tension, b, a, modes)?;
    let first = direct.newton(guess(a)?, opts);
    let (x, history) = match first {
        Ok(out) => out,
        Err(err) if err.is_numerical() || matches!(err, Error::NonlinearityDomain { .. }) => {
            continuation(spec, kappa, a, b, modes, opts, guess(0.0)?)?
        }
        Err(err) => return Err(err),
    };

    let coeffs = x.as_slice()[..=modes].to_vec();
    let c = x[modes + 1];
    let residual_norm = *history.last().unwrap_or(&f64::INFINITY);
    let profile = WaveProfile {
        kappa,
        tension: spec.tension,
        b,
        a,
        modes,
        c,
        coeffs,
        residual_norm,
    };
    Ok((profile, history))
}

fn continuation(
    spec: &ModelSpec,
    kappa: f64,
    a: f64,
    b: f64,
    modes: usize,
    opts: &SolverOptions,
    start: DVector<f64>,
) -> Result<(DVector<f64>, Vec<f64>)> {
    let mut x = start;
    let mut reached = 0.0;
    let mut step = a / 4.0;
    let mut last_err = Error::Convergence {
        iterations: 0,
        residual: f64::INFINITY,
    };
    for _ in 0..opts.max_continuation {
        let target = if (a - reached).abs() <= step.abs() { a } else { reached + step };
        let g = Galerkin::new(kappa, spec.tension, b, target, modes)?;
        let mut trial = x.clone();
        trial[1] = target;
        match g.newton(trial, opts) {
            Ok((xn, hist)) => {
                x = xn;
                reached = target;
                if target == a {
                    return Ok((x, hist));
                }
            }
            Err(e) => {
                last_err = e;
                step *= 0.5;
            }
        }
    }
    Err(last_err)
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Pseudospectral discretization on a zero-padded grid of 4(N+1) points.
struct Galerkin {
    kappa: f64,
    b: f64,
    a: f64,
    n: usize,
    points: usize,
    /// c(n kappa; T) for n = 0..=N.
    multiplier: Vec<f64>,
    /// cos(n z_j), row-major in j.
    cos: Vec<f64>,
    sin: Vec<f64>,
}

struct Fields {
    eta: Vec<f64>,
    eta_z: Vec<f64>,
    eta_zz: Vec<f64>,
}

impl Galerkin {
    fn new(kappa: f64, tension: f64, b: f64, a: f64, n: usize) -> Result<Self> {
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::Domain(format!(
                "carrier wave number must be positive, got {kappa}"
            )));
        }
        let symbol = DispersionSpec::water_wave(tension)?;
        let points = 4 * (n + 1);
        let mut cos = Vec::with_capacity(points * (n + 1));
        let mut sin = Vec::with_capacity(points * (n + 1));
        for j in 0..points {
            for m in 0..=n {
                // exact index reduction keeps the tables symmetric
                let phase = 2.0 * PI * ((m * j) % points) as f64 / points as f64;
                cos.push(phase.cos());
                sin.push(phase.sin());
            }
        }
        Ok(Self {
            kappa,
            b,
            a,
            n,
            points,
            multiplier: (0..=n).map(|m| symbol.speed(m as f64 * kappa)).collect(),
            cos,
            sin,
        })
    }

    fn fields(&self, coeffs: &[f64]) -> Result<Fields> {
        let np = self.n + 1;
        let mut eta = vec![0.0; self.points];
        let mut eta_z = vec![0.0; self.points];
        let mut eta_zz = vec![0.0; self.points];
        for j in 0..self.points {
            let (cr, sr) = (&self.cos[j * np..(j + 1) * np], &self.sin[j * np..(j + 1) * np]);
            let (mut e, mut ez, mut ezz) = (0.0, 0.0, 0.0);
            for (m, &am) in coeffs.iter().enumerate().take(np) {
                let mf = m as f64;
                e += am * cr[m];
                ez -= mf * am * sr[m];
                ezz -= mf * mf * am * cr[m];
            }
            eta[j] = e;
            eta_z[j] = ez;
            eta_zz[j] = ezz;
        }
        let min_eta = eta.iter().cloned().fold(f64::INFINITY, f64::min);
        if min_eta <= -1.0 || !min_eta.is_finite() {
            return Err(Error::NonlinearityDomain { min_eta });
        }
        Ok(Fields { eta, eta_z, eta_zz })
    }

    /// Cosine coefficients 0..=N of grid data.
    fn project(&self, f: &[f64], out: &mut [f64]) {
        let np = self.n + 1;
        out.iter_mut().for_each(|o| *o = 0.0);
        for (j, &fj) in f.iter().enumerate() {
            let cr = &self.cos[j * np..(j + 1) * np];
            for (o, &c) in out.iter_mut().zip(cr) {
                *o += fj * c;
            }
        }
        let scale = 1.0 / self.points as f64;
        out[0] *= scale;
        for o in out.iter_mut().skip(1) {
            *o *= 2.0 * scale;
        }
    }

    fn residual(&self, coeffs: &[f64], c: f64) -> Result<Vec<f64>> {
        if coeffs.len() != self.n + 1 {
            return Err(Error::Argument(format!(
                "expected {} coefficients, got {}",
                self.n + 1,
                coeffs.len()
            )));
        }
        let f = self.fields(coeffs)?;
        let k2 = self.kappa * self.kappa;
        let rhs = (1.0 - c) * (1.0 - c) * self.b;
        let nonlinear: Vec<f64> = (0..self.points)
            .map(|j| {
                let e = f.eta[j];
                // 2(1+e)^{3/2} - 2 - 3e, kept apart from the linear part
                let power = 2.0 * (1.0 + e).powf(1.5) - 2.0 - 3.0 * e;
                power + 5.0 / 12.0 * k2 * e * f.eta_zz[j] + 13.0 / 48.0 * k2 * f.eta_z[j] * f.eta_z[j]
                    - rhs
            })
            .collect();
        let mut r = vec![0.0; self.n + 2];
        self.project(&nonlinear, &mut r[..=self.n]);
        for m in 0..=self.n {
            r[m] += (self.multiplier[m] - c) * coeffs[m];
        }
        r[self.n + 1] = coeffs[1] - self.a;
        Ok(r)
    }

    /// Analytic Jacobian with respect to (coeffs, c).
    fn jacobian(&self, coeffs: &[f64], c: f64) -> Result<DMatrix<f64>> {
        let np = self.n + 1;
        let f = self.fields(coeffs)?;
        let k2 = self.kappa * self.kappa;
        let pa: Vec<f64> = (0..self.points)
            .map(|j| 3.0 * (1.0 + f.eta[j]).sqrt() - 3.0 + 5.0 / 12.0 * k2 * f.eta_zz[j])
            .collect();
        let pb: Vec<f64> = f.eta.iter().map(|e| -5.0 / 12.0 * k2 * e).collect();
        let pc: Vec<f64> = f.eta_z.iter().map(|e| -13.0 / 24.0 * k2 * e).collect();

        let mut jac = DMatrix::zeros(self.n + 2, self.n + 2);
        let mut col = vec![0.0; self.points];
        let mut proj = vec![0.0; np];
        for m in 0..np {
            let mf = m as f64;
            for j in 0..self.points {
                let cm = self.cos[j * np + m];
                let sm = self.sin[j * np + m];
                col[j] = (pa[j] + mf * mf * pb[j]) * cm + mf * pc[j] * sm;
            }
            self.project(&col, &mut proj);
            for n in 0..np {
                jac[(n, m)] = proj[n];
            }
            jac[(m, m)] += self.multiplier[m] - c;
        }
        for n in 0..np {
            jac[(n, np)] = -coeffs[n];
        }
        jac[(0, np)] += 2.0 * (1.0 - c) * self.b;
        jac[(np, 1)] = 1.0;
        Ok(jac)
    }

    fn newton(&self, mut x: DVector<f64>, opts: &SolverOptions) -> Result<(DVector<f64>, Vec<f64>)> {
        let np = self.n + 1;
        let mut history = Vec::new();
        let mut last = f64::INFINITY;
        for _ in 0..=opts.max_iter {
            let r = self.residual(&x.as_slice()[..np], x[np])?;
            last = max_abs(&r);
            history.push(last);
            if last <= opts.tol {
                return Ok((x, history));
            }
            if history.len() > opts.max_iter {
                break;
            }
            let jac = self.jacobian(&x.as_slice()[..np], x[np])?;
            let rhs = -DVector::from_vec(r);
            let dx = jac
                .lu()
                .solve(&rhs)
                .ok_or_else(|| Error::Numerical("singular Galerkin Jacobian".into()))?;
            x += &dx;
            let scale = x.amax().max(1.0);
            if dx.amax() <= opts.step_tol * scale {
                let r = self.residual(&x.as_slice()[..np], x[np])?;
                last = max_abs(&r);
                history.push(last);
                return Ok((x, history));
            }
        }
        Err(Error::Convergence {
            iterations: opts.max_iter,
            residual: last,
        })
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    fn surface(t: f64) -> ModelSpec {
        ModelSpec::fdch_surface(t).unwrap()
    }

    fn expansion_profile(kappa: f64, t: f64, a: f64, b: f64, n: usize) -> WaveProfile {
        let w = wave_expansion(&surface(t), kappa, a, b).unwrap();
        let mut coeffs = vec![0.0; n + 1];
        coeffs[..3].copy_from_slice(&w.modes);
        WaveProfile::trial(kappa, t, b, a, coeffs, w.speed).unwrap()
    }

    #[test]
    fn zero_profile_has_zero_residual() {
        let mut p = WaveProfile::rest(2.0, 0.0, 16).unwrap();
        p.c = 0.37;
        p.a = 0.01;
        let r = galerkin_residual(&p).unwrap();
        assert!(r[..17].iter().all(|&x| x == 0.0));
        assert_eq!(r[17], -0.01);
    }

    #[test]
    fn constant_state_residual_is_second_order() {
        let kappa = 1.2;
        let res = |b: f64| {
            let p = expansion_profile(kappa, 0.0, 0.0, b, 16);
            let r = galerkin_residual(&p).unwrap();
            max_abs(&r)
        };
        let (r1, r2) = (res(1e-3), res(5e-4));
        assert!(r1 < 1e-5, "{r1}");
        let ratio = r1 / r2;
        assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn expansion_residual_is_third_order() {
        let res = |kappa: f64, a: f64| {
            max_abs(&galerkin_residual(&expansion_profile(kappa, 0.0, a, 0.0, 32)).unwrap())
        };
        assert!(res(1.0, 1e-2) <= 10.0 * 1e-6);
        // the kappa = 2 constant is about 28.7
        let r = res(2.0, 1e-2);
        assert!(r <= 30.0 * 1e-6, "{r}");
        let ratio = r / res(2.0, 5e-3);
        assert!((7.0..9.0).contains(&ratio), "ratio {ratio}");
        let order = (res(2.0, 5e-3) / res(2.0, 2.5e-3)).log2();
        assert!(order >= 2.7, "order {order}");
    }

    #[test]
    fn rest_state_needs_no_newton_step() {
        let (p, hist) = solve_wave_traced(&surface(0.0), 2.0, 0.0, 0.0, &SolverOptions::default()).unwrap();
        assert_eq!(hist.len(), 1);
        assert!(p.coeffs.iter().all(|&x| x == 0.0));
        assert_eq!(p.c, DispersionSpec::water_wave(0.0).unwrap().speed(2.0));
    }

    #[test]
    fn solution_tracks_expansion_to_third_order() {
        let gap = |a: f64| {
            let p = solve_wave(&surface(0.0), 1.0, a, 0.0, &SolverOptions::default()).unwrap();
            let w = wave_expansion(&surface(0.0), 1.0, a, 0.0).unwrap();
            (0..256)
                .map(|j| {
                    let z = 2.0 * PI * j as f64 / 256.0;
                    (p.eval(z) - w.eval(z)).abs()
                })
                .fold(0.0, f64::max)
        };
        let g1 = gap(5e-3);
        let ratio = g1 / gap(2.5e-3);
        assert!(g1 < 1e-6, "{g1}");
        assert!((6.0..10.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn capillary_wave_spectral_decay() {
        let p = solve_wave(&surface(0.4), 1.5, 5e-2, 1e-3, &SolverOptions::default()).unwrap();
        assert!(p.residual_norm <= 1e-12);
        assert_eq!(p.coeffs[1], 5e-2);
        assert!(p.grid_min(1024) > -1.0);

        let p = solve_wave(&surface(0.4), 1.5, 1e-3, 1e-3, &SolverOptions::default()).unwrap();
        assert_eq!(p.modes, 64);
        for n in 16..=64 {
            assert!(p.coeffs[n].abs() < 1e-14, "mode {n}: {}", p.coeffs[n]);
        }
    }

    #[test]
    fn band_narrows_with_amplitude() {
        let band = |a: f64| resolvable_modes(2.0, 0.0, a, BAND_RATIO, 64);
        assert_eq!(band(0.0), 64);
        assert!(band(1e-2) < band(5e-3));
        assert_eq!(band(1.0), 2);
        let p = solve_wave(&surface(0.0), 2.0, 1e-2, 0.0, &SolverOptions::default()).unwrap();
        assert_eq!(p.coeffs.len(), band(1e-2) + 1);
        assert!(max_abs(&galerkin_residual(&p).unwrap()) <= 1e-12);
    }

    #[test]
    fn profile_is_even() {
        let p = solve_wave(&surface(0.0), 1.0, 2e-2, 0.0, &SolverOptions::default()).unwrap();
        for z in [0.1, 0.7, 2.3, 3.0] {
            assert_eq!(evaluate_profile(&p, z), evaluate_profile(&p, -z));
        }
        let only = WaveProfile {
            coeffs: vec![0.0, 0.3, 0.0],
            modes: 2,
            ..p
        };
        assert_eq!(only.eval(0.0), 0.3);
    }

    #[test]
    fn newton_converges_quadratically() {
        let (_, hist) = solve_wave_traced(&surface(0.0), 2.0, 5e-2, 0.0, &SolverOptions::default()).unwrap();
        for w in hist.windows(2) {
            if w[0] <= 1e-4 && w[1] > 1e-13 {
                assert!(w[1] <= 1e3 * w[0] * w[0], "{hist:?}");
            }
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let p = solve_wave(&surface(0.2), 1.1, 3e-2, 2e-3, &SolverOptions::with_modes(24)).unwrap();
        let (_, jac) = testing::residual_and_jacobian(&p).unwrap();
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..20 {
            let dir: Vec<f64> = (0..p.modes + 2)
                .map(|n| rng.random_range(-1.0..1.0) / (1.0 + n as f64).powi(2))
                .collect();
            let eval = |h: f64| {
                let mut q = p.clone();
                for n in 0..=p.modes {
                    q.coeffs[n] += h * dir[n];
                }
                q.c += h * dir[p.modes + 1];
                galerkin_residual(&q).unwrap()
            };
            let h = 1e-6;
            let (rp, rm) = (eval(h), eval(-h));
            let jd = &jac * DVector::from_vec(dir.clone());
            let fd: Vec<f64> = rp.iter().zip(&rm).map(|(x, y)| (x - y) / (2.0 * h)).collect();
            let err = fd.iter().zip(jd.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            let scale = jd.amax().max(1e-12);
            assert!(err / scale <= 1e-6, "rel err {}", err / scale);
        }
    }

    #[test]
    fn truncation_robustness() {
        let p64 = solve_wave(&surface(0.4), 1.5, 1e-3, 1e-3, &SolverOptions::with_modes(64)).unwrap();
        let p96 = solve_wave(&surface(0.4), 1.5, 1e-3, 1e-3, &SolverOptions::with_modes(96)).unwrap();
        assert!(p96.modes > 64);
        for n in 0..=64 {
            assert!((p64.coeffs[n] - p96.coeffs[n]).abs() <= 1e-12);
        }
        assert_relative_eq!(p64.c, p96.c, epsilon = 1e-12);
    }

    #[test]
    fn rejects_bad_requests() {
        let opts = SolverOptions::default();
        assert!(matches!(
            solve_wave(&ModelSpec::camassa_holm(), 1.0, 0.01, 0.0, &opts),
            Err(Error::UnsupportedModel(_))
        ));
        assert!(matches!(
            solve_wave(&surface(0.0), 1.0, 0.01, 0.0, &SolverOptions::with_modes(8)),
            Err(Error::Argument(_))
        ));
        assert!(solve_wave(&surface(0.0), 1.0, 0.5, 0.0, &opts).is_err());
        let p = WaveProfile::trial(1.0, 0.0, 0.0, -1.5, vec![0.0, -1.5, 0.0], 1.0);
        assert!(matches!(p, Err(Error::NonlinearityDomain { .. })));
    }

    #[test]
    fn profile_json_fields() {
        let p = WaveProfile::rest(2.0, 0.0, 16).unwrap();
        let v = serde_json::to_value(&p).unwrap();
        for key in ["kappa", "T", "b", "a", "N", "c", "coeffs", "residual_norm"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        let back: WaveProfile = serde_json::from_value(v).unwrap();
        assert_eq!(back, p);
    }
}
