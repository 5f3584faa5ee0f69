//! Modulational instability index Δ = i1 i2 i4 / i3 and its factor roots.
//!
//! For every model i1 = (k c)'' and i2 = (k c)' - 1 at the carrier, and
//! i3 = c(κ) - c(2κ). The fourth factor is model specific: the surface model
//! uses a quadratic form in (i2, i3), the velocity model its linear variant
//! i_u, and Camassa-Holm its own polynomial in c(2κ), i2 and i3.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispersion::RESONANCE_TOL;
use crate::error::{ensure_finite, Error, Result};
use crate::expansion::{Model, ModelSpec};

/// Water-wave models reject |T - 1/3| below this.
pub const T_THIRD_TOL: f64 = 1e-6;
/// Within this distance of T = 1/3 a report carries `near_t_third`.
pub const T_THIRD_WARN: f64 = 1e-3;
/// Factors smaller than this raise `near_factor_zero`.
pub const FACTOR_TOL: f64 = 1e-8;
/// Below this |i3| the index is not evaluated.
pub const I3_TOL: f64 = 1e-10;
pub const SCAN_STEP: f64 = 1e-3;
pub const ROOT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Factor {
    I1,
    I2,
    I3,
    I4,
}

impl Factor {
    pub const ALL: [Factor; 4] = [Factor::I1, Factor::I2, Factor::I3, Factor::I4];

    /// 1-based curve number.
    pub fn number(&self) -> u8 {
        match self {
            Factor::I1 => 1,
            Factor::I2 => 2,
            Factor::I3 => 3,
            Factor::I4 => 4,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Factor::I1 => "i1",
            Factor::I2 => "i2",
            Factor::I3 => "i3",
            Factor::I4 => "i4",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "i1" | "1" => Ok(Factor::I1),
            "i2" | "2" => Ok(Factor::I2),
            "i3" | "3" => Ok(Factor::I3),
            "i4" | "4" | "iu" | "i_u" => Ok(Factor::I4),
            _ => Err(Error::Argument(format!("unknown factor {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexComponents {
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    pub i4: f64,
}

impl IndexComponents {
    pub fn get(&self, factor: Factor) -> f64 {
        match factor {
            Factor::I1 => self.i1,
            Factor::I2 => self.i2,
            Factor::I3 => self.i3,
            Factor::I4 => self.i4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Stable,
    Unstable,
    Indeterminate,
}

impl Classification {
    /// One-letter code used in grid output.
    pub fn code(&self) -> char {
        match self {
            Classification::Stable => 'S',
            Classification::Unstable => 'U',
            Classification::Indeterminate => 'I',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flag {
    NearResonance,
    NearTThird,
    NearFactorZero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexReport {
    pub model: Model,
    pub kappa: f64,
    #[serde(rename = "T")]
    pub tension: f64,
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    pub i4: f64,
    /// `None` when i3 vanishes.
    pub delta: Option<f64>,
    pub classification: Classification,
    pub flags: Vec<Flag>,
}

impl IndexReport {
    pub fn components(&self) -> IndexComponents {
        IndexComponents {
            i1: self.i1,
            i2: self.i2,
            i3: self.i3,
            i4: self.i4,
        }
    }
}

fn check_inputs(spec: &ModelSpec, kappa: f64) -> Result<()> {
    ensure_finite("carrier wave number", kappa)?;
    if kappa <= 0.0 {
        return Err(Error::Domain(format!(
            "carrier wave number must be positive, got {kappa}"
        )));
    }
    if spec.is_water_wave() && (spec.tension - 1.0 / 3.0).abs() < T_THIRD_TOL {
        return Err(Error::UnsupportedParameter(format!(
            "T = {} is within {T_THIRD_TOL:e} of 1/3, where the index is not defined",
            spec.tension
        )));
    }
    Ok(())
}

/// The four factors of the index at carrier `kappa`.
pub fn index_components(spec: &ModelSpec, kappa: f64) -> Result<IndexComponents> {
    check_inputs(spec, kappa)?;
    Ok(components_unchecked(spec, kappa))
}

pub(crate) fn components_unchecked(spec: &ModelSpec, kappa: f64) -> IndexComponents {
    let symbol = spec.symbol();
    let jet = symbol.jet(kappa);
    let c2k = symbol.speed(2.0 * kappa);
    let i1 = jet.group_speed_slope(kappa);
    let i2 = jet.group_speed(kappa) - 1.0;
    let i3 = jet.c - c2k;
    let k2 = kappa * kappa;
    let k4 = k2 * k2;
    let i4 = match spec.model {
        Model::FdchSurface => {
            3.0 * i2 - i2 * i3 + 6.0 * i3 - k2 / 12.0 * (57.0 * i2 + 34.0 * i3)
                + k4 / 108.0 * (198.0 * i2 + 35.0 * i3)
        }
        Model::FdchVelocity => {
            i2 + 2.0 * i3 + k2 / 36.0 * (57.0 * i2 + 34.0 * i3) + k4 / 324.0 * (198.0 * i2 + 35.0 * i3)
        }
        Model::CamassaHolm => {
            1296.0 * (c2k * i2 + 2.0 * i3) - 432.0 * i2 * i3 - 1512.0 * k2 * c2k * i2
                + 49.0 * k4 * (9.0 * c2k * i2 - 2.0 * i3)
        }
    };
    IndexComponents { i1, i2, i3, i4 }
}

/// Index, classification and diagnostic flags at carrier `kappa`.
pub fn delta(spec: &ModelSpec, kappa: f64) -> Result<IndexReport> {
    let comps = index_components(spec, kappa)?;
    let mut flags = Vec::new();
    if spec.is_water_wave() && (spec.tension - 1.0 / 3.0).abs() < T_THIRD_WARN {
        flags.push(Flag::NearTThird);
    }
    if Factor::ALL.iter().any(|&f| comps.get(f).abs() < FACTOR_TOL) {
        flags.push(Flag::NearFactorZero);
    }
    if !spec.symbol().check_resonance(kappa, RESONANCE_TOL)?.is_clear() {
        flags.push(Flag::NearResonance);
    }

    let (delta, classification) = if comps.i3.abs() <= I3_TOL {
        (None, Classification::Indeterminate)
    } else {
        let d = comps.i1 * comps.i2 * comps.i4 / comps.i3;
        let tol = 1e-12 * (1.0 + d.abs());
        let class = if !d.is_finite() {
            Classification::Indeterminate
        } else if d < -tol {
            Classification::Unstable
        } else if d > tol {
            Classification::Stable
        } else {
            Classification::Indeterminate
        };
        (Some(d).filter(|d| d.is_finite()), class)
    };

    Ok(IndexReport {
        model: spec.model,
        kappa,
        tension: spec.tension,
        i1: comps.i1,
        i2: comps.i2,
        i3: comps.i3,
        i4: comps.i4,
        delta,
        classification,
        flags,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalRoot {
    pub kappa: f64,
    pub factor: Factor,
}

/// Sign-change roots of the selected factors in `(kmin, kmax)`, sorted by κ.
///
/// The interval is scanned with `step` and each bracket bisected to
/// [`ROOT_TOL`]. Tangential zeros and root pairs closer than `step` are not
/// seen.
pub fn critical_wavenumbers(
    spec: &ModelSpec,
    kmin: f64,
    kmax: f64,
    which: &[Factor],
    step: f64,
) -> Result<Vec<CriticalRoot>> {
    if !(kmin.is_finite() && kmax.is_finite() && kmin > 0.0 && kmin < kmax && kmax <= 1e3) {
        return Err(Error::Argument(format!(
            "need 0 < kmin < kmax <= 1000, got ({kmin}, {kmax})"
        )));
    }
    if !(step > 0.0) {
        return Err(Error::Argument(format!("scan step must be positive, got {step}")));
    }
    check_inputs(spec, kmin)?;
    if which.is_empty() {
        return Err(Error::Argument("no factor selected".into()));
    }
    Ok(roots_in(spec, kmin, kmax, which, step))
}

pub(crate) fn roots_in(
    spec: &ModelSpec,
    kmin: f64,
    kmax: f64,
    which: &[Factor],
    step: f64,
) -> Vec<CriticalRoot> {
    roots_in_tol(spec, kmin, kmax, which, step, ROOT_TOL)
}

/// As [`roots_in`], bisecting to `tol` (0 runs to adjacent floats).
pub(crate) fn roots_in_tol(
    spec: &ModelSpec,
    kmin: f64,
    kmax: f64,
    which: &[Factor],
    step: f64,
    tol: f64,
) -> Vec<CriticalRoot> {
    let n = ((kmax - kmin) / step).ceil().max(1.0) as usize;
    let node = |j: usize| if j == n { kmax } else { kmin + j as f64 * step };
    let mut roots = Vec::new();
    let mut prev = components_unchecked(spec, node(0));
    for j in 1..=n {
        let (lo, hi) = (node(j - 1), node(j));
        let cur = components_unchecked(spec, hi);
        for &f in which {
            let (fa, fb) = (prev.get(f), cur.get(f));
            if fa == 0.0 {
                if j == 1 {
                    roots.push(CriticalRoot { kappa: lo, factor: f });
                }
            } else if fa * fb < 0.0 || fb == 0.0 {
                let k = bisect_to(|k| components_unchecked(spec, k).get(f), lo, hi, fa, tol);
                roots.push(CriticalRoot { kappa: k, factor: f });
            }
        }
        prev = cur;
    }
    roots.sort_by(|a, b| a.kappa.total_cmp(&b.kappa));
    roots
}

pub(crate) fn bisect(f: impl Fn(f64) -> f64, lo: f64, hi: f64, flo: f64) -> f64 {
    bisect_to(f, lo, hi, flo, ROOT_TOL)
}

fn bisect_to(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, mut flo: f64, tol: f64) -> f64 {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensionLimit {
    pub model: Model,
    /// `(T, κ_c(T) √T)` pairs in increasing T.
    pub values: Vec<(f64, f64)>,
    pub extrapolate: f64,
    /// Whether κ_c √T increased strictly along the sweep.
    pub increasing: bool,
}

pub const TENSION_SWEEP: [f64; 4] = [1e2, 1e3, 1e4, 1e5];

/// Follows the i4 root in s = κ √T from T = 1 out to the requested tensions.
///
/// At large T the symbol depends on κ mainly through s, so s is held fixed as
/// the prediction for the next, larger T. Steps are a quarter decade in T; the
/// bracket around the prediction doubles until it holds a root.
pub fn strong_tension_limit(spec: &ModelSpec, tensions: &[f64]) -> Result<TensionLimit> {
    if !spec.is_water_wave() {
        return Err(Error::UnsupportedModel(format!(
            "tension limit needs a water-wave model, got {}",
            spec.model.name()
        )));
    }
    if tensions.is_empty() || tensions.iter().any(|&t| !(t.is_finite() && t >= 1.0)) {
        return Err(Error::Argument("tensions must be finite and >= 1".into()));
    }
    let mut targets = tensions.to_vec();
    targets.sort_by(f64::total_cmp);
    let at = |t: f64| ModelSpec::new(spec.model, t);

    // start at T = 1: the smallest i4 root in s
    let start = at(1.0)?;
    let mut s = roots_in(&start, 1e-2, 50.0, &[Factor::I4], SCAN_STEP)
        .first()
        .map(|r| r.kappa)
        .ok_or(Error::BranchLost { last_tension: 1.0 })?;
    let mut log_t = 0.0_f64;
    let mut values = Vec::with_capacity(targets.len());
    for &target in &targets {
        let goal = target.log10();
        while log_t < goal - 1e-12 {
            let next = (log_t + 0.25).min(goal);
            let t = 10f64.powf(next);
            let sq = t.sqrt();
            let spec_t = at(t)?;
            let i4 = |s: f64| components_unchecked(&spec_t, s / sq).i4;
            s = track(i4, s).ok_or(Error::BranchLost {
                last_tension: 10f64.powf(log_t),
            })?;
            log_t = next;
        }
        values.push((target, s));
    }
    let increasing = values.windows(2).all(|w| w[1].1 > w[0].1);
    let extrapolate = values.last().map(|v| v.1).unwrap_or(f64::NAN);
    Ok(TensionLimit {
        model: spec.model,
        values,
        extrapolate,
        increasing,
    })
}

/// Root of `f` nearest to `guess`, searching brackets `guess·[1/w, w]` with
/// doubling `w`.
fn track(f: impl Fn(f64) -> f64 + Sync, guess: f64) -> Option<f64> {
    let mut w = 1.05_f64;
    while w < 1e3 {
        let (lo, hi) = (guess / w, guess * w);
        let n = 200;
        let nodes: Vec<f64> = (0..=n)
            .map(|j| lo * (hi / lo).powf(j as f64 / n as f64))
            .collect();
        let vals: Vec<f64> = nodes.par_iter().map(|&x| f(x)).collect();
        let best = (1..=n)
            .filter(|&j| vals[j - 1] * vals[j] <= 0.0)
            .map(|j| bisect(&f, nodes[j - 1], nodes[j], vals[j - 1]))
            .min_by(|a, b| (a - guess).abs().total_cmp(&(b - guess).abs()));
        if best.is_some() {
            return best;
        }
        w *= 2.0;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn surface(t: f64) -> ModelSpec {
        ModelSpec::fdch_surface(t).unwrap()
    }

    #[test]
    fn small_kappa_limit_of_i4() {
        // i2 ~ -κ²/2, i3 ~ κ²/2 give i4 ~ 3/2 κ²
        let c = index_components(&surface(0.0), 1e-3).unwrap();
        assert_relative_eq!(c.i4 / 1e-6, 1.5, max_relative = 1e-3);
    }

    #[test]
    fn ch_i1_vanishes_at_six() {
        let c = index_components(&ModelSpec::camassa_holm(), 6.0).unwrap();
        assert!(c.i1.abs() < 1e-10);
    }

    #[test]
    fn i3_at_one() {
        let c = index_components(&surface(0.0), 1.0).unwrap();
        let direct = 1f64.tanh().sqrt() - (2f64.tanh() / 2.0).sqrt();
        assert_relative_eq!(c.i3, direct, max_relative = 1e-14);
        assert!((c.i3 - 0.17844).abs() < 1e-4);
    }

    #[test]
    fn gravity_classification() {
        assert_eq!(delta(&surface(0.0), 1.0).unwrap().classification, Classification::Stable);
        assert_eq!(delta(&surface(0.0), 2.0).unwrap().classification, Classification::Unstable);
        let ch = ModelSpec::camassa_holm();
        assert_eq!(delta(&ch, 7.0).unwrap().classification, Classification::Unstable);
        assert_eq!(delta(&ch, 5.0).unwrap().classification, Classification::Stable);
    }

    #[test]
    fn factors_match_finite_differences() {
        for (spec, k) in [
            (surface(0.0), 0.7),
            (surface(0.2), 1.9),
            (surface(3.0), 0.4),
            (ModelSpec::fdch_velocity(0.0).unwrap(), 2.5),
            (ModelSpec::camassa_holm(), 3.3),
        ] {
            let s = spec.symbol();
            let kc = |k: f64| k * s.speed(k);
            let h = 1e-4;
            let d1 = (kc(k + h) - kc(k - h)) / (2.0 * h);
            let d2 = (kc(k + h) - 2.0 * kc(k) + kc(k - h)) / (h * h);
            let c = index_components(&spec, k).unwrap();
            assert_relative_eq!(c.i2, d1 - 1.0, max_relative = 1e-6);
            assert_relative_eq!(c.i1, d2, max_relative = 1e-6);
        }
    }

    #[test]
    fn gravity_factor_signs() {
        for j in 1..=400 {
            let k = 0.05 * j as f64;
            let c = index_components(&surface(0.0), k).unwrap();
            assert!(c.i1 < 0.0 && c.i2 < 0.0 && c.i3 > 0.0, "kappa {k}: {c:?}");
        }
    }

    #[test]
    fn ch_global_sign() {
        let ch = ModelSpec::camassa_holm();
        for k in [0.5, 1.0, 2.0, 4.0, 6.0, 8.0, 10.0] {
            let c = index_components(&ch, k).unwrap();
            assert!(c.i2 * c.i4 / c.i3 < 0.0, "kappa {k}");
        }
    }

    #[test]
    fn tension_one_third_rejected() {
        let spec = surface(1.0 / 3.0);
        assert!(matches!(
            index_components(&spec, 1.0),
            Err(Error::UnsupportedParameter(_))
        ));
        let r = delta(&surface(1.0 / 3.0 + 5e-4), 1.0).unwrap();
        assert!(r.flags.contains(&Flag::NearTThird));
    }

    #[test]
    fn second_harmonic_resonance_is_indeterminate() {
        let spec = surface(0.1);
        let s = spec.symbol();
        let k = bisect(|k| s.speed(k) - s.speed(2.0 * k), 0.5, 10.0, s.speed(0.5) - s.speed(1.0));
        let r = delta(&spec, k).unwrap();
        assert_eq!(r.classification, Classification::Indeterminate);
        assert!(r.delta.is_none());
        assert!(r.flags.contains(&Flag::NearFactorZero));
        assert!(r.flags.contains(&Flag::NearResonance));
    }

    #[test]
    fn gravity_critical_wavenumber() {
        let roots = critical_wavenumbers(&surface(0.0), 0.5, 3.0, &[Factor::I4], SCAN_STEP).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0].kappa - 1.420).abs() < 1e-3, "{roots:?}");
        let k = roots[0].kappa;
        let below = delta(&surface(0.0), k - 1e-2).unwrap().classification;
        let above = delta(&surface(0.0), k + 1e-2).unwrap().classification;
        assert_eq!((below, above), (Classification::Stable, Classification::Unstable));
    }

    #[test]
    fn ch_critical_wavenumber() {
        let roots =
            critical_wavenumbers(&ModelSpec::camassa_holm(), 1.0, 10.0, &[Factor::I1], SCAN_STEP).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0].kappa - 6.0).abs() < 1e-8);
    }

    #[test]
    fn velocity_critical_wavenumber() {
        let spec = ModelSpec::fdch_velocity(0.0).unwrap();
        let roots = critical_wavenumbers(&spec, 0.1, 3.0, &Factor::ALL, SCAN_STEP).unwrap();
        assert!((roots[0].kappa - 0.637).abs() < 1e-3, "{roots:?}");
        assert_eq!(roots[0].factor, Factor::I4);
    }

    #[test]
    fn root_scan_rejects_bad_ranges() {
        let spec = surface(0.0);
        assert!(critical_wavenumbers(&spec, 3.0, 1.0, &Factor::ALL, SCAN_STEP).is_err());
        assert!(critical_wavenumbers(&spec, 0.0, 1.0, &Factor::ALL, SCAN_STEP).is_err());
        assert!(critical_wavenumbers(&spec, 0.5, 1.0, &[], SCAN_STEP).is_err());
    }

    #[test]
    fn surface_tension_limit() {
        let lim = strong_tension_limit(&surface(0.0), &TENSION_SWEEP).unwrap();
        let v: Vec<f64> = lim.values.iter().map(|p| p.1).collect();
        assert!((v[2] - 1.283).abs() / 1.283 < 0.02, "{v:?}");
        assert!((v[1] - v[2]).abs() < (v[0] - v[1]).abs());
    }

    #[test]
    fn velocity_tension_limit_grows() {
        let lim = strong_tension_limit(&ModelSpec::fdch_velocity(0.0).unwrap(), &TENSION_SWEEP).unwrap();
        assert!(lim.increasing, "{:?}", lim.values);
        assert!(lim.values[3].1 > 2.0 * lim.values[0].1, "{:?}", lim.values);
    }

    #[test]
    fn report_json_fields() {
        let v = serde_json::to_value(delta(&surface(0.0), 2.0).unwrap()).unwrap();
        for key in ["model", "kappa", "T", "i1", "i2", "i3", "i4", "delta", "classification", "flags"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["classification"], "unstable");
        assert_eq!(v["model"], "fdch_surface");
    }
}
