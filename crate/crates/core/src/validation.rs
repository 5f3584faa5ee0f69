//! Reproduction checks for the headline numbers: critical wave numbers,
//! limits, rest and reduced spectra, Hill cross-checks and asymptotes.
//!
//! Each check measures, compares against the reference value with its stated
//! tolerance and time budget, and never adjusts either.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{rngs::StdRng, Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::diagram::{log_grid, trace_boundaries, verify_asymptotes};
use crate::error::{Error, Result};
use crate::expansion::{wave_expansion, Model, ModelSpec};
use crate::indices::{
    critical_wavenumbers, delta, index_components, strong_tension_limit, Classification, Factor,
    SCAN_STEP,
};
use crate::solver::{solve_wave, SolverOptions, WaveProfile};
use crate::spectrum::{delta0, hill_spectrum, omega, DEFAULT_HILL_MODES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    /// Index and root checks, 1-7.
    Quick,
    /// All ten, including Newton and Hill computations.
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub expected: String,
    pub measured: String,
    /// Value check alone.
    pub value_ok: bool,
    pub elapsed_s: f64,
    pub budget_s: f64,
    /// Value check and time budget.
    pub pass: bool,
}

impl CriterionResult {
    /// `[PASS] 1 name: measured (expected) 0.01s/1s`
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {}: measured {} | expected {} | {:.3}s of {}s",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.measured,
            self.expected,
            self.elapsed_s,
            self.budget_s
        )
    }
}

struct Outcome {
    measured: String,
    ok: bool,
}

type Check = fn() -> Result<Outcome>;

const CRITERIA: [(u8, &str, &str, f64, Check); 10] = [
    (1, "critical wave number, gravity", "1.420 +- 0.005", 1.0, critical_gravity),
    (2, "small-kappa limit of i4/kappa^2", "9/2 within rel 1e-3", 1.0, small_kappa_limit),
    (3, "strong-tension limit at T=1e4", "1.283 within 2%", 30.0, strong_tension),
    (4, "Camassa-Holm threshold", "i1 root 6 +- 1e-8, unstable at 6.5, 7, 8", 1.0, ch_threshold),
    (5, "velocity-model threshold", "0.637 +- 0.005, increasing over T=1e2..1e4", 30.0, velocity_threshold),
    (6, "rest-state spectrum", "i omega(n+xi) to 1e-12", 5.0, rest_spectrum),
    (7, "reduced discriminant at a=0", "closed form to rel 1e-8", 1.0, rest_discriminant),
    (8, "index/Hill sign agreement", "Hill > 1e-8 iff index < 0", 120.0, hill_agreement),
    (9, "expansion order", "halving ratio in [6, 10]", 60.0, expansion_order),
    (10, "asymptotes of curves 2 and 3", "residual <= 5% at kappa 40", 120.0, asymptotes),
];

pub fn criterion_ids(tier: Tier) -> Vec<u8> {
    CRITERIA
        .iter()
        .map(|c| c.0)
        .filter(|&id| tier == Tier::Full || id <= 7)
        .collect()
}

/// Runs one criterion by number.
pub fn run_criterion(id: u8) -> Result<CriterionResult> {
    let &(id, name, expected, budget_s, check) = CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .ok_or_else(|| Error::Argument(format!("no criterion {id}")))?;
    let start = Instant::now();
    let outcome = check().unwrap_or_else(|e| Outcome {
        measured: format!("error: {e}"),
        ok: false,
    });
    let elapsed_s = start.elapsed().as_secs_f64();
    Ok(CriterionResult {
        id,
        name: name.into(),
        expected: expected.into(),
        measured: outcome.measured,
        value_ok: outcome.ok,
        elapsed_s,
        budget_s,
        pass: outcome.ok && elapsed_s <= budget_s,
    })
}

pub fn run(tier: Tier) -> Vec<CriterionResult> {
    criterion_ids(tier)
        .into_iter()
        .map(|id| run_criterion(id).expect("known id"))
        .collect()
}

fn critical_gravity() -> Result<Outcome> {
    let spec = ModelSpec::fdch_surface(0.0)?;
    let roots = critical_wavenumbers(&spec, 0.5, 3.0, &[Factor::I4], SCAN_STEP)?;
    let k = roots.first().ok_or(Error::Numerical("no i4 root in (0.5, 3)".into()))?.kappa;
    Ok(Outcome {
        measured: format!("{k:.6}"),
        ok: (k - 1.420).abs() <= 0.005,
    })
}

fn small_kappa_limit() -> Result<Outcome> {
    let k = 1e-3;
    let r = index_components(&ModelSpec::fdch_surface(0.0)?, k)?.i4 / (k * k);
    Ok(Outcome {
        measured: format!("{r:.6}"),
        ok: ((r - 4.5) / 4.5).abs() <= 1e-3,
    })
}

fn strong_tension() -> Result<Outcome> {
    let lim = strong_tension_limit(&ModelSpec::fdch_surface(0.0)?, &[1e4])?;
    let s = lim.values[0].1;
    Ok(Outcome {
        measured: format!("{s:.5}"),
        ok: ((s - 1.283) / 1.283).abs() <= 0.02,
    })
}

fn ch_threshold() -> Result<Outcome> {
    let spec = ModelSpec::camassa_holm();
    let roots = critical_wavenumbers(&spec, 1.0, 10.0, &[Factor::I1], SCAN_STEP)?;
    let k = roots
        .iter()
        .map(|r| r.kappa)
        .min_by(|a, b| (a - 6.0).abs().total_cmp(&(b - 6.0).abs()))
        .ok_or(Error::Numerical("no i1 root in (1, 10)".into()))?;
    let mut unstable = true;
    let mut signs = Vec::new();
    for kappa in [6.5, 7.0, 8.0] {
        let r = delta(&spec, kappa)?;
        let d = r.delta.unwrap_or(f64::NAN);
        unstable &= d < 0.0;
        signs.push(format!("{d:.3e}"));
    }
    Ok(Outcome {
        measured: format!("root {k:.12}, delta [{}]", signs.join(", ")),
        ok: (k - 6.0).abs() <= 1e-8 && unstable,
    })
}

fn velocity_threshold() -> Result<Outcome> {
    let spec = ModelSpec::fdch_velocity(0.0)?;
    let roots = critical_wavenumbers(&spec, 0.1, 3.0, &Factor::ALL, SCAN_STEP)?;
    let k = roots.first().ok_or(Error::Numerical("no root in (0.1, 3)".into()))?.kappa;
    let lim = strong_tension_limit(&spec, &[1e2, 1e3, 1e4])?;
    let vals: Vec<String> = lim.values.iter().map(|v| format!("{:.4}", v.1)).collect();
    Ok(Outcome {
        measured: format!("{k:.6}, kappa sqrt(T) [{}]", vals.join(", ")),
        ok: (k - 0.637).abs() <= 0.005 && lim.increasing,
    })
}

fn rest_spectrum() -> Result<Outcome> {
    let m = DEFAULT_HILL_MODES;
    let mut worst = 0.0_f64;
    for kappa in [1.0, 2.0] {
        for t in [0.0, 0.4] {
            let rest = WaveProfile::rest(kappa, t, 16)?;
            for xi in [0.1, 0.3] {
                let spec = hill_spectrum(&rest, xi, m)?;
                let mut got = spec.eigenvalues.clone();
                got.sort_by(|a, b| a.im.total_cmp(&b.im));
                let mut want = (-(m as i64)..=m as i64)
                    .map(|n| omega(kappa, t, n as f64 + xi))
                    .collect::<Result<Vec<f64>>>()?;
                want.sort_by(f64::total_cmp);
                if got.len() != want.len() {
                    return Err(Error::Structure("eigenvalue count mismatch".into()));
                }
                for (g, w) in got.iter().zip(&want) {
                    worst = worst.max(g.re.abs().hypot(g.im - w));
                }
            }
        }
    }
    Ok(Outcome {
        measured: format!("max error {worst:.2e}"),
        ok: worst <= 1e-12,
    })
}

fn rest_discriminant() -> Result<Outcome> {
    let mut rng = StdRng::seed_from_u64(20);
    let mut worst = 0.0_f64;
    let mut n = 0;
    while n < 20 {
        let xi = 0.05 * (1.0 - rng.random::<f64>());
        let kappa: f64 = rng.random_range(0.2..4.0);
        let t: f64 = rng.random_range(0.0..2.0);
        if (t - 1.0 / 3.0).abs() < 0.05 {
            continue;
        }
        // skip resonant draws
        let Ok(d) = delta0(kappa, t, xi, 0.0) else { continue };
        let f = index_components(&ModelSpec::fdch_surface(t)?, kappa)?;
        let k2i1 = kappa * kappa * f.i1 * f.i1;
        let closed = k2i1 * (xi * f.i2 * f.i2 + 0.25 * xi.powi(3) * k2i1).powi(2);
        worst = worst.max(((d - closed) / closed).abs());
        n += 1;
    }
    Ok(Outcome {
        measured: format!("max rel error {worst:.2e} over 20 draws"),
        ok: worst <= 1e-8,
    })
}

fn hill_agreement() -> Result<Outcome> {
    let (a, xi) = (0.01, 0.01);
    let mut parts = Vec::new();
    let mut ok = true;
    for kappa in [2.0, 1.0] {
        let spec = ModelSpec::fdch_surface(0.0)?;
        let p = solve_wave(&spec, kappa, a, 0.0, &SolverOptions::with_modes(64))?;
        let growth = hill_spectrum(&p, xi, DEFAULT_HILL_MODES)?.max_real;
        let r = delta(&spec, kappa)?;
        let d = r.delta.unwrap_or(f64::NAN);
        ok &= match r.classification {
            Classification::Unstable => growth > 1e-8 && d < 0.0,
            Classification::Stable => growth <= 1e-8 && d > 0.0,
            Classification::Indeterminate => false,
        };
        parts.push(format!("kappa {kappa}: Hill {growth:.2e}, index {d:.3}"));
    }
    Ok(Outcome {
        measured: parts.join("; "),
        ok,
    })
}

fn expansion_order() -> Result<Outcome> {
    let spec = ModelSpec::fdch_surface(0.0)?;
    let gap = |a: f64| -> Result<f64> {
        let p = solve_wave(&spec, 2.0, a, 0.0, &SolverOptions::default())?;
        let w = wave_expansion(&spec, 2.0, a, 0.0)?;
        Ok((0..512)
            .map(|j| {
                let z = 2.0 * PI * j as f64 / 512.0;
                (p.eval(z) - w.eval(z)).abs()
            })
            .fold(0.0, f64::max))
    };
    let (g1, g2) = (gap(1e-2)?, gap(5e-3)?);
    let ratio = g1 / g2;
    Ok(Outcome {
        measured: format!("{ratio:.3} ({g1:.3e} / {g2:.3e})"),
        ok: (6.0..=10.0).contains(&ratio),
    })
}

fn asymptotes() -> Result<Outcome> {
    let curves = trace_boundaries(Model::FdchSurface, &log_grid(1e-4, 1e3, 400))?;
    let checks = verify_asymptotes(&curves, 40.0);
    let parts: Vec<String> = checks
        .iter()
        .map(|c| match c.max_residual {
            Some(r) if !c.inconclusive => format!("curve {}: {r:.2e}", c.curve),
            _ => format!("curve {}: inconclusive", c.curve),
        })
        .collect();
    Ok(Outcome {
        measured: parts.join("; "),
        ok: checks.len() == 2 && checks.iter().all(|c| c.pass),
    })
}
