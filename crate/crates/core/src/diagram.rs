//! Stability diagram in the (κ, κ√T) plane: root curves of the four index
//! factors, a classified grid, the large-κ asymptotes of curves 2 and 3, and
//! CSV/SVG emission.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expansion::{Model, ModelSpec};
use crate::indices::{delta, roots_in_tol, Classification, Factor, SCAN_STEP, T_THIRD_TOL};

pub const KAPPA_MIN: f64 = 1e-2;
pub const KAPPA_MAX: f64 = 50.0;
pub const T_MIN: f64 = 1e-6;
pub const T_MAX: f64 = 1e3;
pub const DEFAULT_T_POINTS: usize = 400;
/// A polyline is split where a step exceeds this multiple of the median
/// nearby step.
pub const SPLIT_FACTOR: f64 = 10.0;
pub const SPLIT_WINDOW: usize = 4;
/// Largest |Δ ln κ| for which a root continues an existing branch.
const MATCH_GATE: f64 = 0.25;
pub const ASYMPTOTE_POINTS: usize = 10;
pub const ASYMPTOTE_KAPPA: f64 = 20.0;
pub const ASYMPTOTE_TOL: f64 = 0.05;
pub const MAX_RESOLUTION: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub kappa: f64,
    pub tension: f64,
    pub kappa_sqrt_t: f64,
}

/// One connected branch of the zero set of a factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub factor: Factor,
    pub branch: usize,
    pub points: Vec<CurvePoint>,
}

impl Curve {
    /// `"<factor>-<branch>"`, e.g. `4-0`.
    pub fn id(&self) -> String {
        format!("{}-{}", self.factor.number(), self.branch)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    /// Cell centres along κ.
    pub kappa: Vec<f64>,
    /// Cell centres along κ√T.
    pub kappa_sqrt_t: Vec<f64>,
    /// Row-major in κ√T: `class[j * kappa.len() + i]`.
    pub class: Vec<Classification>,
}

impl Grid {
    pub fn at(&self, i: usize, j: usize) -> Classification {
        self.class[j * self.kappa.len() + i]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityDiagram {
    pub model: Model,
    pub curves: Vec<Curve>,
    pub grid: Option<Grid>,
}

fn check_model(model: Model) -> Result<()> {
    if model == Model::CamassaHolm {
        return Err(Error::UnsupportedModel(
            "camassa-holm has no surface tension; the diagram needs a water-wave model".into(),
        ));
    }
    Ok(())
}

/// `n` log-uniform tensions in `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.log10(), hi.log10());
    (0..n)
        .map(|j| 10f64.powf(a + (b - a) * j as f64 / (n - 1) as f64))
        .collect()
}

pub fn default_tensions() -> Vec<f64> {
    log_grid(1e-3, 1e3, DEFAULT_T_POINTS)
}

/// Root curves of i1..i4 over the given tensions, κ in (10⁻², 50), each
/// root bisected to adjacent floats.
///
/// Roots at consecutive tensions are joined greedily by nearest ln κ; a root
/// with no partner opens a new branch. Branches are then cut wherever a step
/// exceeds [`SPLIT_FACTOR`] times the branch's median step. Tensions within
/// [`T_THIRD_TOL`] of 1/3 are skipped.
pub fn trace_boundaries(model: Model, tensions: &[f64]) -> Result<Vec<Curve>> {
    check_model(model)?;
    if tensions.is_empty() {
        return Err(Error::Argument("empty tension grid".into()));
    }
    if tensions.iter().any(|&t| !(t.is_finite() && (T_MIN..=T_MAX).contains(&t))) {
        return Err(Error::Argument(format!(
            "tensions must lie in [{T_MIN:e}, {T_MAX:e}]"
        )));
    }
    if tensions.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Argument("tension grid must be strictly increasing".into()));
    }

    let usable: Vec<f64> = tensions
        .iter()
        .copied()
        .filter(|t| (t - 1.0 / 3.0).abs() >= T_THIRD_TOL)
        .collect();
    let scans: Vec<Vec<(Factor, f64)>> = usable
        .par_iter()
        .map(|&t| {
            let spec = ModelSpec::new(model, t).expect("tension checked");
            roots_in_tol(&spec, KAPPA_MIN, KAPPA_MAX, &Factor::ALL, SCAN_STEP, 0.0)
                .into_iter()
                .map(|r| (r.factor, r.kappa))
                .collect()
        })
        .collect();

    let mut curves = Vec::new();
    for factor in Factor::ALL {
        let mut open: Vec<Vec<CurvePoint>> = Vec::new();
        let mut closed: Vec<Vec<CurvePoint>> = Vec::new();
        for (&t, roots) in usable.iter().zip(&scans) {
            let ks: Vec<f64> = roots
                .iter()
                .filter(|r| r.0 == factor)
                .map(|r| r.1)
                .collect();
            let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
            for (b, line) in open.iter().enumerate() {
                let last = line.last().expect("open branches are non-empty").kappa;
                for (r, &k) in ks.iter().enumerate() {
                    let d = (k / last).ln().abs();
                    if d <= MATCH_GATE {
                        pairs.push((d, b, r));
                    }
                }
            }
            pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
            let mut branch_of = vec![None; ks.len()];
            let mut taken = vec![false; open.len()];
            for (_, b, r) in pairs {
                if !taken[b] && branch_of[r].is_none() {
                    taken[b] = true;
                    branch_of[r] = Some(b);
                }
            }
            let mut next = Vec::new();
            for (b, line) in open.into_iter().enumerate() {
                if !taken[b] {
                    closed.push(line);
                }
                else {
                    next.push((b, line));
                }
            }
            let mut still: Vec<Vec<CurvePoint>> = Vec::new();
            let mut index = BTreeMap::new();
            for (b, line) in next {
                index.insert(b, still.len());
                still.push(line);
            }
            for (r, &k) in ks.iter().enumerate() {
                let p = CurvePoint {
                    kappa: k,
                    tension: t,
                    kappa_sqrt_t: k * t.sqrt(),
                };
                match branch_of[r] {
                    Some(b) => still[index[&b]].push(p),
                    None => still.push(vec![p]),
                }
            }
            open = still;
        }
        closed.extend(open);
        let mut pieces: Vec<Vec<CurvePoint>> = closed.into_iter().flat_map(split_line).collect();
        pieces.sort_by(|x, y| {
            x[0].tension
                .total_cmp(&y[0].tension)
                .then(x[0].kappa.total_cmp(&y[0].kappa))
        });
        curves.extend(pieces.into_iter().enumerate().map(|(branch, points)| Curve {
            factor,
            branch,
            points,
        }));
    }
    Ok(curves)
}

fn step(p: &CurvePoint, q: &CurvePoint) -> f64 {
    (q.kappa - p.kappa).hypot(q.kappa_sqrt_t - p.kappa_sqrt_t)
}

/// Cuts a polyline at steps longer than [`SPLIT_FACTOR`] times the median of
/// the surrounding [`SPLIT_WINDOW`] steps on either side.
fn split_line(line: Vec<CurvePoint>) -> Vec<Vec<CurvePoint>> {
    if line.len() < 3 {
        return vec![line];
    }
    let steps: Vec<f64> = line.windows(2).map(|w| step(&w[0], &w[1])).collect();
    let mut out = Vec::new();
    let mut cur = vec![line[0]];
    for (j, &d) in steps.iter().enumerate() {
        let lo = j.saturating_sub(SPLIT_WINDOW);
        let hi = (j + SPLIT_WINDOW + 1).min(steps.len());
        let mut near: Vec<f64> = (lo..hi).filter(|&i| i != j).map(|i| steps[i]).collect();
        near.sort_by(f64::total_cmp);
        let median = near[near.len() / 2];
        if median > 0.0 && d > SPLIT_FACTOR * median {
            out.push(std::mem::take(&mut cur));
        }
        cur.push(line[j + 1]);
    }
    out.push(cur);
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoteCheck {
    pub curve: u8,
    pub relation: String,
    /// Points used, largest κ last.
    pub kappas: Vec<f64>,
    pub residuals: Vec<f64>,
    pub max_residual: Option<f64>,
    pub inconclusive: bool,
    pub pass: bool,
}

/// Residuals of the curve-2 and curve-3 asymptotes at the
/// [`ASYMPTOTE_POINTS`] largest-κ points not above `kappa_cap`.
///
/// Curve 2: |κ − (9/4 κ²T − 3/4)| / κ. Curve 3: |κ²T − 1/2| / (1/2).
/// Fewer than [`ASYMPTOTE_POINTS`] points with κ ≥ [`ASYMPTOTE_KAPPA`] makes
/// the check inconclusive (and not passing).
pub fn verify_asymptotes(curves: &[Curve], kappa_cap: f64) -> Vec<AsymptoteCheck> {
    type Relation = (Factor, &'static str, fn(&CurvePoint) -> f64);
    let relations: [Relation; 2] = [
        (Factor::I2, "kappa = 9/4 kappa^2 T - 3/4", |p| {
            (p.kappa - (2.25 * p.kappa * p.kappa * p.tension - 0.75)).abs() / p.kappa
        }),
        (Factor::I3, "kappa^2 T = 1/2", |p| {
            (p.kappa * p.kappa * p.tension - 0.5).abs() / 0.5
        }),
    ];
    relations
        .iter()
        .map(|(factor, relation, residual)| {
            let mut pts: Vec<&CurvePoint> = curves
                .iter()
                .filter(|c| c.factor == *factor)
                .flat_map(|c| c.points.iter())
                .filter(|p| p.kappa >= ASYMPTOTE_KAPPA && p.kappa <= kappa_cap)
                .collect();
            pts.sort_by(|a, b| a.kappa.total_cmp(&b.kappa));
            let pts = &pts[pts.len().saturating_sub(ASYMPTOTE_POINTS)..];
            let residuals: Vec<f64> = pts.iter().map(|p| residual(p)).collect();
            let inconclusive = pts.len() < ASYMPTOTE_POINTS;
            let max_residual = residuals.iter().copied().reduce(f64::max);
            AsymptoteCheck {
                curve: factor.number(),
                relation: relation.to_string(),
                kappas: pts.iter().map(|p| p.kappa).collect(),
                residuals,
                max_residual,
                inconclusive,
                pass: !inconclusive && max_residual.is_some_and(|r| r <= ASYMPTOTE_TOL),
            }
        })
        .collect()
}

/// Classifies cell centres of a `nk × ns` grid over `[k0, k1] × [s0, s1]`,
/// with T = (s/κ)². Cells where the index is undefined are indeterminate.
pub fn classify_grid(
    model: Model,
    kappa_range: (f64, f64),
    s_range: (f64, f64),
    resolution: (usize, usize),
) -> Result<Grid> {
    check_model(model)?;
    let (nk, ns) = resolution;
    if nk == 0 || ns == 0 || nk > MAX_RESOLUTION || ns > MAX_RESOLUTION {
        return Err(Error::Argument(format!(
            "grid resolution must be between 1 and {MAX_RESOLUTION} per axis, got {nk}x{ns}"
        )));
    }
    let (k0, k1) = kappa_range;
    let (s0, s1) = s_range;
    if !(k0.is_finite() && k1.is_finite() && 0.0 <= k0 && k0 < k1) {
        return Err(Error::Argument(format!("bad kappa range ({k0}, {k1})")));
    }
    if !(s0.is_finite() && s1.is_finite() && 0.0 <= s0 && s0 < s1) {
        return Err(Error::Argument(format!("bad kappa*sqrt(T) range ({s0}, {s1})")));
    }
    let centres = |lo: f64, hi: f64, n: usize| -> Vec<f64> {
        (0..n)
            .map(|i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64)
            .collect()
    };
    let kappa = centres(k0, k1, nk);
    let kappa_sqrt_t = centres(s0, s1, ns);
    let class = (0..nk * ns)
        .into_par_iter()
        .map(|c| classify_point(model, kappa[c % nk], kappa_sqrt_t[c / nk]))
        .collect();
    Ok(Grid {
        kappa,
        kappa_sqrt_t,
        class,
    })
}

pub fn classify_point(model: Model, kappa: f64, s: f64) -> Classification {
    let t = (s / kappa).powi(2);
    ModelSpec::new(model, t)
        .and_then(|spec| delta(&spec, kappa))
        .map(|r| r.classification)
        .unwrap_or(Classification::Indeterminate)
}

/// Horizontally adjacent cell pairs straddled by traced curves, as
/// `(consistent, total)`. A pair is consistent when its classes differ exactly
/// if an odd number of curve crossings lies between the two centres. `None`
/// when no curve crosses the grid.
pub fn curve_grid_consistency(curves: &[Curve], grid: &Grid) -> Option<(usize, usize)> {
    let nk = grid.kappa.len();
    if nk < 2 {
        return None;
    }
    let dk = grid.kappa[1] - grid.kappa[0];
    let mut crossings: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (j, &s) in grid.kappa_sqrt_t.iter().enumerate() {
        for c in curves {
            for w in c.points.windows(2) {
                let (p, q) = (w[0], w[1]);
                let (sp, sq) = (p.kappa_sqrt_t - s, q.kappa_sqrt_t - s);
                if sp * sq > 0.0 || sp == sq {
                    continue;
                }
                let k = p.kappa + (q.kappa - p.kappa) * sp / (sp - sq);
                let x = (k - grid.kappa[0]) / dk;
                if x < 0.0 || x >= (nk - 1) as f64 {
                    continue;
                }
                *crossings.entry((x.floor() as usize, j)).or_default() += 1;
            }
        }
    }
    let consistent = crossings
        .iter()
        .filter(|(&(i, j), &n)| (grid.at(i, j) != grid.at(i + 1, j)) == (n % 2 == 1))
        .count();
    (!crossings.is_empty()).then_some((consistent, crossings.len()))
}

fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn curves_csv(curves: &[Curve]) -> String {
    let mut out = String::from("curve_id,kappa,kappa_sqrtT\n");
    for c in curves {
        let id = c.id();
        for p in &c.points {
            let _ = writeln!(out, "{id},{},{}", sig17(p.kappa), sig17(p.kappa_sqrt_t));
        }
    }
    out
}

pub fn grid_csv(grid: &Grid) -> String {
    let mut out = String::from("kappa,kappa_sqrtT,class\n");
    for (j, &s) in grid.kappa_sqrt_t.iter().enumerate() {
        for (i, &k) in grid.kappa.iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", sig17(k), sig17(s), grid.at(i, j).code());
        }
    }
    out
}

const PALETTE: [&str; 4] = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a"];

/// Grid as a heat map with the curves on top, clipped to the given window.
pub fn render_svg(
    diagram: &StabilityDiagram,
    kappa_range: (f64, f64),
    s_range: (f64, f64),
) -> String {
    let (w, h, pad) = (640.0, 480.0, 40.0);
    let (k0, k1) = kappa_range;
    let (s0, s1) = s_range;
    let x = |k: f64| pad + (k - k0) / (k1 - k0) * (w - 2.0 * pad);
    let y = |s: f64| h - pad - (s - s0) / (s1 - s0) * (h - 2.0 * pad);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    if let Some(g) = &diagram.grid {
        let cw = (w - 2.0 * pad) / g.kappa.len() as f64;
        let ch = (h - 2.0 * pad) / g.kappa_sqrt_t.len() as f64;
        for (j, &s) in g.kappa_sqrt_t.iter().enumerate() {
            for (i, &k) in g.kappa.iter().enumerate() {
                let fill = match g.at(i, j) {
                    Classification::Stable => "#deebf7",
                    Classification::Unstable => "#fcbba1",
                    Classification::Indeterminate => "#d9d9d9",
                };
                let _ = writeln!(
                    out,
                    r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{fill}"/>"#,
                    x(k) - cw / 2.0,
                    y(s) - ch / 2.0,
                    cw + 0.05,
                    ch + 0.05
                );
            }
        }
    }
    let _ = writeln!(
        out,
        r#"<clipPath id="plot"><rect x="{pad}" y="{pad}" width="{}" height="{}"/></clipPath>"#,
        w - 2.0 * pad,
        h - 2.0 * pad
    );
    for c in &diagram.curves {
        let colour = PALETTE[(c.factor.number() - 1) as usize];
        let pts: Vec<String> = c
            .points
            .iter()
            .map(|p| format!("{:.2},{:.2}", x(p.kappa), y(p.kappa_sqrt_t)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline clip-path="url(#plot)" fill="none" stroke="{colour}" stroke-width="1.5" points="{}"><title>{}</title></polyline>"#,
            pts.join(" "),
            c.id()
        );
    }
    let _ = writeln!(
        out,
        r#"<rect x="{pad}" y="{pad}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        w - 2.0 * pad,
        h - 2.0 * pad
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">kappa [{k0}, {k1}]</text>"#,
        w / 2.0,
        h - 12.0
    );
    let _ = writeln!(
        out,
        r#"<text x="12" y="{}" font-size="12" text-anchor="middle" transform="rotate(-90 12 {})">kappa sqrt(T) [{s0}, {s1}]</text>"#,
        h / 2.0,
        h / 2.0
    );
    out.push_str("</svg>\n");
    out
}
