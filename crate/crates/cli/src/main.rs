//! `modwave` command line: every library operation with JSON (default) or
//! CSV output.
//!
//! Exit status: 0 success, 1 bad input or parameters, 2 numerical failure.
//! Errors are a single JSON line on stderr.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use modwave::diagram::{self, StabilityDiagram};
use modwave::spectrum::{default_xi_grid, DEFAULT_HILL_MODES};
use modwave::validation::{self, Tier};
use modwave::{
    critical_wavenumbers, cubic_coefficients, delta, expansion_coeffs, hill_spectrum,
    max_growth_rate, reduced_matrices, solve_wave, strong_tension_limit, wave_expansion,
    DispersionSpec, Error, Factor, Model, ModelSpec, SolverOptions,
};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(
    name = "modwave",
    version,
    about = "Modulational instability of small periodic waves in full-dispersion Camassa-Holm models"
)]
struct Cli {
    /// Worker threads for parallel sweeps [default: all cores]
    #[arg(long, global = true, env = "MODWAVE_JOBS")]
    jobs: Option<usize>,

    /// Output format; csv is available for tabular results
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write the result here instead of standard output
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    FdchSurface,
    FdchVelocity,
    #[value(alias = "camassa-holm")]
    Ch,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::FdchSurface => Model::FdchSurface,
            ModelArg::FdchVelocity => Model::FdchVelocity,
            ModelArg::Ch => Model::CamassaHolm,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SymbolArg {
    WaterWave,
    #[value(alias = "camassa-holm")]
    Ch,
}

#[derive(Args, Debug)]
struct ModelOpts {
    #[arg(long, value_enum, default_value_t = ModelArg::FdchSurface)]
    model: ModelArg,
    /// Surface-tension coefficient (ignored for ch)
    #[arg(long = "T", default_value_t = 0.0)]
    tension: f64,
}

impl ModelOpts {
    fn spec(&self) -> Result<ModelSpec, Error> {
        ModelSpec::new(self.model.into(), self.tension)
    }
}

#[derive(Args, Debug)]
struct WaveOpts {
    /// Surface-tension coefficient
    #[arg(long = "T", default_value_t = 0.0)]
    tension: f64,
    /// Carrier wave number
    #[arg(long)]
    kappa: f64,
    /// Amplitude of the first cosine mode
    #[arg(long, default_value_t = 0.01)]
    a: f64,
    /// Integration constant
    #[arg(long, default_value_t = 0.0)]
    b: f64,
    /// Cosine truncation (upper bound; the solver may resolve fewer modes)
    #[arg(long = "N", default_value_t = 64)]
    n: usize,
}

impl WaveOpts {
    fn solve(&self) -> Result<modwave::WaveProfile, Error> {
        let spec = ModelSpec::fdch_surface(self.tension)?;
        solve_wave(&spec, self.kappa, self.a, self.b, &SolverOptions::with_modes(self.n))
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Phase speed, its derivatives and the group speed
    #[command(allow_negative_numbers = true)]
    Speed {
        #[arg(long, value_enum, default_value_t = SymbolArg::WaterWave)]
        model: SymbolArg,
        #[arg(long = "T", default_value_t = 0.0)]
        tension: f64,
        #[arg(long)]
        kappa: f64,
    },
    /// Expansion coefficients h0, h2, c2, p1 and the b-slopes
    #[command(allow_negative_numbers = true)]
    Coeffs {
        #[command(flatten)]
        model: ModelOpts,
        #[arg(long)]
        kappa: f64,
    },
    /// Solve for a periodic traveling wave of the surface model
    #[command(allow_negative_numbers = true)]
    Wave {
        #[command(flatten)]
        wave: WaveOpts,
        /// Report the second-order expansion instead of solving
        #[arg(long)]
        expansion: bool,
    },
    /// Modulational instability index and its factors
    #[command(allow_negative_numbers = true)]
    Index {
        #[command(flatten)]
        model: ModelOpts,
        #[arg(long)]
        kappa: f64,
    },
    /// Roots of the index factors in a wave-number interval
    #[command(allow_negative_numbers = true)]
    Critical {
        #[command(flatten)]
        model: ModelOpts,
        /// Factors to scan: i1, i2, i3, i4 or all (comma separated)
        #[arg(long, value_delimiter = ',', default_value = "all")]
        factor: Vec<String>,
        #[arg(long, default_value_t = 0.01)]
        kmin: f64,
        #[arg(long, default_value_t = 10.0)]
        kmax: f64,
        /// Sign-change scan step
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
    },
    /// kappa_c(T) sqrt(T) along the strong-tension sweep
    #[command(allow_negative_numbers = true)]
    TensionLimit {
        #[arg(long, value_enum, default_value_t = ModelArg::FdchSurface)]
        model: ModelArg,
        /// Tensions (comma separated)
        #[arg(long, value_delimiter = ',', default_value = "100,1000,10000,100000")]
        tensions: Vec<f64>,
    },
    /// Floquet-Hill spectrum of a solved wave
    #[command(allow_negative_numbers = true)]
    Spectrum {
        #[command(flatten)]
        wave: WaveOpts,
        /// Floquet exponent; without it the growth rate is maximised over a grid
        #[arg(long)]
        xi: Option<f64>,
        /// Fourier truncation of the Hill matrix
        #[arg(long = "M", default_value_t = DEFAULT_HILL_MODES)]
        m: usize,
        /// Grid size for the growth-rate scan over (0, 1/2]
        #[arg(long, default_value_t = 200)]
        xi_points: usize,
    },
    /// Discriminant of the reduced cubic
    #[command(allow_negative_numbers = true)]
    Delta0 {
        #[arg(long = "T", default_value_t = 0.0)]
        tension: f64,
        #[arg(long)]
        kappa: f64,
        #[arg(long)]
        xi: f64,
        #[arg(long, default_value_t = 0.0)]
        a: f64,
    },
    /// Stability diagram: factor root curves, classified grid, asymptotes
    #[command(allow_negative_numbers = true)]
    Diagram {
        #[arg(long, value_enum, default_value_t = ModelArg::FdchSurface)]
        model: ModelArg,
        /// Smallest traced tension
        #[arg(long, default_value_t = 1e-3)]
        t_min: f64,
        /// Largest traced tension
        #[arg(long, default_value_t = 1e3)]
        t_max: f64,
        /// Log-uniform tension samples
        #[arg(long, default_value_t = diagram::DEFAULT_T_POINTS)]
        t_points: usize,
        /// Plot window in kappa
        #[arg(long, default_value_t = 10.0)]
        kappa_max: f64,
        /// Plot window in kappa sqrt(T)
        #[arg(long, default_value_t = 5.0)]
        s_max: f64,
        /// Grid cells along kappa
        #[arg(long, default_value_t = 200)]
        nk: usize,
        /// Grid cells along kappa sqrt(T)
        #[arg(long, default_value_t = 100)]
        ns: usize,
        /// Largest kappa used by the asymptote check
        #[arg(long, default_value_t = 40.0)]
        asymptote_kappa: f64,
        /// Curves CSV
        #[arg(long)]
        curves: Option<PathBuf>,
        /// Grid CSV
        #[arg(long)]
        grid: Option<PathBuf>,
        /// SVG rendering of grid and curves
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Run the acceptance criteria and print a pass/fail table
    #[command(allow_negative_numbers = true)]
    Validate {
        /// Index and root checks only
        #[arg(long, conflicts_with = "full")]
        quick: bool,
        /// All criteria (default)
        #[arg(long)]
        full: bool,
    },
}

struct Failure {
    code: u8,
    kind: String,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_numerical() { 2 } else { 1 },
            kind: e.kind().into(),
            message: e.to_string(),
        }
    }
}

fn arg_error(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        kind: "argument".into(),
        message: message.into(),
    }
}

fn io_error(e: std::io::Error) -> Failure {
    Failure {
        code: 1,
        kind: "io".into(),
        message: e.to_string(),
    }
}

/// What a command produced: JSON always, CSV when tabular.
struct Report {
    json: Value,
    csv: Option<String>,
    /// Exit status when the command ran but its verdict is negative.
    code: u8,
}

impl Report {
    fn new(value: impl Serialize, csv: Option<String>) -> Result<Self, Failure> {
        let json = serde_json::to_value(value).map_err(|e| arg_error(e.to_string()))?;
        Ok(Report { json, csv, code: 0 })
    }
}

fn csv_of(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut out = format!("{header}\n");
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    out
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    match &cli.command {
        Command::Speed {
            model,
            tension,
            kappa,
        } => {
            let s = match model {
                SymbolArg::WaterWave => DispersionSpec::water_wave(*tension)?,
                SymbolArg::Ch => DispersionSpec::camassa_holm(),
            };
            let c = s.phase_speed(*kappa)?;
            let dc = s.phase_speed_deriv(*kappa, 1)?;
            let d2c = s.phase_speed_deriv(*kappa, 2)?;
            let g = s.group_speed(*kappa)?;
            Report::new(
                json!({"model": s.kind, "T": s.tension, "kappa": kappa,
                       "speed": c, "dspeed": dc, "d2speed": d2c, "group_speed": g}),
                Some(csv_of(
                    "kappa,speed,dspeed,d2speed,group_speed",
                    [format!("{kappa},{c},{dc},{d2c},{g}")],
                )),
            )
        }
        Command::Coeffs { model, kappa } => {
            let spec = model.spec()?;
            let e = expansion_coeffs(&spec, *kappa)?;
            let p1 = e.p1.map(|p| p.to_string()).unwrap_or_default();
            Report::new(
                json!({"model": spec.model, "T": spec.tension, "kappa": kappa, "coefficients": e}),
                Some(csv_of(
                    "h0,h2,c2,p1,eta0_slope,c0_slope",
                    [format!("{},{},{},{p1},{},{}", e.h0, e.h2, e.c2, e.eta0_slope, e.c0_slope)],
                )),
            )
        }
        Command::Wave { wave, expansion } => {
            if *expansion {
                let spec = ModelSpec::fdch_surface(wave.tension)?;
                let w = wave_expansion(&spec, wave.kappa, wave.a, wave.b)?;
                let rows = w.modes.iter().enumerate().map(|(n, c)| format!("{n},{c}"));
                Report::new(
                    json!({"kappa": wave.kappa, "T": wave.tension, "a": wave.a, "b": wave.b,
                           "expansion": w}),
                    Some(csv_of("n,coeff", rows)),
                )
            } else {
                let p = wave.solve()?;
                let rows: Vec<String> =
                    p.coeffs.iter().enumerate().map(|(n, c)| format!("{n},{c}")).collect();
                Report::new(&p, Some(csv_of("n,coeff", rows)))
            }
        }
        Command::Index { model, kappa } => {
            let r = delta(&model.spec()?, *kappa)?;
            let d = r.delta.map(|d| d.to_string()).unwrap_or_default();
            let csv = csv_of(
                "kappa,T,i1,i2,i3,i4,delta,class",
                [format!(
                    "{},{},{},{},{},{},{d},{}",
                    r.kappa,
                    r.tension,
                    r.i1,
                    r.i2,
                    r.i3,
                    r.i4,
                    r.classification.code()
                )],
            );
            Report::new(&r, Some(csv))
        }
        Command::Critical {
            model,
            factor,
            kmin,
            kmax,
            step,
        } => {
            let which: Vec<Factor> = if factor.iter().any(|f| f.eq_ignore_ascii_case("all")) {
                Factor::ALL.to_vec()
            } else {
                factor
                    .iter()
                    .map(|f| Factor::parse(f))
                    .collect::<Result<_, _>>()?
            };
            let spec = model.spec()?;
            let roots = critical_wavenumbers(&spec, *kmin, *kmax, &which, *step)?;
            let rows: Vec<String> = roots
                .iter()
                .map(|r| format!("{},{}", r.factor.label(), r.kappa))
                .collect();
            Report::new(
                json!({"model": spec.model, "T": spec.tension, "kmin": kmin, "kmax": kmax,
                       "roots": roots}),
                Some(csv_of("factor,kappa", rows)),
            )
        }
        Command::TensionLimit { model, tensions } => {
            let spec = ModelSpec::new((*model).into(), 0.0)?;
            let lim = strong_tension_limit(&spec, tensions)?;
            let rows: Vec<String> = lim.values.iter().map(|(t, s)| format!("{t},{s}")).collect();
            Report::new(&lim, Some(csv_of("T,kappa_sqrtT", rows)))
        }
        Command::Spectrum {
            wave,
            xi,
            m,
            xi_points,
        } => {
            let p = wave.solve()?;
            match xi {
                Some(xi) => {
                    let s = hill_spectrum(&p, *xi, *m)?;
                    let rows: Vec<String> =
                        s.eigenvalues.iter().map(|z| format!("{},{}", z.re, z.im)).collect();
                    Report::new(
                        json!({"kappa": p.kappa, "T": p.tension, "a": p.a, "b": p.b,
                               "N": p.modes, "spectrum": s}),
                        Some(csv_of("re,im", rows)),
                    )
                }
                None => {
                    if *xi_points == 0 {
                        return Err(arg_error("--xi-points must be positive"));
                    }
                    let (xi_star, rate) = max_growth_rate(&p, &default_xi_grid(*xi_points), *m)?;
                    Report::new(
                        json!({"kappa": p.kappa, "T": p.tension, "a": p.a, "b": p.b,
                               "N": p.modes, "M": m, "xi": xi_star, "growth_rate": rate}),
                        Some(csv_of("xi,growth_rate", [format!("{xi_star},{rate}")])),
                    )
                }
            }
        }
        Command::Delta0 {
            tension,
            kappa,
            xi,
            a,
        } => {
            let rm = reduced_matrices(*kappa, *tension, *xi, *a)?;
            let q = cubic_coefficients(&rm)?;
            let d = q.discriminant();
            Report::new(
                json!({"kappa": kappa, "T": tension, "xi": xi, "a": a,
                       "cubic": q, "delta0": d}),
                Some(csv_of("q0,q1,q2,q3,delta0", [format!("{},{},{},{},{d}", q.q0, q.q1, q.q2, q.q3)])),
            )
        }
        Command::Diagram {
            model,
            t_min,
            t_max,
            t_points,
            kappa_max,
            s_max,
            nk,
            ns,
            asymptote_kappa,
            curves,
            grid,
            svg,
        } => {
            if *t_points == 0 || !(t_min < t_max) {
                return Err(arg_error("need t_points > 0 and t_min < t_max"));
            }
            let model: Model = (*model).into();
            let tensions = diagram::log_grid(*t_min, *t_max, *t_points);
            let traced = diagram::trace_boundaries(model, &tensions)?;
            let g = diagram::classify_grid(model, (0.0, *kappa_max), (0.0, *s_max), (*nk, *ns))?;
            let checks = diagram::verify_asymptotes(&traced, *asymptote_kappa);
            let consistency = diagram::curve_grid_consistency(&traced, &g);
            let curves_csv = diagram::curves_csv(&traced);
            if let Some(path) = curves {
                std::fs::write(path, &curves_csv).map_err(io_error)?;
            }
            if let Some(path) = grid {
                std::fs::write(path, diagram::grid_csv(&g)).map_err(io_error)?;
            }
            let d = StabilityDiagram {
                model,
                curves: traced,
                grid: Some(g),
            };
            if let Some(path) = svg {
                let body = diagram::render_svg(&d, (0.0, *kappa_max), (0.0, *s_max));
                std::fs::write(path, body).map_err(io_error)?;
            }
            let summary: Vec<Value> = d
                .curves
                .iter()
                .map(|c| json!({"id": c.id(), "points": c.points.len()}))
                .collect();
            Report::new(
                json!({
                    "model": model,
                    "tensions": {"min": t_min, "max": t_max, "points": t_points},
                    "curves": summary,
                    "asymptotes": checks,
                    "consistency": consistency.map(|(ok, n)| json!({"consistent": ok, "pairs": n})),
                }),
                Some(curves_csv),
            )
        }
        Command::Validate { quick, .. } => {
            let tier = if *quick { Tier::Quick } else { Tier::Full };
            let results = validation::run(tier);
            let all = results.iter().all(|r| r.pass);
            let mut table = String::new();
            for r in &results {
                let _ = writeln!(table, "{}", r.line());
            }
            let passed = results.iter().filter(|r| r.pass).count();
            let _ = writeln!(table, "{passed} of {} criteria pass", results.len());
            let mut report = Report::new(
                json!({"tier": tier, "pass": all, "criteria": results}),
                Some(table),
            )?;
            report.code = if all { 0 } else { 2 };
            Ok(report)
        }
    }
}

fn emit(cli: &Cli, report: &Report) -> Result<(), Failure> {
    let body = match cli.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.json)
                .map_err(|e| arg_error(e.to_string()))?;
            s.push('\n');
            s
        }
        Format::Csv => report
            .csv
            .clone()
            .ok_or_else(|| arg_error("this command has no CSV form"))?,
    };
    match &cli.output {
        Some(path) => std::fs::write(path, body).map_err(io_error),
        None => std::io::stdout()
            .lock()
            .write_all(body.as_bytes())
            .map_err(io_error),
    }
}

fn fail(f: &Failure) -> ExitCode {
    let line = json!({"error": f.kind, "message": f.message, "exit_code": f.code});
    eprintln!("{line}");
    ExitCode::from(f.code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            return fail(&arg_error(first.trim_start_matches("error: ")));
        }
    };
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return fail(&arg_error("--jobs must be at least 1"));
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            return fail(&arg_error(e.to_string()));
        }
    }
    match run(&cli).and_then(|r| emit(&cli, &r).map(|_| r.code)) {
        Ok(code) => ExitCode::from(code),
        Err(f) => fail(&f),
    }
}
