use std::process::{Command, Output};

use serde_json::Value;

fn modwave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modwave"))
        .args(args)
        .env_remove("MODWAVE_JOBS")
        .output()
        .expect("binary runs")
}

fn json_ok(args: &[&str]) -> Value {
    let out = modwave(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

/// Exit code and the parsed single-line stderr JSON.
fn json_err(args: &[&str]) -> (i32, Value) {
    let out = modwave(args);
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert_eq!(stderr.trim_end().lines().count(), 1, "{stderr}");
    (out.status.code().unwrap(), serde_json::from_str(&stderr).unwrap())
}

#[test]
fn index_unstable_at_two() {
    let v = json_ok(&["index", "--model", "fdch-surface", "--T", "0", "--kappa", "2"]);
    assert_eq!(v["classification"], "unstable");
    assert!(v["delta"].as_f64().unwrap() < 0.0);
    assert_eq!(v["model"], "fdch_surface");
}

#[test]
fn ch_critical_root_is_six() {
    let v = json_ok(&["critical", "--model", "ch", "--factor", "i1", "--kmin", "1", "--kmax", "10"]);
    let roots = v["roots"].as_array().unwrap();
    assert_eq!(roots.len(), 1);
    assert!((roots[0]["kappa"].as_f64().unwrap() - 6.0).abs() < 1e-8);
    assert_eq!(roots[0]["factor"], "i1");
}

#[test]
fn speed_at_zero() {
    let v = json_ok(&["speed", "--model", "water-wave", "--T", "0", "--kappa", "0"]);
    assert_eq!(v["speed"].as_f64(), Some(1.0));
    assert_eq!(v["group_speed"].as_f64(), Some(1.0));
}

#[test]
fn coeffs_ch_has_null_p1() {
    let v = json_ok(&["coeffs", "--model", "ch", "--kappa", "6"]);
    assert!(v["coefficients"]["p1"].is_null());
    assert!((v["coefficients"]["h0"].as_f64().unwrap() - 1.5).abs() < 1e-12);
}

#[test]
fn wave_accepts_negative_b() {
    let v = json_ok(&["wave", "--kappa", "1", "--a", "0.01", "--b", "-0.001"]);
    assert!(v["residual_norm"].as_f64().unwrap() <= 1e-10);
    assert_eq!(v["coeffs"][1].as_f64(), Some(0.01));
}

#[test]
fn domain_errors_exit_one() {
    let (code, e) = json_err(&["index", "--T", "0.33333333", "--kappa", "1"]);
    assert_eq!(code, 1);
    assert_eq!(e["error"], "unsupported_parameter");
    assert_eq!(e["exit_code"], 1);

    let (code, e) = json_err(&["index", "--kappa", "-1"]);
    assert_eq!(code, 1);
    assert_eq!(e["error"], "domain");

    let (code, e) = json_err(&["wave", "--kappa", "1", "--unknown-flag", "3"]);
    assert_eq!(code, 1);
    assert_eq!(e["error"], "argument");

    let (code, _) = json_err(&["tension-limit", "--model", "ch"]);
    assert_eq!(code, 1);
}

#[test]
fn resonance_exits_one() {
    // second-harmonic resonance at T = 0.1: c(κ) = c(2κ)
    let c = |k: f64| ((1.0 + 0.1 * k * k) * k.tanh() / k).sqrt();
    let (mut lo, mut hi) = (1.0, 4.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (c(mid) - c(2.0 * mid) > 0.0) == (c(lo) - c(2.0 * lo) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let k = format!("{}", 0.5 * (lo + hi));
    let (code, e) = json_err(&["coeffs", "--T", "0.1", "--kappa", &k]);
    assert_eq!(code, 1, "{e}");
}

#[test]
fn newton_failure_exits_two() {
    let (code, e) = json_err(&["wave", "--kappa", "10", "--a", "0.1", "--b", "0.1"]);
    assert_eq!(code, 2);
    assert_eq!(e["error"], "convergence");
}

#[test]
fn jobs_flag_and_env() {
    let (code, e) = json_err(&["--jobs", "0", "index", "--kappa", "1"]);
    assert_eq!(code, 1);
    assert!(e["message"].as_str().unwrap().contains("jobs"));

    let out = Command::new(env!("CARGO_BIN_EXE_modwave"))
        .args(["spectrum", "--kappa", "2", "--a", "0.003", "--M", "24", "--xi-points", "8"])
        .env("MODWAVE_JOBS", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["growth_rate"].as_f64().unwrap() > 0.0);

    let out = Command::new(env!("CARGO_BIN_EXE_modwave"))
        .args(["index", "--kappa", "1"])
        .env("MODWAVE_JOBS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn spectrum_at_one_xi() {
    let v = json_ok(&["spectrum", "--kappa", "1", "--a", "0.01", "--xi", "0.01", "--M", "32"]);
    let s = &v["spectrum"];
    assert_eq!(s["eigenvalues"].as_array().unwrap().len(), 65);
    assert!(s["max_real"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn delta0_csv() {
    let out = modwave(&["--format", "csv", "delta0", "--kappa", "1", "--xi", "0.001", "--a", "0.0003"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("q0,q1,q2,q3,delta0"));
    let d: f64 = lines.next().unwrap().rsplit(',').next().unwrap().parse().unwrap();
    assert!(d > 0.0);
}

#[test]
fn unknown_format_rejected() {
    let (code, _) = json_err(&["--format", "xml", "index", "--kappa", "1"]);
    assert_eq!(code, 1);
}

#[test]
fn diagram_files_and_determinism() {
    let dir = std::env::temp_dir().join(format!("modwave-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let run = |tag: &str| {
        let curves = dir.join(format!("curves-{tag}.csv"));
        let grid = dir.join(format!("grid-{tag}.csv"));
        let svg = dir.join(format!("d-{tag}.svg"));
        let v = json_ok(&[
            "diagram",
            "--t-points",
            "60",
            "--nk",
            "40",
            "--ns",
            "20",
            "--curves",
            curves.to_str().unwrap(),
            "--grid",
            grid.to_str().unwrap(),
            "--svg",
            svg.to_str().unwrap(),
        ]);
        (
            v,
            std::fs::read_to_string(curves).unwrap(),
            std::fs::read_to_string(grid).unwrap(),
            std::fs::read_to_string(svg).unwrap(),
        )
    };
    let (v, c1, g1, svg) = run("a");
    let (_, c2, g2, _) = run("b");
    assert_eq!(c1, c2);
    assert_eq!(g1, g2);
    assert!(c1.starts_with("curve_id,kappa,kappa_sqrtT\n"));
    assert!(g1.starts_with("kappa,kappa_sqrtT,class\n"));
    assert_eq!(g1.lines().count(), 1 + 40 * 20);
    assert!(g1.lines().skip(1).all(|l| matches!(l.rsplit(',').next(), Some("S" | "U" | "I"))));
    assert!(svg.starts_with("<svg"));
    assert!(v["curves"].as_array().unwrap().iter().any(|c| c["id"] == "4-0"));
    assert_eq!(v["asymptotes"].as_array().unwrap().len(), 2);
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn output_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("modwave-out-{}.json", std::process::id()));
    let out = modwave(&["index", "--kappa", "1", "-o", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["classification"], "stable");
    std::fs::remove_file(path).ok();
}

#[test]
fn help_lists_flags_with_defaults() {
    let out = modwave(&["spectrum", "--help"]);
    assert!(out.status.success());
    let help = String::from_utf8(out.stdout).unwrap();
    for flag in ["--kappa", "--T", "--a", "--b", "--N", "--M", "--xi", "--jobs", "--format"] {
        assert!(help.contains(flag), "{flag} missing");
    }
    assert!(help.contains("[default: 96]"));
}

#[test]
fn validate_quick_table() {
    let out = modwave(&["--format", "csv", "validate", "--quick"]);
    let table = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = table.lines().filter(|l| l.starts_with('[')).collect();
    assert_eq!(rows.len(), 7);
    // a red criterion makes the verdict non-zero
    let all_pass = rows.iter().all(|r| r.starts_with("[PASS]"));
    assert_eq!(out.status.code(), Some(if all_pass { 0 } else { 2 }));
}
