use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const KERNEL_PLUS_BUMP: &str = "2*kappa:alpha=0.5;side=left + bump:c=0.6;r=0.2";

fn frac(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_frac"))
        .args(args)
        .env_remove("FRAC_DEFAULT_N")
        .output()
        .expect("binary runs")
}

fn status(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn schema() -> jsonschema::JSONSchema {
    let text = fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/report.schema.json")).unwrap();
    let schema: Value = serde_json::from_str(&text).unwrap();
    jsonschema::JSONSchema::compile(&schema).expect("schema compiles")
}

fn assert_valid(report: &Value) {
    let schema = schema();
    if let Err(errors) = schema.validate(report) {
        let msgs: Vec<String> = errors.map(|e| format!("{e} at {}", e.instance_path)).collect();
        panic!("report violates the schema: {msgs:?}");
    };
}

/// Rows of a `compute` CSV, skipping the header and comments.
fn rows(text: &str) -> Vec<(f64, f64)> {
    text.lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            let (x, v) = l.split_once(',').unwrap();
            (x.parse().unwrap(), v.parse().unwrap())
        })
        .collect()
}

#[test]
fn derivative_of_one_at_the_right_end() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.csv");
    let o = frac(&[
        "compute", "deriv", "--alpha", "0.5", "--side", "left", "--scheme", "rl", "--fn", "const:1", "--grid",
        "0,1,1024", "--out", path_str(&out),
    ]);
    assert_eq!(status(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("x,value\n# flagged\n0.0000000000000000e0,inf\n"));
    let r = rows(&text);
    assert_eq!(r.len(), 1025);
    let (x, v) = r[1024];
    assert_eq!(x, 1.0);
    assert!((v - 0.5642).abs() < 1e-3, "{v}");
}

#[test]
fn csv_output_reads_back_bit_for_bit() {
    let dir = tempfile::tempdir().unwrap();
    let (first, second) = (dir.path().join("u.csv"), dir.path().join("v.csv"));
    let spec = "pow:a=0;terms=1*-0.4,2*1.5";
    let o = frac(&["compute", "integral", "--alpha", "0.3", "--fn", spec, "--grid", "0,2,256", "--out", path_str(&first)]);
    assert_eq!(status(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    // the same operator applied to the spec and to its samples read back from disk
    let direct = frac(&["compute", "deriv", "--alpha", "0.3", "--scheme", "rl", "--fn", spec, "--grid", "0,2,256"]);
    let o = frac(&["compute", "deriv", "--alpha", "0.3", "--scheme", "rl", "--csv", path_str(&first), "--out", path_str(&second)]);
    assert_eq!(status(&direct), 0, "{}", String::from_utf8_lossy(&direct.stderr));
    assert_eq!(status(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&first).unwrap();
    let parsed = rows(&text);
    assert_eq!(parsed.len(), 257);
    let printed: Vec<String> = parsed.iter().map(|(x, v)| format!("{x:.16e},{v:.16e}")).collect();
    let body: Vec<&str> = text.lines().skip(1).filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body, printed);
    // D^.3 I^.3 u = u away from the singular end
    let back = rows(&fs::read_to_string(&second).unwrap());
    for &(x, v) in back.iter().filter(|(x, _)| *x >= 0.5) {
        let u = x.powf(-0.4) + 2.0 * x.powf(1.5);
        assert!((v - u).abs() / u < 1e-2, "x={x}: {v} vs {u}");
    }
}

#[test]
fn ftwfc_report_recovers_the_constant() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("report.json");
    let o = frac(&[
        "verify", "ftwfc", "--alpha", "0.5", "--fn", KERNEL_PLUS_BUMP, "--grid", "0,1,2048", "--json", path_str(&json),
    ]);
    assert_eq!(status(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("PASS ftwfc"));
    let report: Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_valid(&report);
    assert_eq!(report["passed"], Value::Bool(true));
    let c = report["recovered_c"].as_f64().unwrap();
    assert!((c - 2.0).abs() <= 0.02, "{c}");
}

#[test]
fn norm_on_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("n.json");
    let o = frac(&[
        "norm", "--space", "gagliardo", "--alpha", "0.5", "--p", "2", "--fn", "gauss:mu=0;s=1", "--line", "16,4096",
        "--json", path_str(&json),
    ]);
    assert_eq!(status(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let printed: f64 = String::from_utf8_lossy(&o.stdout).trim().parse().unwrap();
    let saved: Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(saved["value"].as_f64().unwrap(), printed);
    // W^{1/2,2} norm of e^{-x^2/2}: ‖u‖_2^2 = √π and the Gagliardo double
    // integral equals ∫|ξ||û|^2 dξ = 2π
    let pi = std::f64::consts::PI;
    let want = (pi.sqrt() + 2.0 * pi).sqrt();
    assert!((printed - want).abs() / want < 1e-2, "{printed} vs {want}");
}

#[test]
fn failed_verification_exits_one() {
    let o = frac(&["verify", "weak_pairing", "--alpha", "0.5", "--fn", "const:1", "--v", "const:0", "--grid", "0,1,512"]);
    assert_eq!(status(&o), 1);
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("FAIL weak_pairing"));
}

#[test]
fn usage_errors_exit_two() {
    let cases: &[&[&str]] = &[
        &["norm", "--alpha", "0.5", "--bogus", "1"],
        &["compute", "deriv", "--fn", "const:1"],
        &["compute", "deriv", "--alpha", "0.5", "--fn", "const:1", "--csv", "x.csv"],
        &["compute", "deriv", "--alpha", "0.5", "--fn", "nonsense:1"],
        &["compute", "deriv", "--alpha", "0.5", "--fn", "const:1", "--grid", "0,1"],
        &["verify", "density", "--alpha", "0.6", "--p", "2", "--mode", "piecewise_constant", "--fn", "const:1"],
        &["verify", "inclusivity", "--alpha", "0.7", "--beta", "0.4", "--p", "2", "--fn", "bump:c=0.5;r=0.3"],
        &["suite", "nope"],
    ];
    for args in cases {
        let o = frac(args);
        assert_eq!(status(&o), 2, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn io_errors_exit_three() {
    let o = frac(&["compute", "deriv", "--alpha", "0.5", "--fn", "const:1", "--grid", "0,1,64", "--out", "/nonexistent/dir/d.csv"]);
    assert_eq!(status(&o), 3);
    let o = frac(&["norm", "--p", "2", "--csv", "/nonexistent/u.csv"]);
    assert_eq!(status(&o), 3);
    let o = frac(&["--config", "/nonexistent/frac.toml", "norm", "--p", "2", "--fn", "const:1"]);
    assert_eq!(status(&o), 3);
}

#[test]
fn default_grid_size_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_frac"))
        .args(["compute", "kappa", "--alpha", "0.5"])
        .env("FRAC_DEFAULT_N", "64")
        .output()
        .unwrap();
    assert_eq!(status(&o), 0);
    assert_eq!(rows(&String::from_utf8_lossy(&o.stdout)).len(), 65);
    let o = Command::new(env!("CARGO_BIN_EXE_frac"))
        .args(["compute", "kappa", "--alpha", "0.5"])
        .env("FRAC_DEFAULT_N", "lots")
        .output()
        .unwrap();
    assert_eq!(status(&o), 2);
}

#[test]
fn config_file_supplies_missing_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("frac.toml");
    fs::write(&cfg, "alpha = 0.5\np = 2.0\nfn = [\"gauss:mu=0;s=1\"]\nline = \"16,4096\"\nspace = \"gagliardo\"\n").unwrap();
    let from_file = frac(&["--config", path_str(&cfg), "norm"]);
    assert_eq!(status(&from_file), 0, "{}", String::from_utf8_lossy(&from_file.stderr));
    let direct = frac(&["norm", "--space", "gagliardo", "--alpha", "0.5", "--p", "2", "--fn", "gauss:mu=0;s=1", "--line", "16,4096"]);
    assert_eq!(from_file.stdout, direct.stdout);
    // flags win over the file
    let overridden = frac(&["--config", path_str(&cfg), "norm", "--alpha", "0.25"]);
    assert_ne!(overridden.stdout, direct.stdout);

    fs::write(&cfg, "alhpa = 0.5\n").unwrap();
    assert_eq!(status(&frac(&["--config", path_str(&cfg), "norm"])), 2);
}

#[test]
fn tolerance_override() {
    let args = ["verify", "ftwfc", "--alpha", "0.5", "--fn", KERNEL_PLUS_BUMP, "--grid", "0,1,512"];
    assert_eq!(status(&frac(&args)), 0);
    let mut strict = args.to_vec();
    strict.extend(["--tol", "1e-9"]);
    assert_eq!(status(&frac(&strict)), 1);
}

#[test]
fn artifacts_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        let o = frac(&["suite", "ibp", "--n", "512", "--json", path_str(p)]);
        assert_eq!(status(&o), 0);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn golden_reports() {
    let dir = tempfile::tempdir().unwrap();
    let single = dir.path().join("ftwfc.json");
    let o = frac(&[
        "verify", "ftwfc", "--alpha", "0.5", "--fn", KERNEL_PLUS_BUMP, "--grid", "0,1,1024", "--json", path_str(&single),
    ]);
    assert_eq!(status(&o), 0);
    let suite = dir.path().join("suite_pairing.json");
    let o = frac(&["suite", "pairing", "--n", "512", "--json", path_str(&suite)]);
    assert_eq!(status(&o), 0);
    for (fresh, name) in [(&single, "ftwfc.json"), (&suite, "suite_pairing.json")] {
        let want = fs::read(golden(name)).unwrap();
        assert!(fs::read(fresh).unwrap() == want, "{name} differs from the golden file");
    }
    let suite: Value = serde_json::from_slice(&fs::read(&suite).unwrap()).unwrap();
    for outcome in suite["outcomes"].as_array().unwrap() {
        assert_valid(&outcome["report"]);
    }
}

#[test]
fn every_check_writes_a_valid_report() {
    let dir = tempfile::tempdir().unwrap();
    let bump = "bump:c=0.5;r=0.3";
    let cases: Vec<Vec<&str>> = vec![
        vec!["weak_pairing", "--alpha", "0.5", "--fn", "pow:a=0;terms=1*1.3"],
        vec!["ibp", "--alpha", "0.75", "--p", "2", "--q", "2", "--fn", "bump:c=0.4;r=0.3", "--fn", "bump:c=0.6;r=0.25"],
        vec!["poincare", "--alpha", "0.3", "--p", "2", "--grid", "0,1,512"],
        vec!["sobolev", "--alpha", "0.3", "--p", "2", "--r", "5", "--grid", "0,1,512"],
        vec!["extend_trivial", "--alpha", "0.5", "--p", "2", "--fn", "bump:c=0.5;r=0.2", "--grid", "0,1,256"],
        vec!["extend_interior", "--alpha", "0.5", "--p", "1.5", "--fn", "const:1", "--inner", "0.25,0.75", "--grid", "0,1,256"],
        vec!["extend_exterior", "--alpha", "0.25", "--p", "2", "--mu", "5", "--fn", "const:1", "--grid", "0,1,256"],
        vec!["embedding", "--alpha", "0.75", "--p", "2", "--c", "0.25", "--grid", "0,1,256"],
        vec!["consistency_w1p", "--alpha", "0.5", "--p", "1.5", "--fn", "pow:a=0;terms=1*0,1*1"],
        vec!["line", "--alpha", "0.5", "--line", "32,4096"],
        vec!["density", "--alpha", "0.3", "--p", "2", "--fn", bump, "--grid", "0,1,1024"],
        vec!["inclusivity", "--alpha", "0.4", "--beta", "0.7", "--p", "2", "--fn", bump],
    ];
    for (k, case) in cases.iter().enumerate() {
        let json = dir.path().join(format!("r{k}.json"));
        let mut args = vec!["verify"];
        args.extend(case.iter().copied());
        args.extend(["--json", path_str(&json)]);
        let o = frac(&args);
        assert_eq!(status(&o), 0, "{case:?}: {}{}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr));
        let report: Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
        assert_valid(&report);
    }
}
