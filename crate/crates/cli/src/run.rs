use std::collections::BTreeMap;
use std::path::Path;

use fracsob::operators::{frac_integral, kappa};
use fracsob::spaces::{fourier_seminorm, lp_norm, lp_norm_line, sobolev_conjugate, sobolev_norm, Operand};
use fracsob::verifier::{
    check_consistency_w1p, check_density, check_embedding_trace, check_ftwfc, check_ibp, check_inclusivity,
    check_line_equivalences, check_poincare, check_sobolev_inequality, check_weak_pairing, extend_exterior,
    extend_interior, extend_trivial, run_suite, Candidate, DensityMode, IbpVariant, PoincareVariant, SobolevDomain,
    SuiteConfig, DEFAULT_N,
};
use fracsob::{
    FunctionSpec, Grid, LineFunction, NormFamily, NormSpec, OperatorSpec, Realization, SampledFunction, Side,
    TestBattery, VerificationReport,
};
use serde::Serialize;

use crate::args::{count, numbers, Check, ComputeOp, Format, Params};
use crate::io::{csv_bytes, json_bytes, read_csv, write_atomic};
use crate::{Failure, Outcome};

/// Default line truncation when `--line` is absent.
const LINE_HALF_WIDTH: f64 = 32.0;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// Cells of the default grid: `FRAC_DEFAULT_N` or 2048.
fn default_n() -> Result<usize, Failure> {
    match std::env::var("FRAC_DEFAULT_N") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n >= 2)
            .ok_or_else(|| usage(format!("FRAC_DEFAULT_N must be an integer of at least 2, got `{v}`"))),
        Err(_) => Ok(DEFAULT_N),
    }
}

fn grid(p: &Params) -> Result<Grid, Failure> {
    match &p.grid {
        Some(text) => {
            let v = numbers("grid", text, 3)?;
            Ok(Grid::new(v[0], v[1], count("grid", v[2])?)?)
        }
        None => Ok(Grid::new(0.0, 1.0, default_n()?)?),
    }
}

fn line(p: &Params) -> Result<(f64, usize), Failure> {
    match &p.line {
        Some(text) => {
            let v = numbers("line", text, 2)?;
            if !(v[0] > 0.0 && v[0].is_finite()) {
                return Err(usage(format!("--line: half width must be positive, got {}", v[0])));
            }
            Ok((v[0], count("line", v[1])?))
        }
        None => Ok((LINE_HALF_WIDTH, 4 * default_n()?)),
    }
}

fn need<T: Copy>(v: Option<T>, flag: &str) -> Result<T, Failure> {
    v.ok_or_else(|| usage(format!("--{flag} is required")))
}

fn side(p: &Params) -> Result<Side, Failure> {
    Ok(p.side.as_deref().unwrap_or("left").parse::<Side>()?)
}

fn spec(text: &str) -> Result<FunctionSpec, Failure> {
    Ok(FunctionSpec::parse(text)?)
}

/// The single function of a command: `--fn` or `--csv`, not both.
enum Input {
    Spec(FunctionSpec),
    Csv(SampledFunction),
}

fn input(p: &Params) -> Result<Input, Failure> {
    match (p.functions.as_slice(), &p.csv) {
        ([one], None) => Ok(Input::Spec(spec(one)?)),
        ([], Some(path)) => Ok(Input::Csv(read_csv(path)?)),
        ([], None) => Err(usage("give the function with --fn or --csv")),
        (_, Some(_)) => Err(usage("--fn and --csv are exclusive")),
        (many, None) => Err(usage(format!("expected one --fn, got {}", many.len()))),
    }
}

fn input_spec(p: &Params, slots: usize) -> Result<Vec<FunctionSpec>, Failure> {
    if p.csv.is_some() {
        return Err(usage("this check needs function specs; --csv is not accepted"));
    }
    if p.functions.len() != slots {
        return Err(usage(format!("expected {slots} --fn, got {}", p.functions.len())));
    }
    p.functions.iter().map(|s| spec(s)).collect()
}

fn sampled_input(p: &Params) -> Result<SampledFunction, Failure> {
    match input(p)? {
        Input::Spec(s) => {
            let g = grid(p)?;
            Ok(s.resolve(g.a(), g.b()).sample(g)?)
        }
        Input::Csv(u) => {
            if p.grid.is_some() {
                return Err(usage("--grid is taken from the CSV file"));
            }
            Ok(u)
        }
    }
}

fn line_input(p: &Params) -> Result<LineFunction, Failure> {
    match input(p)? {
        Input::Spec(s) => {
            let (l, n) = line(p)?;
            Ok(s.resolve_line(l).sample_line(l, n)?)
        }
        Input::Csv(u) => Ok(LineFunction::from_sampled(&u)?),
    }
}

fn battery(p: &Params, default: impl FnOnce() -> TestBattery) -> Result<TestBattery, Failure> {
    if p.battery.is_empty() {
        Ok(default())
    } else {
        Ok(TestBattery::new(p.battery.iter().map(|s| spec(s)).collect::<Result<_, _>>()?))
    }
}

fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match path {
        Some(path) => write_atomic(path, bytes),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(bytes).map_err(|e| Failure::Io(format!("stdout: {e}")))
        }
    }
}

#[derive(Serialize)]
struct Samples<'a> {
    x: Vec<f64>,
    /// `null` at flagged nodes.
    value: &'a [f64],
    flagged: Vec<usize>,
}

fn write_samples(p: &Params, nodes: Vec<f64>, values: &[f64], flagged: &dyn Fn(usize) -> bool) -> Result<(), Failure> {
    let bytes = match p.format.unwrap_or_default() {
        Format::Csv => csv_bytes(&nodes, values, flagged),
        Format::Json => {
            let flagged = (0..values.len()).filter(|&j| flagged(j)).collect();
            json_bytes(&Samples { x: nodes, value: values, flagged })
        }
    };
    emit(p.out.as_deref(), &bytes)
}

pub fn compute(op: ComputeOp, p: &Params) -> Result<Outcome, Failure> {
    let alpha = need(p.alpha, "alpha")?;
    let side = side(p)?;
    match op {
        ComputeOp::Kappa => {
            if !p.functions.is_empty() || p.csv.is_some() {
                return Err(usage("kappa takes no input function"));
            }
            let k = kappa(alpha, side, grid(p)?)?;
            write_samples(p, k.grid().nodes(), k.values(), &|j| k.is_flagged(j))?;
        }
        ComputeOp::Integral => {
            let u = sampled_input(p)?;
            let v = frac_integral(&u, alpha, side)?;
            write_samples(p, v.grid().nodes(), v.values(), &|j| v.is_flagged(j))?;
        }
        ComputeOp::Deriv => {
            let scheme = p.scheme.as_deref().unwrap_or("rl").parse::<Realization>()?;
            let op = OperatorSpec::new(alpha, side, scheme)?;
            if scheme.on_line() || (scheme == Realization::Grunwald && p.line.is_some()) {
                let d = op.apply_line(&line_input(p)?)?;
                for w in &d.warnings {
                    eprintln!("warning: {w}");
                }
                let d = d.value;
                write_samples(p, d.grid().nodes(), d.values(), &|_| false)?;
            } else {
                let d = op.apply(&sampled_input(p)?)?;
                write_samples(p, d.grid().nodes(), d.values(), &|j| d.is_flagged(j))?;
            }
        }
    }
    Ok(Outcome::Done)
}

#[derive(Serialize)]
struct NormReport {
    space: String,
    alpha: Option<f64>,
    p: f64,
    value: Option<f64>,
    divergent: bool,
    inputs: Vec<String>,
}

fn show(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "inf".to_string()
    }
}

pub fn norm(p: &Params) -> Result<Outcome, Failure> {
    let exponent = need(p.p, "p")?;
    let space = p.space.as_deref().unwrap_or("lp");
    let on_line = p.line.is_some();
    let value = match space {
        "lp" => {
            if on_line {
                lp_norm_line(&line_input(p)?, exponent)?
            } else {
                lp_norm(&sampled_input(p)?, exponent, false)?
            }
        }
        "fourier" => {
            let alpha = need(p.alpha, "alpha")?;
            fourier_seminorm(&line_input(p)?, alpha, exponent)?.value
        }
        other => {
            let family = other.parse::<NormFamily>()?;
            let ns = NormSpec::new(family, need(p.alpha, "alpha")?, exponent)?;
            if on_line {
                let u = line_input(p)?;
                sobolev_norm(Operand::Line(&u), &ns)?.value
            } else {
                let u = sampled_input(p)?;
                sobolev_norm(Operand::Interval(&u), &ns)?.value
            }
        }
    };
    println!("{}", show(value));
    if let Some(path) = &p.json {
        let mut inputs = p.functions.clone();
        if let Some(csv) = &p.csv {
            inputs.push(csv.display().to_string());
        }
        let report = NormReport {
            space: space.to_string(),
            alpha: p.alpha,
            p: exponent,
            value: value.is_finite().then_some(value),
            divergent: !value.is_finite(),
            inputs,
        };
        write_atomic(path, &json_bytes(&report))?;
    }
    Ok(Outcome::Done)
}

fn poincare_variant(text: &str) -> Result<PoincareVariant, Failure> {
    Ok(match text {
        "kernel_subtracted" => PoincareVariant::KernelSubtracted,
        "mathring" => PoincareVariant::Mathring,
        "symmetric" => PoincareVariant::Symmetric,
        other => return Err(usage(format!("unknown poincare variant `{other}`"))),
    })
}

fn ibp_variant(text: &str) -> Result<IbpVariant, Failure> {
    Ok(match text {
        "symmetric" => IbpVariant::Symmetric,
        "one_sided_zero_trace" => IbpVariant::OneSidedZeroTrace,
        other => return Err(usage(format!("unknown ibp variant `{other}`"))),
    })
}

fn density_mode(text: &str) -> Result<DensityMode, Failure> {
    Ok(match text {
        "smooth" => DensityMode::Smooth,
        "piecewise_constant" => DensityMode::PiecewiseConstant,
        other => return Err(usage(format!("unknown density mode `{other}`"))),
    })
}

const HELD_OUT: &str = "pow:a=0;terms=1*2,-1*3";

fn held_out(p: &Params, default: &str) -> Result<FunctionSpec, Failure> {
    spec(p.held_out.as_deref().unwrap_or(default))
}

fn run_check(check: Check, p: &Params) -> Result<VerificationReport, Failure> {
    let alpha = need(p.alpha, "alpha")?;
    let side = side(p)?;
    let report = match check {
        Check::WeakPairing => {
            let u = &input_spec(p, 1)?[0];
            let v = match p.v.as_deref().unwrap_or("oracle") {
                "oracle" => Candidate::Oracle,
                "numerical" => Candidate::Numerical,
                other => Candidate::Spec(spec(other)?),
            };
            let g = grid(p)?;
            let b = battery(p, || TestBattery::bumps(g.a(), g.b(), 10))?;
            check_weak_pairing(u, &v, alpha, side, &b, g)?
        }
        Check::Ftwfc => check_ftwfc(&input_spec(p, 1)?[0], alpha, side, grid(p)?)?,
        Check::Ibp => {
            let uv = input_spec(p, 2)?;
            let variant = ibp_variant(p.variant.as_deref().unwrap_or("symmetric"))?;
            check_ibp(&uv[0], &uv[1], alpha, need(p.p, "p")?, need(p.q, "q")?, variant, grid(p)?)?
        }
        Check::Poincare => {
            let variant = poincare_variant(p.variant.as_deref().unwrap_or("kernel_subtracted"))?;
            let b = battery(p, || match variant {
                PoincareVariant::KernelSubtracted => TestBattery::kernel_interval(),
                _ => TestBattery::regular_interval(),
            })?;
            check_poincare(&b, &held_out(p, HELD_OUT)?, alpha, need(p.p, "p")?, side, variant, grid(p)?)?
        }
        Check::Sobolev => {
            let exponent = need(p.p, "p")?;
            let r = match p.r {
                Some(r) => r,
                None => sobolev_conjugate(exponent, alpha)?,
            };
            if p.line.is_some() {
                let (half_width, n) = line(p)?;
                let b = battery(p, TestBattery::line_default)?;
                let held = held_out(p, "gauss:mu=0.2;s=0.9")?;
                check_sobolev_inequality(&b, &held, alpha, exponent, r, side, SobolevDomain::Line { half_width, n })?
            } else {
                let b = battery(p, TestBattery::kernel_interval)?;
                let domain = SobolevDomain::Interval(grid(p)?);
                check_sobolev_inequality(&b, &held_out(p, HELD_OUT)?, alpha, exponent, r, side, domain)?
            }
        }
        Check::ExtendTrivial => {
            let u = sampled_input(p)?;
            let g = *u.grid();
            let ambient = match &p.ambient {
                Some(text) => {
                    let v = numbers("ambient", text, 3)?;
                    Grid::new(v[0], v[1], count("ambient", v[2])?)?
                }
                None => Grid::new(g.a() - g.width(), g.b() + g.width(), 3 * g.n())?,
            };
            extend_trivial(&u, alpha, need(p.p, "p")?, side, ambient)?.1
        }
        Check::ExtendInterior => {
            let inner = numbers("inner", p.inner.as_deref().ok_or_else(|| usage("--inner is required"))?, 2)?;
            extend_interior(&sampled_input(p)?, alpha, need(p.p, "p")?, side, (inner[0], inner[1]))?.1
        }
        Check::ExtendExterior => {
            extend_exterior(&sampled_input(p)?, alpha, need(p.p, "p")?, need(p.mu, "mu")?, side)?.1
        }
        Check::Embedding => {
            let b = battery(p, TestBattery::trace_default)?;
            check_embedding_trace(&b, alpha, need(p.p, "p")?, need(p.c, "c")?, side, grid(p)?)?
        }
        Check::ConsistencyW1p => check_consistency_w1p(&input_spec(p, 1)?[0], alpha, need(p.p, "p")?, side, grid(p)?)?,
        Check::Line => {
            let (half_width, n) = line(p)?;
            check_line_equivalences(&battery(p, TestBattery::line_default)?, alpha, half_width, n)?
        }
        Check::Density => {
            let mode = density_mode(p.mode.as_deref().unwrap_or("smooth"))?;
            check_density(&input_spec(p, 1)?[0], alpha, need(p.p, "p")?, side, mode, grid(p)?)?
        }
        Check::Inclusivity => {
            let u = &input_spec(p, 1)?[0];
            check_inclusivity(u, alpha, need(p.beta, "beta")?, need(p.p, "p")?, side, grid(p)?)?
        }
    };
    Ok(match p.tol {
        Some(tol) if tol > 0.0 => report.with_tolerance(tol),
        Some(tol) => return Err(usage(format!("--tol must be positive, got {tol}"))),
        None => report,
    })
}

pub fn verify(check: Check, p: &Params) -> Result<Outcome, Failure> {
    let report = run_check(check, p)?;
    println!("{}", report.summary());
    if let Some(path) = &p.json {
        write_atomic(path, &json_bytes(&report))?;
    }
    Ok(if report.passed { Outcome::Passed } else { Outcome::Failed })
}

#[derive(Serialize)]
struct SuiteFile<'a> {
    group: &'a str,
    n: usize,
    passed: bool,
    outcomes: &'a [fracsob::verifier::SuiteOutcome],
}

pub fn suite(group: &str, p: &Params) -> Result<Outcome, Failure> {
    let n = match p.n {
        Some(n) => n,
        None => default_n()?,
    };
    let mut outcomes = run_suite(group, &SuiteConfig { n })?;
    if let Some(tol) = p.tol {
        if tol <= 0.0 {
            return Err(usage(format!("--tol must be positive, got {tol}")));
        }
        for o in &mut outcomes {
            o.report = o.report.take().map(|r| r.with_tolerance(tol));
        }
    }
    let mut by_theorem: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for o in &outcomes {
        println!("{}", o.summary());
        if let Some(r) = &o.report {
            let e = by_theorem.entry(r.theorem_id.as_str()).or_default();
            e.0 += usize::from(r.passed);
            e.1 += 1;
        }
    }
    println!();
    println!("{:<22} {:>6}", "theorem", "passed");
    for (id, (ok, total)) in &by_theorem {
        println!("{id:<22} {:>6}", format!("{ok}/{total}"));
    }
    let passed = outcomes.iter().all(|o| o.passed());
    let failed = outcomes.iter().filter(|o| !o.passed()).count();
    println!("{} checks, {failed} failed", outcomes.len());
    if let Some(path) = &p.json {
        let file = SuiteFile {
            group,
            n,
            passed,
            outcomes: &outcomes,
        };
        write_atomic(path, &json_bytes(&file))?;
    }
    Ok(if passed { Outcome::Passed } else { Outcome::Failed })
}
