use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::UsageError;

/// Fractional derivatives, Sobolev norms and theorem checks from the shell.
#[derive(Debug, Parser)]
#[command(name = "frac", version, about)]
pub struct Cli {
    /// TOML file with defaults for any flag (keys spelt as the flags).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Apply an operator and write the sampled result.
    Compute {
        op: ComputeOp,
        #[command(flatten)]
        params: Params,
    },
    /// Evaluate a norm or seminorm.
    Norm {
        #[command(flatten)]
        params: Params,
    },
    /// Run one check and write its report.
    Verify {
        check: Check,
        #[command(flatten)]
        params: Params,
    },
    /// Run a group of checks with the built-in batteries.
    Suite {
        #[arg(default_value = "all")]
        group: String,
        #[command(flatten)]
        params: Params,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ComputeOp {
    /// Fractional derivative (`--scheme` picks the realization).
    Deriv,
    /// Riemann-Liouville integral.
    Integral,
    /// Kernel function of the given order and side.
    Kappa,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Check {
    WeakPairing,
    Ftwfc,
    Ibp,
    Poincare,
    Sobolev,
    ExtendTrivial,
    ExtendInterior,
    ExtendExterior,
    Embedding,
    ConsistencyW1p,
    Line,
    Density,
    Inclusivity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Every flag shared by the subcommands. All are optional so that a config
/// file can supply what the command line leaves out.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Params {
    /// Function spec, e.g. `kappa:alpha=0.5;side=left` (repeat for pairs).
    #[arg(long = "fn", value_name = "SPEC")]
    #[serde(rename = "fn")]
    pub functions: Vec<String>,
    /// Two-column CSV `x,value` instead of `--fn`.
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
    /// Battery member (repeatable); replaces the check's default battery.
    #[arg(long, value_name = "SPEC")]
    pub battery: Vec<String>,
    /// Derivative candidate for weak_pairing: oracle, numerical or a spec.
    #[arg(long, value_name = "CANDIDATE")]
    pub v: Option<String>,
    /// Held-out member of the inequality checks.
    #[arg(long, value_name = "SPEC")]
    pub held_out: Option<String>,

    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    /// Target exponent of the Sobolev inequality (default `p*`).
    #[arg(long)]
    pub r: Option<f64>,
    /// Integrability exponent of the exterior extension.
    #[arg(long)]
    pub mu: Option<f64>,
    /// Start (left) or end (right) of the Hölder window of the trace check.
    #[arg(long)]
    pub c: Option<f64>,
    /// left or right.
    #[arg(long)]
    pub side: Option<String>,
    /// rl, gl, caputo, marchaud or spectral.
    #[arg(long)]
    pub scheme: Option<String>,
    /// lp, one_sided_left, one_sided_right, symmetric, zero_trace_left,
    /// zero_trace_right, gagliardo or fourier.
    #[arg(long)]
    pub space: Option<String>,
    /// Check variant (poincare: kernel_subtracted|mathring|symmetric;
    /// ibp: symmetric|one_sided_zero_trace).
    #[arg(long)]
    pub variant: Option<String>,
    /// Density mode: smooth or piecewise_constant.
    #[arg(long)]
    pub mode: Option<String>,

    /// Interval grid `a,b,n`.
    #[arg(long, value_name = "A,B,N")]
    pub grid: Option<String>,
    /// Line grid `L,n` on `[-L, L]`.
    #[arg(long, value_name = "L,N")]
    pub line: Option<String>,
    /// Inner interval `c,d` of the interior extension.
    #[arg(long, value_name = "C,D")]
    pub inner: Option<String>,
    /// Ambient grid `A,B,n` of the trivial extension.
    #[arg(long, value_name = "A,B,N")]
    pub ambient: Option<String>,
    /// Interval cells of the suite.
    #[arg(long)]
    pub n: Option<usize>,

    /// Residual tolerance replacing the check's default.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Output file (compute).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Report or value as JSON.
    #[arg(long, value_name = "PATH")]
    pub json: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

macro_rules! fill {
    ($dst:ident, $src:ident; $($f:ident),*) => {
        $( if $dst.$f.is_none() { $dst.$f = $src.$f; } )*
    };
}

impl Params {
    /// Flags given on the command line win over the config file.
    pub fn merged(mut self, config: Params) -> Params {
        if self.functions.is_empty() {
            self.functions = config.functions;
        }
        if self.battery.is_empty() {
            self.battery = config.battery;
        }
        fill!(self, config; csv, v, held_out, alpha, beta, p, q, r, mu, c, side, scheme, space, variant,
              mode, grid, line, inner, ambient, n, tol, out, json, format);
        self
    }
}

pub fn load_config(path: &Path) -> Result<Params, crate::Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| crate::Failure::Io(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| UsageError(format!("config {}: {e}", path.display())).into())
}

/// Splits `a,b,...` into exactly `k` numbers.
pub fn numbers(flag: &str, text: &str, k: usize) -> Result<Vec<f64>, UsageError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != k {
        return Err(UsageError(format!("--{flag} expects {k} comma-separated numbers, got `{text}`")));
    }
    parts
        .iter()
        .map(|s| s.parse::<f64>().map_err(|_| UsageError(format!("--{flag}: `{s}` is not a number"))))
        .collect()
}

pub fn count(flag: &str, v: f64) -> Result<usize, UsageError> {
    if v.fract() == 0.0 && (1.0..=1e9).contains(&v) {
        Ok(v as usize)
    } else {
        Err(UsageError(format!("--{flag}: cell count must be a positive integer, got {v}")))
    }
}
