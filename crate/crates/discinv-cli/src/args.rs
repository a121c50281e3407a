//! Command-line flags, the optional `key = value` config file, and their
//! resolution into validated settings. Flags win over the config file, the
//! config file wins over per-command defaults.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64 as C64;

#[derive(Parser, Debug)]
#[command(name = "discinv", version, about = "Oscillating-solution toolkit for the Schrödinger equation on the unit disc")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the cutoff, phase, quadrature and operator identities.
    VerifyLemmas(Common),
    /// Estimate operator norms and time the FFT transforms.
    OperatorsBench(Common),
    /// Solve for oscillating solutions and tabulate remainder decay.
    CgoSolve(Common),
    /// Solve Dirichlet problems on the polar grid and export Cauchy data.
    ForwardSolve(Common),
    /// Reconstruct the potential at interior points from boundary data.
    Reconstruct(Common),
    /// Tabulate the L² error of the averaging operator against n.
    ConvergenceStudy(Common),
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::VerifyLemmas(c)
            | Command::OperatorsBench(c)
            | Command::CgoSolve(c)
            | Command::ForwardSolve(c)
            | Command::Reconstruct(c)
            | Command::ConvergenceStudy(c) => c,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::VerifyLemmas(_) => "verify-lemmas",
            Command::OperatorsBench(_) => "operators-bench",
            Command::CgoSolve(_) => "cgo-solve",
            Command::ForwardSolve(_) => "forward-solve",
            Command::Reconstruct(_) => "reconstruct",
            Command::ConvergenceStudy(_) => "convergence-study",
        }
    }
}

#[derive(Args, Debug, Default)]
pub struct Common {
    /// Nodes per side across [-1, 1].
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Padding factor; the square has half-width equal to it.
    #[arg(long, allow_hyphen_values = true)]
    pub pad: Option<String>,
    /// Frequency or comma-separated list of frequencies.
    #[arg(long, allow_hyphen_values = true)]
    pub n: Option<String>,
    /// Centre as `re,im`.
    #[arg(long, allow_hyphen_values = true)]
    pub z0: Option<String>,
    /// Catalog name or path to a BKGRID1 file.
    #[arg(long)]
    pub potential: Option<String>,
    /// Known second potential for difference reconstruction.
    #[arg(long)]
    pub reference: Option<String>,
    /// Lebesgue exponent, > 2.
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<String>,
    /// Fixed-point tolerance.
    #[arg(long, allow_hyphen_values = true)]
    pub tol: Option<String>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed for probes and random sampling.
    #[arg(long, allow_hyphen_values = true)]
    pub seed: Option<String>,
    /// Plain-text `key = value` file with defaults for the flags above.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// A bad flag or config value. Reported with exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn usage(flag: &str, msg: impl fmt::Display) -> UsageError {
    UsageError(format!("invalid value for --{flag}: {msg}"))
}

const KEYS: [&str; 10] = ["grid", "pad", "n", "z0", "potential", "reference", "p", "tol", "out", "seed"];

pub fn read_config(path: &Path) -> Result<HashMap<String, String>, UsageError> {
    let text = fs::read_to_string(path).map_err(|e| usage("config", format!("{}: {e}", path.display())))?;
    let mut out = HashMap::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| usage("config", format!("line {}: expected `key = value`", k + 1)))?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(usage("config", format!("line {}: unknown key `{key}`", k + 1)));
        }
        out.insert(key.to_string(), value.trim().to_string());
    }
    Ok(out)
}

/// Per-command fallbacks.
pub struct Defaults {
    pub n: &'static str,
    pub potential: &'static str,
}

#[derive(Clone, Debug)]
pub struct Settings {
    pub grid: usize,
    pub pad: usize,
    pub n: Vec<f64>,
    pub z0: Option<C64>,
    pub potential: String,
    pub reference: Option<String>,
    pub p: f64,
    pub tol: f64,
    pub out: PathBuf,
    pub seed: u64,
}

fn parse_num<T: std::str::FromStr>(flag: &str, s: &str) -> Result<T, UsageError>
where
    T::Err: fmt::Display,
{
    s.trim().parse::<T>().map_err(|e| usage(flag, format!("`{s}`: {e}")))
}

pub fn parse_n_list(s: &str) -> Result<Vec<f64>, UsageError> {
    let v = s
        .split(',')
        .map(|t| parse_num::<f64>("n", t))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(bad) = v.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
        return Err(usage("n", format!("frequencies must be positive, got {bad}")));
    }
    if v.windows(2).any(|w| w[1] <= w[0]) {
        return Err(usage("n", "list must be strictly increasing"));
    }
    Ok(v)
}

pub fn parse_z0(s: &str) -> Result<C64, UsageError> {
    let (re, im) = s.split_once(',').ok_or_else(|| usage("z0", format!("expected `re,im`, got `{s}`")))?;
    let z = C64::new(parse_num("z0", re)?, parse_num("z0", im)?);
    if !(z.norm() < 1.0) {
        return Err(usage("z0", format!("centre must lie inside the unit disc, got |z0| = {}", z.norm())));
    }
    Ok(z)
}

impl Settings {
    pub fn resolve(c: &Common, d: Defaults) -> Result<Self, UsageError> {
        let cfg = match &c.config {
            Some(p) => read_config(p)?,
            None => HashMap::new(),
        };
        let pick = |flag: &Option<String>, key: &str| flag.clone().or_else(|| cfg.get(key).cloned());

        let grid: usize = parse_num("grid", &pick(&c.grid, "grid").unwrap_or_else(|| "128".into()))?;
        if grid < 4 {
            return Err(usage("grid", format!("need at least 4 nodes per side, got {grid}")));
        }
        let pad: usize = parse_num("pad", &pick(&c.pad, "pad").unwrap_or_else(|| "2".into()))?;
        if pad < 2 {
            return Err(usage("pad", format!("convolutions need a padding factor of at least 2, got {pad}")));
        }
        let n = parse_n_list(&pick(&c.n, "n").unwrap_or_else(|| d.n.into()))?;
        let z0 = pick(&c.z0, "z0").map(|s| parse_z0(&s)).transpose()?;
        let p: f64 = parse_num("p", &pick(&c.p, "p").unwrap_or_else(|| "4".into()))?;
        if !(p > 2.0 && p.is_finite()) {
            return Err(usage("p", format!("must be finite and > 2, got {p}")));
        }
        let tol: f64 = parse_num("tol", &pick(&c.tol, "tol").unwrap_or_else(|| "1e-12".into()))?;
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(usage("tol", format!("must be positive, got {tol}")));
        }
        let seed: u64 = parse_num("seed", &pick(&c.seed, "seed").unwrap_or_else(|| "7".into()))?;
        let out = c
            .out
            .clone()
            .or_else(|| cfg.get("out").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."));
        Ok(Self {
            grid,
            pad,
            n,
            z0,
            potential: pick(&c.potential, "potential").unwrap_or_else(|| d.potential.into()),
            reference: pick(&c.reference, "reference"),
            p,
            tol,
            out,
            seed,
        })
    }

    /// Frequencies for commands that need `n > 1`.
    pub fn cgo_n(&self) -> Result<&[f64], UsageError> {
        if let Some(bad) = self.n.iter().find(|&&x| x <= 1.0) {
            return Err(usage("n", format!("oscillating solutions need n > 1, got {bad}")));
        }
        Ok(&self.n)
    }
}
