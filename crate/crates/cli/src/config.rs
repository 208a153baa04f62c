use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gowers_core::ap_counter::SetInstance;
use gowers_core::poly::{haar_random_function, phase_function, random_polynomial, PolyFile};
use gowers_core::{FunctionTable, GroupParams, GroupVector, PolynomialSpec};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "gowers", version, about = "Gowers-norm circuits, property testers and 3-AP counting over F_p^n")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format; bench defaults to csv, everything else to json.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Turn every cross-check into a hard exit-code assertion.
    #[arg(long, global = true)]
    pub check: bool,

    /// Global cap on amplitudes / table entries.
    #[arg(long, global = true, env = "GOWERS_AMPLITUDE_CAP")]
    pub cap: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Circuit estimate of the U^d norm next to the brute-force value.
    Norm(NormArgs),
    /// Linear phase versus eps-far from every linear phase.
    TestLinear(TestLinearArgs),
    /// Degree-d phase polynomial versus random or far functions.
    TestPoly(TestPolyArgs),
    /// Two-sided large-Fourier-coefficient test.
    TestChar(TestCharArgs),
    /// Count 3-term arithmetic progressions in a set.
    #[command(name = "count-3ap")]
    Count3ap(CountArgs),
    /// Run the U^d circuit on shifted inputs and show where the peak lands.
    NoiseDemo(NoiseArgs),
    /// Time the U^d circuit over a range of orders.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct GroupArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub n: usize,
}

#[derive(Debug, Args)]
#[group(multiple = false)]
pub struct InstanceArgs {
    /// Polynomial: compact form ("2*x0*x1 + x2^2"), inline JSON, or a .json file.
    #[arg(long)]
    pub poly: Option<String>,
    /// Table file in the {p, n, values} JSON format.
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// `haar:SEED` or `poly:DEGREE:SEED`.
    #[arg(long)]
    pub random: Option<String>,
}

#[derive(Debug, Args)]
pub struct NormArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long)]
    pub d: usize,
    /// Also draw this many shots from the final state.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct TestLinearArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.05)]
    pub eta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Attach an exhaustive farness certificate.
    #[arg(long)]
    pub certify: bool,
}

#[derive(Debug, Args)]
pub struct TestPolyArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long)]
    pub d: usize,
    /// Caller-supplied gap; without it the exact-vs-random test runs.
    #[arg(long)]
    pub gap: Option<f64>,
    #[arg(long, default_value_t = 0.05)]
    pub eta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub allow_out_of_regime: bool,
    #[arg(long)]
    pub certify: bool,
    /// Correlation threshold for --certify.
    #[arg(long)]
    pub eps: Option<f64>,
}

#[derive(Debug, Args)]
pub struct TestCharArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long)]
    pub eps1: f64,
    #[arg(long)]
    pub eps2: f64,
    #[arg(long, default_value_t = 0.05)]
    pub eta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub certify: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Exact,
    Quantum,
    Bounds,
}

impl MethodArg {
    pub fn name(self) -> &'static str {
        match self {
            MethodArg::Exact => "exact",
            MethodArg::Quantum => "quantum",
            MethodArg::Bounds => "bounds",
        }
    }
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    /// `random:DENSITY,SEED` or an indicator table file.
    #[arg(long)]
    pub set: String,
    #[arg(long, value_enum, default_value_t = MethodArg::Exact)]
    pub method: MethodArg,
    /// Shots for the quantum method; omitted means exact readout.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also report the query-cost comparison at this accuracy.
    #[arg(long)]
    pub eps: Option<f64>,
}

#[derive(Debug, Args)]
pub struct NoiseArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long)]
    pub d: usize,
    /// One entry per register: a linear index, or coordinates joined by ':'.
    #[arg(long, value_delimiter = ',', required = true)]
    pub shifts: Vec<String>,
    #[arg(long, default_value_t = 5)]
    pub top: usize,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// Inclusive range of orders, `d=1..4`.
    #[arg(long)]
    pub sweep: String,
}

#[derive(Debug)]
pub enum CliError {
    Core(gowers_core::Error),
    Usage(String),
    Io(std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<gowers_core::Error> for CliError {
    fn from(e: gowers_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Core(e.into())
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Canonical echo of a parsed invocation, embedded in every report.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub subcommand: String,
    pub p: u64,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shifts: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub certify: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub allow_out_of_regime: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub check: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(cli: &Cli, subcommand: &str, group: &GroupArgs) -> Self {
        Self {
            subcommand: subcommand.to_string(),
            p: group.p,
            n: group.n,
            check: cli.check,
            format: cli.format,
            out: cli.out.as_ref().map(|p| p.display().to_string()),
            cap: cli.cap,
            ..Default::default()
        }
    }
}

pub fn group(cli: &Cli, args: &GroupArgs) -> Result<GroupParams, CliError> {
    let g = GroupParams::new(args.p, args.n)?;
    Ok(match cli.cap {
        Some(cap) => g.with_cap(cap),
        None => g,
    })
}

/// A resolved test function plus the polynomial behind it, when known.
pub struct Resolved {
    pub table: FunctionTable,
    pub poly: Option<PolynomialSpec>,
    pub label: String,
}

pub fn resolve_instance(args: &InstanceArgs, g: &GroupParams) -> Result<Resolved, CliError> {
    if let Some(text) = &args.poly {
        let poly = parse_poly(text, g)?;
        return Ok(Resolved {
            table: phase_function(&poly)?,
            label: format!("poly:{poly}"),
            poly: Some(poly),
        });
    }
    if let Some(path) = &args.table {
        let table = read_table(path, g)?;
        table.ensure_unimodular()?;
        return Ok(Resolved {
            table,
            poly: None,
            label: format!("table:{}", path.display()),
        });
    }
    if let Some(spec) = &args.random {
        return resolve_random(spec, g);
    }
    Err(usage("an instance is required: pass --poly, --table or --random"))
}

fn resolve_random(spec: &str, g: &GroupParams) -> Result<Resolved, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |s: &str, what: &str| -> Result<u64, CliError> {
        s.trim()
            .parse()
            .map_err(|_| usage(format!("bad {what} '{s}' in --random {spec}")))
    };
    match parts.as_slice() {
        ["haar", seed] => {
            let seed = num(seed, "seed")?;
            Ok(Resolved {
                table: haar_random_function(g, seed)?,
                poly: None,
                label: format!("haar:{seed}"),
            })
        }
        ["poly", deg, seed] => {
            let (deg, seed) = (num(deg, "degree")?, num(seed, "seed")?);
            let deg = u32::try_from(deg).map_err(|_| usage(format!("degree {deg} is too large")))?;
            let poly = random_polynomial(g, deg, seed)?;
            Ok(Resolved {
                table: phase_function(&poly)?,
                poly: Some(poly),
                label: format!("poly:{deg}:{seed}"),
            })
        }
        ["haar"] | ["poly", _] => Err(usage(format!(
            "random instances need an explicit seed (got '{spec}'), e.g. haar:7 or poly:2:7"
        ))),
        _ => Err(usage(format!("unknown random instance '{spec}'; expected haar:SEED or poly:DEGREE:SEED"))),
    }
}

fn parse_poly(text: &str, g: &GroupParams) -> Result<PolynomialSpec, CliError> {
    let trimmed = text.trim();
    let json = if trimmed.starts_with('{') {
        Some(trimmed.to_string())
    } else if trimmed.ends_with(".json") {
        Some(std::fs::read_to_string(trimmed)?)
    } else {
        None
    };
    match json {
        None => Ok(PolynomialSpec::parse(g, trimmed)?),
        Some(json) => {
            let file: PolyFile = serde_json::from_str(&json)?;
            check_shape(file.p, file.n, g, "polynomial")?;
            let terms = file
                .terms
                .into_iter()
                .map(|t| (t.exps.into_iter().map(u64::from).collect(), u64::from(t.coeff)));
            Ok(PolynomialSpec::new(g, terms)?)
        }
    }
}

fn check_shape(p: u64, n: usize, g: &GroupParams, what: &str) -> Result<(), CliError> {
    if p != g.p() as u64 || n != g.n() {
        return Err(usage(format!(
            "{what} is over F_{p}^{n} but --p {} --n {} was given",
            g.p(),
            g.n()
        )));
    }
    Ok(())
}

/// Reads a table file, re-homing it on `g` so the configured cap applies.
pub fn read_table(path: &PathBuf, g: &GroupParams) -> Result<FunctionTable, CliError> {
    let file = FunctionTable::from_json(&std::fs::read_to_string(path)?)?;
    check_shape(file.params().p() as u64, file.params().n(), g, "table")?;
    Ok(FunctionTable::new(g.clone(), file.values().to_vec())?)
}

pub fn resolve_set(spec: &str, g: &GroupParams) -> Result<(SetInstance, String), CliError> {
    if let Some(rest) = spec.strip_prefix("random:") {
        let (density, seed) = rest
            .split_once(',')
            .ok_or_else(|| usage(format!("random sets need a density and a seed, e.g. random:0.5,11 (got '{spec}')")))?;
        let density: f64 = density
            .trim()
            .parse()
            .map_err(|_| usage(format!("bad density '{density}'")))?;
        let seed: u64 = seed.trim().parse().map_err(|_| usage(format!("bad seed '{seed}'")))?;
        let s = SetInstance::random(g, density, seed)?;
        return Ok((s, format!("random:{density},{seed}")));
    }
    let path = PathBuf::from(spec);
    let s = SetInstance::new(read_table(&path, g)?)?;
    Ok((s, format!("file:{spec}")))
}

pub fn parse_shifts(items: &[String], g: &GroupParams) -> Result<Vec<GroupVector>, CliError> {
    items
        .iter()
        .map(|item| {
            let item = item.trim();
            if item.contains(':') {
                let coords = item
                    .split(':')
                    .map(|c| c.trim().parse::<u32>().map_err(|_| usage(format!("bad shift coordinate in '{item}'"))))
                    .collect::<Result<Vec<u32>, _>>()?;
                Ok(g.vector(&coords)?)
            } else {
                let index: usize = item.parse().map_err(|_| usage(format!("bad shift '{item}'")))?;
                Ok(g.vector_from_index(index)?)
            }
        })
        .collect()
}

/// `d=1..4` (inclusive); the `d=` prefix is optional.
pub fn parse_sweep(spec: &str) -> Result<[usize; 2], CliError> {
    let body = spec.trim().strip_prefix("d=").unwrap_or(spec.trim());
    let (lo, hi) = body
        .split_once("..")
        .ok_or_else(|| usage(format!("bad sweep '{spec}', expected d=LO..HI")))?;
    let hi = hi.strip_prefix('=').unwrap_or(hi);
    let parse = |s: &str| s.trim().parse::<usize>().map_err(|_| usage(format!("bad sweep bound '{s}'")));
    let (lo, hi) = (parse(lo)?, parse(hi)?);
    if lo == 0 || lo > hi {
        return Err(usage(format!("sweep range {lo}..{hi} must satisfy 1 <= lo <= hi")));
    }
    Ok([lo, hi])
}
