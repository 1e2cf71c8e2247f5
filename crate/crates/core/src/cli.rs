//! Command-line front end.
//!
//! Exit codes: 0 when everything checked passes, 1 on a verification
//! failure, 2 on a usage error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::arf::SpinModulus;
use crate::enumeration::{
    closed_form_count, enumerate_real_arf_functions, verify_range, write_csv,
};
use crate::error::Error;
use crate::identities::run_identity_checks;
use crate::topology::TopologicalType;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Caps the rayon pool size.
pub const THREADS_ENV: &str = "ARFSPIN_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "arfspin",
    version,
    about = "Count and verify real m-Arf functions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form counts N(g,k,eps,m,delta).
    Counts(CountsArgs),
    /// Brute-force every cell and compare with the closed forms.
    Verify(VerifyArgs),
    /// Randomized checks of the covering-group identities.
    CoverCheck(CoverCheckArgs),
    /// List the real m-Arf functions of one surface type.
    Enumerate(EnumerateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct Output {
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Write here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CountsArgs {
    #[arg(long)]
    pub g: Option<u32>,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
    pub eps: Option<u8>,
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
    pub delta: Option<u8>,
    /// Upper genus when --g is absent.
    #[arg(long)]
    pub g_max: Option<u32>,
    /// Upper modulus when --m is absent.
    #[arg(long)]
    pub m_max: Option<u32>,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub g_max: u32,
    #[arg(long)]
    pub m_max: u32,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Debug, Args)]
pub struct CoverCheckArgs {
    #[arg(long, default_value_t = 1000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Cover degree; repeatable. Defaults to 2 through 6.
    #[arg(long)]
    pub m: Vec<u32>,
    /// Write here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[arg(long)]
    pub g: u32,
    #[arg(long)]
    pub k: u32,
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
    pub eps: u8,
    #[arg(long)]
    pub m: u32,
    /// Number of invariant curves; defaults to the canonical decomposition.
    #[arg(long)]
    pub n: Option<u32>,
    #[command(flatten)]
    pub out: Output,
}

/// A failed run: exit code plus message for stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::usage(format!("i/o error: {e}"))
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::usage(format!("csv error: {e}"))
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::usage(format!("json error: {e}"))
    }
}

/// Parses `args` (program name first), runs, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    if let Err(f) = configure_threads(std::env::var(THREADS_ENV).ok().as_deref()) {
        eprintln!("error: {}", f.message);
        return f.code;
    }
    match run(&cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn configure_threads(value: Option<&str>) -> Result<(), Failure> {
    let Some(value) = value else { return Ok(()) };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| {
            Failure::usage(format!(
                "{THREADS_ENV} must be a positive integer, got {value:?}"
            ))
        })?;
    #[cfg(feature = "parallel")]
    {
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

pub fn run(cli: &Cli) -> Result<i32, Failure> {
    match &cli.command {
        Command::Counts(a) => run_counts(a),
        Command::Verify(a) => run_verify(a),
        Command::CoverCheck(a) => run_cover_check(a),
        Command::Enumerate(a) => run_enumerate(a),
    }
}

fn sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize>(value: &T, path: &Option<PathBuf>) -> Result<(), Failure> {
    let mut w = sink(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn modulus(m: u32) -> Result<SpinModulus, Failure> {
    Ok(SpinModulus::new(m)?)
}

#[derive(Debug, Serialize)]
struct CountRow {
    g: u32,
    k: u32,
    eps: u8,
    m: u32,
    delta: u8,
    #[serde(rename = "N", serialize_with = "as_number")]
    n: num_bigint::BigUint,
}

fn as_number<S: serde::Serializer>(v: &num_bigint::BigUint, s: S) -> Result<S::Ok, S::Error> {
    use std::str::FromStr;
    serde_json::Number::from_str(&v.to_string())
        .map_err(serde::ser::Error::custom)?
        .serialize(s)
}

fn count_types(a: &CountsArgs) -> Result<Vec<TopologicalType>, Failure> {
    if let (Some(g), Some(k), Some(eps)) = (a.g, a.k, a.eps) {
        return Ok(vec![TopologicalType::new(g, k, eps)?]);
    }
    let (lo, hi) = match (a.g, a.g_max) {
        (Some(g), _) => (g, g),
        (None, Some(hi)) => (2, hi),
        (None, None) => return Err(Failure::usage("counts needs --g or --g-max")),
    };
    if lo < 2 || hi < 2 {
        return Err(Failure::usage(format!(
            "genus {} < 2 is out of scope",
            lo.min(hi)
        )));
    }
    Ok(TopologicalType::all_up_to(hi)
        .into_iter()
        .filter(|t| t.g() >= lo)
        .filter(|t| a.k.is_none_or(|k| t.k() == k))
        .filter(|t| a.eps.is_none_or(|e| t.eps() == e))
        .collect())
}

fn run_counts(a: &CountsArgs) -> Result<i32, Failure> {
    let types = count_types(a)?;
    let ms: Vec<u32> = match (a.m, a.m_max) {
        (Some(m), _) => vec![m],
        (None, Some(hi)) => (2..=hi).collect(),
        (None, None) => return Err(Failure::usage("counts needs --m or --m-max")),
    };
    let deltas: Vec<u8> = a.delta.map_or(vec![0, 1], |d| vec![d]);
    let mut rows = Vec::new();
    for t in &types {
        for &m in &ms {
            let sm = modulus(m)?;
            for &delta in &deltas {
                rows.push(CountRow {
                    g: t.g(),
                    k: t.k(),
                    eps: t.eps(),
                    m,
                    delta,
                    n: closed_form_count(t, sm, delta),
                });
            }
        }
    }
    match a.out.format {
        Format::Json => write_json(&rows, &a.out.output)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(sink(&a.out.output)?);
            w.write_record(["g", "k", "eps", "m", "delta", "N"])?;
            for r in &rows {
                w.write_record([
                    r.g.to_string(),
                    r.k.to_string(),
                    r.eps.to_string(),
                    r.m.to_string(),
                    r.delta.to_string(),
                    r.n.to_string(),
                ])?;
            }
            w.flush()?;
        }
    }
    Ok(EXIT_PASS)
}

fn run_verify(a: &VerifyArgs) -> Result<i32, Failure> {
    let reports = verify_range(a.g_max, a.m_max)?;
    match a.out.format {
        Format::Json => write_json(&reports, &a.out.output)?,
        Format::Csv => {
            let mut w = sink(&a.out.output)?;
            write_csv(&reports, &mut w)?;
            w.flush()?;
        }
    }
    let mismatches: Vec<_> = reports.iter().filter(|r| !r.matches).collect();
    for r in &mismatches {
        eprintln!(
            "mismatch: type {} m={} n={}: brute force {} even / {} odd, closed form {} / {}",
            r.ttype(),
            r.m,
            r.n,
            r.even,
            r.odd,
            r.cf_even,
            r.cf_odd
        );
    }
    Ok(if mismatches.is_empty() {
        EXIT_PASS
    } else {
        EXIT_FAIL
    })
}

fn run_cover_check(a: &CoverCheckArgs) -> Result<i32, Failure> {
    if !(a.tol > 0.0 && a.tol.is_finite()) {
        return Err(Failure::usage(format!(
            "--tol must be positive, got {}",
            a.tol
        )));
    }
    if a.samples == 0 {
        return Err(Failure::usage("--samples must be at least 1"));
    }
    let ms = if a.m.is_empty() {
        (2..=6).collect()
    } else {
        a.m.clone()
    };
    if let Some(bad) = ms.iter().find(|&&m| m < 2) {
        return Err(Failure::usage(format!("--m must be at least 2, got {bad}")));
    }
    let reports = run_identity_checks(&ms, a.samples, a.seed, a.tol)?;
    write_json(&reports, &a.output)?;
    let failed: Vec<_> = reports.iter().filter(|r| !r.pass).collect();
    for r in &failed {
        eprintln!(
            "identity failed: {} (m={}, max residual {:e})",
            r.identity, r.m, r.max_residual
        );
    }
    Ok(if failed.is_empty() {
        EXIT_PASS
    } else {
        EXIT_FAIL
    })
}

fn join(v: &[u32]) -> String {
    v.iter().map(u32::to_string).collect::<Vec<_>>().join(" ")
}

fn run_enumerate(a: &EnumerateArgs) -> Result<i32, Failure> {
    let t = TopologicalType::new(a.g, a.k, a.eps)?;
    let functions = enumerate_real_arf_functions(&t, modulus(a.m)?, a.n)?;
    match a.out.format {
        Format::Json => write_json(&functions.collect::<Vec<_>>(), &a.out.output)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(sink(&a.out.output)?);
            w.write_record(["alpha", "beta", "gamma", "delta", "gamma_n", "arf"])?;
            for f in functions {
                let v = f.values();
                w.write_record([
                    join(v.alpha()),
                    join(v.beta()),
                    join(v.gamma()),
                    join(v.delta()),
                    f.gamma_n().to_string(),
                    f.arf_invariant().to_string(),
                ])?;
            }
            w.flush()?;
        }
    }
    Ok(EXIT_PASS)
}
