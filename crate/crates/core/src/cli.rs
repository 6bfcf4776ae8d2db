//! The `graphnorm` command line.
//!
//! Exit codes: `0` success or consistent, `2` input error, `3` refutation or
//! failed validation. Numbers in text and CSV output carry 12 significant
//! digits; JSON output uses the shortest round-tripping representation.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::density::{density, elimination_plan, norm_h, norm_rh};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::kernel::{DiracMixture, StepKernel};
use crate::moduli::{concentration_scan, modulus_scan, summarize, ModulusKind, DEFAULT_TOLERANCE};
use crate::norming::{full_verdict, Budget, Certificate, CertificateCheck, Mode, Overall, Verdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_REFUTED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "graphnorm", version, about = "Homomorphism densities and norming-graph checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print t(H,W), ‖W‖_H, ‖W‖_{r(H)} and the elimination width.
    Density {
        /// Graph as an edge list or JSON.
        graph: PathBuf,
        /// Kernel as JSON {"measures": [...], "values": [[...]]}.
        kernel: PathBuf,
        #[arg(long, value_enum, default_value_t = TextOrJson::Text)]
        format: TextOrJson,
    },
    /// Run every necessary-condition check and print the verdict as JSON.
    Check {
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Weak)]
        mode: ModeArg,
        /// Hölder search trials.
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest subgraph examined by the average-degree check.
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
        max_subgraph_vertices: u64,
        /// Trials of the distinguishing-kernel search.
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        kernel_trials: u64,
    },
    /// Scan convexity or smoothness witnesses over ε, n and seeds.
    Moduli {
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = KindArg::Convexity)]
        kind: KindArg,
        /// Comma-separated values in (0, 1).
        #[arg(long, default_value = "0.5", value_delimiter = ',')]
        eps_grid: Vec<f64>,
        #[arg(long, default_value = "16,32,64,128", value_delimiter = ',')]
        n_grid: Vec<usize>,
        /// Number of seeds; seed s runs `--seed` + 0, 1, …, s − 1.
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
        seeds: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
        format: TableFormat,
    },
    /// Concentration of t(H,U) for U drawn from the block-random model.
    Concentration {
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = DistArg::D1)]
        dist: DistArg,
        /// ε for d3 and d4.
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        #[arg(long, default_value = "16,32,64,128", value_delimiter = ',')]
        n_grid: Vec<usize>,
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
    },
    /// Re-validate a certificate, or every certificate inside a verdict.
    Validate { file: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TextOrJson {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Weak,
    Semi,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Convexity,
    Smoothness,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    /// One row per (ε, n, seed).
    Csv,
    /// Medians per (ε, n).
    Summary,
    /// Full estimates including witness kernels.
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DistArg {
    D1,
    D2,
    D3,
    D4,
}

/// Formats `x` with 12 significant digits, trimming trailing zeros.
pub fn format_number(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("float formatting round-trips");
    if rounded != 0.0 && !(1e-6..1e15).contains(&rounded.abs()) {
        format!("{rounded:e}")
    } else {
        rounded.to_string()
    }
}

pub fn read_graph(path: &Path) -> Result<Graph> {
    let text = fs::read_to_string(path)?;
    if text.trim_start().starts_with('{') {
        Ok(serde_json::from_str(&text)?)
    } else {
        Graph::parse_edge_list(&text)
    }
}

pub fn read_kernel(path: &Path) -> Result<StepKernel> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

fn graph_label(h: &Graph) -> String {
    h.to_string()
}

#[derive(Serialize)]
struct DensityOutput {
    density: f64,
    norm_h: Option<f64>,
    norm_rh: Option<f64>,
    width: usize,
    order: Vec<usize>,
}

fn cmd_density(graph: &Path, kernel: &Path, format: TextOrJson, out: &mut dyn Write) -> Result<i32> {
    let h = read_graph(graph)?;
    let w = read_kernel(kernel)?;
    let plan = elimination_plan(&h);
    let o = DensityOutput {
        density: density(&h, &w),
        norm_h: norm_h(&h, &w).ok(),
        norm_rh: norm_rh(&h, &w).ok(),
        width: plan.width,
        order: plan.order,
    };
    match format {
        TextOrJson::Json => writeln!(out, "{}", serde_json::to_string_pretty(&o)?)?,
        TextOrJson::Text => {
            let opt = |x: Option<f64>| x.map_or("undefined".to_string(), format_number);
            writeln!(out, "t = {}", format_number(o.density))?;
            writeln!(out, "norm_H = {}", opt(o.norm_h))?;
            writeln!(out, "norm_rH = {}", opt(o.norm_rh))?;
            writeln!(out, "width = {}", o.width)?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_check(h: &Graph, budget: &Budget, out: &mut dyn Write) -> Result<i32> {
    let verdict = full_verdict(h, budget);
    writeln!(out, "{}", serde_json::to_string_pretty(&verdict)?)?;
    Ok(if verdict.overall == Overall::Refuted { EXIT_REFUTED } else { EXIT_OK })
}

#[derive(Serialize)]
struct CsvRow<'a> {
    h: &'a str,
    kind: &'a str,
    epsilon: String,
    n: usize,
    seed: u64,
    value: String,
}

#[derive(Serialize)]
struct SummaryRow<'a> {
    h: &'a str,
    kind: &'a str,
    epsilon: String,
    n: usize,
    median_value: String,
    median_distance: String,
    count: usize,
}

#[allow(clippy::too_many_arguments)]
fn cmd_moduli(
    graph: &Path,
    kind: KindArg,
    eps_grid: &[f64],
    n_grid: &[usize],
    seeds: u64,
    seed: u64,
    format: TableFormat,
    out: &mut dyn Write,
) -> Result<i32> {
    let h = read_graph(graph)?;
    if n_grid.contains(&0) {
        return Err(Error::Precondition("n grid entries must be positive".into()));
    }
    let kind = match kind {
        KindArg::Convexity => ModulusKind::ConvexityUpperBound,
        KindArg::Smoothness => ModulusKind::SmoothnessLowerBound,
    };
    let seed_list: Vec<u64> = (0..seeds).map(|i| seed.wrapping_add(i)).collect();
    let estimates = modulus_scan(&h, kind, eps_grid, n_grid, &seed_list)?;
    let label = graph_label(&h);
    match format {
        TableFormat::Json => writeln!(out, "{}", serde_json::to_string_pretty(&estimates)?)?,
        TableFormat::Csv => {
            let mut wtr = csv::Writer::from_writer(Vec::new());
            for e in &estimates {
                wtr.serialize(CsvRow {
                    h: &label,
                    kind: kind.short_name(),
                    epsilon: format_number(e.epsilon),
                    n: e.n,
                    seed: e.seed,
                    value: format_number(e.value),
                })?;
            }
            out.write_all(&wtr.into_inner().map_err(|e| Error::Io(e.into_error()))?)?;
        }
        TableFormat::Summary => {
            let mut wtr = csv::Writer::from_writer(Vec::new());
            for c in summarize(&estimates) {
                wtr.serialize(SummaryRow {
                    h: &label,
                    kind: kind.short_name(),
                    epsilon: format_number(c.epsilon),
                    n: c.n,
                    median_value: format_number(c.median_value),
                    median_distance: format_number(c.median_distance),
                    count: c.count,
                })?;
            }
            out.write_all(&wtr.into_inner().map_err(|e| Error::Io(e.into_error()))?)?;
        }
    }
    Ok(EXIT_OK)
}

fn distribution(dist: DistArg, eps: f64) -> Result<DiracMixture> {
    match dist {
        DistArg::D1 => Ok(DiracMixture::d1()),
        DistArg::D2 => Ok(DiracMixture::d2()),
        DistArg::D3 => DiracMixture::d3(eps),
        DistArg::D4 => DiracMixture::d4(eps),
    }
}

#[derive(Serialize)]
struct ValidationOutput {
    valid: bool,
    certificates: Vec<CertificateCheck>,
}

fn cmd_validate(file: &Path, out: &mut dyn Write) -> Result<i32> {
    let value: serde_json::Value = serde_json::from_str(&fs::read_to_string(file)?)?;
    let certificates: Vec<Certificate> = if value.get("checks").is_some() {
        let verdict: Verdict = serde_json::from_value(value)?;
        verdict.certificates().cloned().collect()
    } else {
        vec![serde_json::from_value(value)?]
    };
    if certificates.is_empty() {
        return Err(Error::Precondition("verdict carries no certificate".into()));
    }
    let checks: Vec<CertificateCheck> = certificates.iter().map(Certificate::validate).collect();
    let valid = checks.iter().all(|c| c.valid);
    writeln!(out, "{}", serde_json::to_string_pretty(&ValidationOutput { valid, certificates: checks })?)?;
    Ok(if valid { EXIT_OK } else { EXIT_REFUTED })
}

pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Density { graph, kernel, format } => cmd_density(&graph, &kernel, format, out),
        Command::Check { graph, mode, budget, seed, max_subgraph_vertices, kernel_trials } => {
            let h = read_graph(&graph)?;
            let budget = Budget {
                mode: match mode {
                    ModeArg::Weak => Mode::Weak,
                    ModeArg::Semi => Mode::Semi,
                },
                trials: budget as usize,
                seed,
                subgraph_cap: max_subgraph_vertices as usize,
                kernel_trials: kernel_trials as usize,
            };
            cmd_check(&h, &budget, out)
        }
        Command::Moduli { graph, kind, eps_grid, n_grid, seeds, seed, format } => {
            cmd_moduli(&graph, kind, &eps_grid, &n_grid, seeds, seed, format, out)
        }
        Command::Concentration { graph, dist, eps, n_grid, trials, seed, tolerance } => {
            let h = read_graph(&graph)?;
            let d = distribution(dist, eps)?;
            let record = concentration_scan(&h, &n_grid, &d, trials as usize, seed, tolerance)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&record)?)?;
            Ok(EXIT_OK)
        }
        Command::Validate { file } => cmd_validate(&file, out),
    }
}

/// Parses `args`, runs the command and returns the exit code. Errors go to
/// `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}
