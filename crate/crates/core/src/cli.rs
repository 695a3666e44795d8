//! Command handlers behind the `copula-lab` binary.
//!
//! Exit codes: 0 success or expected outcome, 1 verification
//! contradiction, 2 usage or input error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::copula::tabulated::load_tabulated_csv;
use crate::copula::verify::{COMPONENTWISE_MONOTONE, TWO_INCREASING};
use crate::copula::{
    builtin_by_name, h_volume, verify_copula_with, Copula2D, Enumeration, GridSpec, Rectangle,
    UnitPoint, VerificationReport, Witness,
};
use crate::error::{Error, Result};
use crate::lab::{run_battery, BatteryConfig, BatteryReport};
use crate::stats::{dependence_report, DependenceReport, Sample};
use crate::SCHEMA_VERSION;

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONTRADICTION: u8 = 1;
pub const EXIT_INPUT: u8 = 2;

/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "COPULA_LAB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "copula-lab", version, about = "Copula axiom checks and dependence-preservation experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the copula axioms for a builtin or a tabulated function.
    Verify(VerifyArgs),
    /// Kendall tau, Spearman rho and Pearson rho of a two-column CSV.
    Stats(StatsArgs),
    /// Run an experiment battery from a JSON config.
    Invariance(InvarianceArgs),
    /// Verification reports for the two classic non-copula examples.
    Counterexamples(CounterexamplesArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Builtin name (independence, min-copula, w-copula, fgm, fgm-counterexample-factor, max-counterexample).
    #[arg(long, required_unless_present = "csv", conflicts_with = "csv")]
    pub builtin: Option<String>,
    /// CSV with header `u,v,value` tabulating the function on a uniform grid.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// FGM parameter, used with `--builtin fgm`.
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub theta: f64,
    #[arg(long, default_value_t = 21)]
    pub grid_n: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Only check unit grid cells for the 2-increasing property.
    #[arg(long)]
    pub adjacent_only: bool,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub csv: PathBuf,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InvarianceArgs {
    /// Battery config (JSON, `schema_version: 1`).
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the seed of every experiment.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CounterexamplesArgs {
    #[arg(long, default_value_t = 21)]
    pub grid_n: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// exit code. Output goes to the process's stdout and stderr.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    if let Err(e) = configure_threads() {
        let _ = writeln!(err, "error: {e}");
        return EXIT_INPUT;
    }
    let outcome = match &cli.command {
        Command::Verify(a) => cmd_verify(a),
        Command::Stats(a) => cmd_stats(a),
        Command::Invariance(a) => cmd_invariance(a),
        Command::Counterexamples(a) => cmd_counterexamples(a),
    };
    match outcome {
        Ok(Output { text, code }) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Error::Argument(format!("{THREADS_ENV} must be a positive integer, got '{raw}'")))?;
    // a global pool may already exist when called repeatedly in one process
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

/// Rendered stdout plus exit code of a successful command.
pub struct Output {
    pub text: String,
    pub code: u8,
}

fn write_json<T: Serialize>(path: Option<&Path>, doc: &T) -> Result<()> {
    if let Some(path) = path {
        let mut text = serde_json::to_string_pretty(doc).map_err(|e| Error::Io(e.to_string()))?;
        text.push('\n');
        std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

/// Six significant digits; an exact zero prints as `0 (exact)`.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0 (exact)".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.5e}").parse().expect("formatted float parses");
    if (1e-4..1e6).contains(&rounded.abs()) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

fn format_witness(w: &Option<Witness>) -> String {
    match w {
        None => "-".into(),
        Some(Witness::Point(p)) => format!("(u={}, v={})", p.u, p.v),
        Some(Witness::Rectangle(r)) => format!("[{}, {}] x [{}, {}]", r.u1, r.u2, r.v1, r.v2),
        Some(Witness::Pair { u1, u2, v1, v2 }) => format!("({u1}, {v1}) -> ({u2}, {v2})"),
    }
}

fn report_table(reports: &[VerificationReport], c: &Copula2D) -> String {
    let mut s = format!("{:<30} {:<6} {:<16} witness\n", "check", "status", "violation");
    for r in reports {
        let mut witness = format_witness(&r.witness);
        if let (true, Some(Witness::Rectangle(rect))) = (r.check_name == TWO_INCREASING, &r.witness) {
            if let Ok(v) = h_volume(c, rect) {
                let _ = write!(witness, " (H-volume {})", format_number(v));
            }
        }
        let _ = writeln!(
            s,
            "{:<30} {:<6} {:<16} {}",
            r.check_name,
            if r.passed { "pass" } else { "FAIL" },
            format_number(r.violation),
            witness
        );
    }
    s
}

#[derive(Debug, Serialize)]
pub struct VerifyDocument {
    pub schema_version: u32,
    pub target: String,
    pub is_copula_claim: bool,
    pub params: Vec<(String, f64)>,
    pub interpolation: Option<String>,
    pub grid_n: usize,
    pub adjacent_only: bool,
    pub tolerance: f64,
    pub reports: Vec<VerificationReport>,
    /// H-volume of the 2-increasing witness rectangle, when that check failed.
    pub witness_h_volume: Option<f64>,
    pub consistent: bool,
}

/// A claimed copula must pass all five checks; a counterexample must fail
/// the boundary conditions or the 2-increasing property.
fn consistent(claim: bool, reports: &[VerificationReport]) -> bool {
    if claim {
        reports.iter().all(|r| r.passed)
    } else {
        !(reports[0].passed && reports[1].passed)
    }
}

fn witness_volume(c: &Copula2D, reports: &[VerificationReport]) -> Option<f64> {
    reports
        .iter()
        .find(|r| r.check_name == TWO_INCREASING)
        .and_then(|r| match &r.witness {
            Some(Witness::Rectangle(rect)) => h_volume(c, rect).ok(),
            _ => None,
        })
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<Output> {
    let grid = GridSpec::new(args.grid_n)?;
    let c = match (&args.builtin, &args.csv) {
        (Some(name), None) => builtin_by_name(name, args.theta)?,
        (None, Some(path)) => load_tabulated_csv(path)?,
        _ => return Err(Error::Argument("exactly one of --builtin or --csv is required".into())),
    };
    let mode = if args.adjacent_only { Enumeration::AdjacentCells } else { Enumeration::AllRectangles };
    let reports = verify_copula_with(&c, grid, args.tol, mode)?;
    let doc = VerifyDocument {
        schema_version: SCHEMA_VERSION,
        target: c.name().to_string(),
        is_copula_claim: c.is_copula_claim(),
        params: c.params().to_vec(),
        interpolation: c.interpolation().map(str::to_string),
        grid_n: grid.n(),
        adjacent_only: args.adjacent_only,
        tolerance: args.tol,
        witness_h_volume: witness_volume(&c, &reports),
        consistent: consistent(c.is_copula_claim(), &reports),
        reports,
    };
    write_json(args.json.as_deref(), &doc)?;

    let mut text = format!(
        "target: {}{}\ngrid: n={}, tolerance: {:e}, rectangles: {}\n",
        doc.target,
        if doc.is_copula_claim { "" } else { " (counterexample)" },
        doc.grid_n,
        doc.tolerance,
        if doc.adjacent_only { "adjacent cells" } else { "all" },
    );
    if let Some(scheme) = &doc.interpolation {
        let _ = writeln!(text, "interpolation: {scheme}");
    }
    text.push_str(&report_table(&doc.reports, &c));
    let verdict = match (doc.consistent, doc.is_copula_claim) {
        (true, true) => "consistent: all copula axioms hold on the grid",
        (true, false) => "consistent: expected failures confirmed",
        (false, true) => "CONTRADICTION: claimed copula fails verification",
        (false, false) => "CONTRADICTION: counterexample passes the copula axioms",
    };
    let _ = writeln!(text, "{verdict}");
    Ok(Output { text, code: if doc.consistent { EXIT_OK } else { EXIT_CONTRADICTION } })
}

#[derive(Debug, Serialize)]
pub struct StatsDocument {
    pub schema_version: u32,
    #[serde(flatten)]
    pub report: DependenceReport,
}

pub fn cmd_stats(args: &StatsArgs) -> Result<Output> {
    let sample = Sample::load_csv(&args.csv)?;
    let report = dependence_report(&sample)?;
    let doc = StatsDocument { schema_version: SCHEMA_VERSION, report };
    write_json(args.json.as_deref(), &doc)?;
    let text = format!(
        "n: {}\nkendall_tau: {}\nspearman_rho: {}\npearson_rho: {}\ntie_adjusted: {}\n",
        report.n,
        format_number(report.kendall_tau),
        format_number(report.spearman_rho),
        format_number(report.pearson_rho),
        report.tie_adjusted
    );
    Ok(Output { text, code: EXIT_OK })
}

pub fn invariance_report(args: &InvarianceArgs) -> Result<BatteryReport> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| Error::Io(format!("{}: {e}", args.config.display())))?;
    let mut cfg = BatteryConfig::from_json(&text)?;
    if let Some(seed) = args.seed {
        cfg = cfg.with_seed(seed);
    }
    run_battery(&cfg.experiments)
}

pub fn cmd_invariance(args: &InvarianceArgs) -> Result<Output> {
    let report = invariance_report(args)?;
    write_json(args.json.as_deref(), &report)?;

    let mut text = format!("generator: {} ({})\n", report.generator, report.stream_derivation);
    let _ = writeln!(text, "{:<4} {:<20} {:<40} {:<28} preserved", "exp", "kind", "transforms", "statistic");
    for row in &report.summary {
        let kind = serde_json::to_value(row.kind).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
        let preserved = serde_json::to_value(row.preserved).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
        let _ = writeln!(
            text,
            "{:<4} {:<20} {:<40} {:<28} {} ({} reps)",
            row.experiment, kind, row.transforms, row.statistic, preserved, row.repetitions
        );
    }
    for e in &report.experiments {
        if let Some(b) = &e.breakage {
            let _ = writeln!(
                text,
                "experiment {}: squaring moves Pearson from {} to {}; closed form rho^2 = {}, standard error {}, {}",
                e.index,
                format_number(b.mean_before),
                format_number(b.mean_after),
                format_number(b.expected_after),
                format_number(b.standard_error),
                if b.within_tolerance { "within 3 standard errors" } else { "OUTSIDE 3 standard errors" }
            );
        }
        if !e.all_held {
            let broken = e.results.iter().filter(|r| !r.held).count();
            let _ = writeln!(text, "experiment {}: {} claimed invariances violated", e.index, broken);
        }
    }
    let _ = writeln!(
        text,
        "{}",
        if report.all_held { "all claimed invariances held" } else { "CONTRADICTION: claimed invariance violated" }
    );
    Ok(Output { text, code: if report.all_held { EXIT_OK } else { EXIT_CONTRADICTION } })
}

/// A decreasing step between neighbouring grid nodes.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DecreasingSegment {
    pub from: UnitPoint,
    pub to: UnitPoint,
    pub from_value: f64,
    pub to_value: f64,
}

#[derive(Debug, Serialize)]
pub struct CounterexampleEntry {
    pub name: String,
    pub formula: &'static str,
    pub is_copula_claim: bool,
    pub unit_square_h_volume: f64,
    pub reports: Vec<VerificationReport>,
    pub decreasing_segment: Option<DecreasingSegment>,
    /// The entry shows what it is meant to show (see `claim`).
    pub demonstrated: bool,
    pub claim: &'static str,
}

#[derive(Debug, Serialize)]
pub struct CounterexamplesDocument {
    pub schema_version: u32,
    pub grid_n: usize,
    pub tolerance: f64,
    pub counterexamples: Vec<CounterexampleEntry>,
}

fn decreasing_segment(c: &Copula2D, grid: GridSpec, report: &VerificationReport) -> Option<DecreasingSegment> {
    let Some(Witness::Point(p)) = report.witness else {
        return None;
    };
    let h = grid.coord(1);
    [(p.u + h, p.v), (p.u, p.v + h)].into_iter().find_map(|(u, v)| {
        let to = UnitPoint::new(u, v).ok()?;
        let (from_value, to_value) = (c.eval(p), c.eval(to));
        (to_value < from_value).then_some(DecreasingSegment { from: p, to, from_value, to_value })
    })
}

pub fn counterexamples_document(grid: GridSpec, tol: f64) -> Result<CounterexamplesDocument> {
    let mut entries = Vec::new();
    for (c, formula) in [
        (Copula2D::fgm_counterexample_factor(), "(2a-1)(2b-1)"),
        (Copula2D::max_counterexample(), "max(a,b)"),
    ] {
        let reports = verify_copula_with(&c, grid, tol, Enumeration::AllRectangles)?;
        let unit_square_h_volume = h_volume(&c, &Rectangle::unit_square())?;
        let find = |name: &str| reports.iter().find(|r| r.check_name == name).expect("all checks run");
        let (two_inc, monotone) = (find(TWO_INCREASING), find(COMPONENTWISE_MONOTONE));
        let (demonstrated, claim) = if c.name() == "max-counterexample" {
            (
                monotone.passed && !two_inc.passed && unit_square_h_volume == -1.0,
                "nondecreasing in each argument, not 2-increasing: H-volume of the unit square is -1",
            )
        } else {
            (two_inc.passed && !monotone.passed, "2-increasing, but not nondecreasing in each argument")
        };
        entries.push(CounterexampleEntry {
            name: c.name().to_string(),
            formula,
            is_copula_claim: c.is_copula_claim(),
            unit_square_h_volume,
            decreasing_segment: decreasing_segment(&c, grid, monotone),
            reports,
            demonstrated,
            claim,
        });
    }
    Ok(CounterexamplesDocument { schema_version: SCHEMA_VERSION, grid_n: grid.n(), tolerance: tol, counterexamples: entries })
}

pub fn cmd_counterexamples(args: &CounterexamplesArgs) -> Result<Output> {
    let grid = GridSpec::new(args.grid_n)?;
    let doc = counterexamples_document(grid, args.tol)?;
    write_json(args.json.as_deref(), &doc)?;

    let mut text = String::new();
    for e in &doc.counterexamples {
        let c = crate::copula::builtin_by_name(&e.name, 0.0)?;
        let _ = writeln!(text, "{} = {}: {}", e.name, e.formula, e.claim);
        let _ = writeln!(text, "H-volume of [0,1] x [0,1]: {}", format_number(e.unit_square_h_volume));
        if let Some(s) = &e.decreasing_segment {
            let _ = writeln!(
                text,
                "decreasing segment: f({}, {}) = {} > f({}, {}) = {}",
                s.from.u, s.from.v, format_number(s.from_value), s.to.u, s.to.v, format_number(s.to_value)
            );
        }
        text.push_str(&report_table(&e.reports, &c));
        let _ = writeln!(text, "{}\n", if e.demonstrated { "demonstrated" } else { "NOT demonstrated" });
    }
    let all = doc.counterexamples.iter().all(|e| e.demonstrated);
    Ok(Output { text, code: if all { EXIT_OK } else { EXIT_CONTRADICTION } })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formatting() {
        assert_eq!(format_number(0.0), "0 (exact)");
        assert_eq!(format_number(-1.0), "-1");
        assert_eq!(format_number(0.25), "0.25");
        assert_eq!(format_number(2.0 / 3.0), "0.666667");
        assert_eq!(format_number(1.234567891e-13), "1.23457e-13");
        assert_eq!(format_number(123456789.0), "1.23457e8");
    }

    #[test]
    fn consistency_rule() {
        let pass = |name: &str| VerificationReport {
            check_name: name.into(),
            passed: true,
            violation: 0.0,
            tolerance_used: 0.0,
            witness: None,
        };
        let mut reports: Vec<_> = ["a", "b", "c", "d", "e"].into_iter().map(pass).collect();
        assert!(consistent(true, &reports));
        assert!(!consistent(false, &reports));
        reports[4].passed = false;
        assert!(!consistent(true, &reports));
        assert!(!consistent(false, &reports));
        reports[1].passed = false;
        assert!(consistent(false, &reports));
    }
}
