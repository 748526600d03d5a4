//! Command-line interface: argument parsing, output formatting, and
//! process exit codes.
//!
//! Exit codes: `0` success, `2` infeasible request, `3` invalid
//! configuration, `4` numerical or verification failure, `5` i/o error.

use crate::epsnet::{NetConfig, RefineOrder};
use crate::keyrate::{self, BoundRow, KeyRateParams};
use crate::objective::{ObjectiveKind, ObjectiveSpec};
use crate::sdp_export::export_sdp_standard_form;
use crate::solver::SolverConfig;
use crate::{chsh, Error};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::io::Write as _;
use std::path::{Path, PathBuf};

/// Exact column order of the CSV output.
pub const CSV_HEADER: &str = "s,phi_a,phi_b,n_star,delta_total,c_bar,r_inf,k_inf,status";

#[derive(Debug, Parser)]
#[command(
    name = "diqkd-bound",
    about = "Certified lower bounds on Eve's uncertainty and key rates \
             for device-independent QKD with a random key basis",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ObjectiveArg {
    Frobenius,
    #[value(alias = "trace-norm")]
    Trace,
}

impl From<ObjectiveArg> for ObjectiveKind {
    fn from(a: ObjectiveArg) -> Self {
        match a {
            ObjectiveArg::Frobenius => ObjectiveKind::Frobenius,
            ObjectiveArg::Trace => ObjectiveKind::TraceNorm,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

/// Objective and net options shared by the computing subcommands.
#[derive(Debug, Args)]
pub struct BoundArgs {
    /// Objective driving the optimization.
    #[arg(long, value_enum, default_value = "frobenius")]
    pub objective: ObjectiveArg,
    /// Weight of the first key basis in the objective.
    #[arg(long, default_value_t = 0.5)]
    pub lambda: f64,
    /// Tikhonov regularization strength (Frobenius objective only).
    #[arg(long, default_value_t = 1e-6)]
    pub mu: f64,
    /// Coarse net half-width in radians.
    #[arg(long, default_value_t = std::f64::consts::PI / 64.0)]
    pub eps0: f64,
    /// Refinement stops at this half-width.
    #[arg(long, default_value_t = std::f64::consts::PI / 512.0)]
    pub width_tol: f64,
    /// Children per refinement level.
    #[arg(long, default_value_t = 2)]
    pub refine_factor: usize,
    /// Safety multiplier on the empirical Lipschitz estimate.
    #[arg(long, default_value_t = 1.5)]
    pub lipschitz_safety: f64,
    /// Maximum first-order iterations per solve.
    #[arg(long, default_value_t = 5000)]
    pub max_iters: usize,
    /// RNG seed for the solver's randomized components.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl BoundArgs {
    pub fn net_config(&self) -> NetConfig {
        NetConfig {
            eps0: self.eps0,
            refine_factor: self.refine_factor,
            width_tol: self.width_tol,
            lipschitz_safety: self.lipschitz_safety,
            order: RefineOrder::AliceFirst,
        }
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig { max_iters: self.max_iters, seed: self.seed, ..Default::default() }
    }

    pub fn template(&self) -> Result<ObjectiveSpec, Error> {
        ObjectiveSpec::new(self.objective.into(), self.lambda, self.mu, 0.0)
            .map_err(Error::Matrix)
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write here instead of stdout (atomically: temp file then rename).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
    /// Include a wall-clock timestamp in JSON metadata. Off by default
    /// so that reruns are byte-identical.
    #[arg(long, default_value_t = false)]
    pub timestamp: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certified entropy bound for a single CHSH score.
    Bound {
        /// CHSH score, in (2, 2*sqrt(2)].
        #[arg(long)]
        s: f64,
        #[command(flatten)]
        bound: BoundArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Bounds (and optionally rates) over a range of scores.
    Sweep {
        /// Lowest score of the sweep.
        #[arg(long)]
        s_min: f64,
        /// Highest score of the sweep.
        #[arg(long)]
        s_max: f64,
        /// Number of evenly spaced scores.
        #[arg(long, default_value_t = 20)]
        steps: usize,
        /// First key basis probability; enables the rate columns.
        #[arg(long)]
        p: Option<f64>,
        /// QBER of the first key basis.
        #[arg(long, default_value_t = 0.0)]
        qber0: f64,
        /// QBER of the second key basis.
        #[arg(long, default_value_t = 0.0)]
        qber1: f64,
        #[command(flatten)]
        bound: BoundArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Key-rate table over a range of scores.
    Keyrate {
        /// Lowest score of the table.
        #[arg(long)]
        s_min: f64,
        /// Highest score of the table.
        #[arg(long)]
        s_max: f64,
        /// Number of evenly spaced scores.
        #[arg(long, default_value_t = 20)]
        steps: usize,
        /// First key basis probability.
        #[arg(long)]
        p: f64,
        /// QBER of the first key basis.
        #[arg(long, default_value_t = 0.0)]
        qber0: f64,
        /// QBER of the second key basis.
        #[arg(long, default_value_t = 0.0)]
        qber1: f64,
        #[command(flatten)]
        bound: BoundArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run the built-in invariant suites and print a pass/fail summary.
    Verify {
        /// Seed for the randomized checks; same seed, same output.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write the feasibility problem in a solver-independent text form.
    ExportSdp {
        /// CHSH score, in (2, 2*sqrt(2)].
        #[arg(long)]
        s: f64,
        /// Alice's second measurement angle (also the second key angle).
        #[arg(long)]
        phi_a: f64,
        /// Bob's second measurement angle.
        #[arg(long)]
        phi_b: f64,
        #[command(flatten)]
        bound: BoundArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
}

/// Maps library errors to the documented process exit codes.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Infeasible(_) => 2,
        Error::Config(_) | Error::Matrix(_) => 3,
        Error::Numerical(_) => 4,
        Error::Io(_) => 5,
    }
}

/// Writes `content` to `path` atomically (temp file in the same
/// directory, then rename) or to stdout when `path` is `None`.
pub fn write_output(path: Option<&Path>, content: &str) -> Result<(), Error> {
    match path {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(content.as_bytes())?;
            Ok(())
        }
        Some(p) => {
            let dir = p.parent().filter(|d| !d.as_os_str().is_empty());
            let mut tmp = tempfile::NamedTempFile::new_in(
                dir.unwrap_or_else(|| Path::new(".")),
            )?;
            tmp.write_all(content.as_bytes())?;
            tmp.persist(p).map_err(|e| Error::Io(e.error))?;
            Ok(())
        }
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Renders rows as CSV with the exact [`CSV_HEADER`] column order.
pub fn rows_to_csv(rows: &[BoundRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.s,
            r.phi_a,
            r.phi_b,
            r.n_star,
            r.delta_total,
            r.c_bar,
            fmt_opt(r.r_inf),
            fmt_opt(r.k_inf),
            r.status
        ));
    }
    out
}

#[derive(Serialize)]
struct Meta {
    version: &'static str,
    objective: String,
    lambda: f64,
    mu: f64,
    eps0: f64,
    width_tol: f64,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp: Option<String>,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    meta: Meta,
    rows: &'a [BoundRow],
}

fn rows_to_json(bound: &BoundArgs, out: &OutputArgs, rows: &[BoundRow]) -> Result<String, Error> {
    let report = JsonReport {
        meta: Meta {
            version: env!("CARGO_PKG_VERSION"),
            objective: ObjectiveKind::from(bound.objective).to_string(),
            lambda: bound.lambda,
            mu: bound.mu,
            eps0: bound.eps0,
            width_tol: bound.width_tol,
            seed: bound.seed,
            timestamp: out.timestamp.then(|| {
                let now = std::time::SystemTime::now()
                    .duration_since(std::time::UNIX_EPOCH)
                    .unwrap_or_default();
                format!("{}.{:09}", now.as_secs(), now.subsec_nanos())
            }),
        },
        rows,
    };
    let mut s = serde_json::to_string_pretty(&report)
        .map_err(|e| Error::Config(format!("serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

fn render(bound: &BoundArgs, out: &OutputArgs, rows: &[BoundRow]) -> Result<String, Error> {
    match out.format {
        FormatArg::Csv => Ok(rows_to_csv(rows)),
        FormatArg::Json => rows_to_json(bound, out, rows),
    }
}

/// Evenly spaced scores with the invariants `2 < lo <= hi <= 2*sqrt(2)`
/// and `n >= 1`.
fn score_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>, Error> {
    if n == 0 {
        return Err(Error::Config("steps must be at least 1".into()));
    }
    if !(lo.is_finite() && hi.is_finite() && 2.0 < lo && lo <= hi) {
        return Err(Error::Config(format!(
            "score range [{lo}, {hi}] must satisfy 2 < s_min <= s_max"
        )));
    }
    let cap = 2.0 * std::f64::consts::SQRT_2;
    if hi > cap + 1e-12 {
        return Err(Error::Infeasible(format!(
            "score {hi} exceeds the maximum attainable 2*sqrt(2) = {cap}"
        )));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect())
}

/// Runs a parsed command; the binary maps the error to an exit code.
pub fn run(cli: Cli) -> Result<(), Error> {
    configure_threads()?;
    match cli.command {
        Command::Bound { s, bound, out } => {
            let scores = score_grid(s, s, 1)?;
            let rows = keyrate::sweep(
                &bound.template()?,
                &scores,
                None,
                &bound.net_config(),
                &bound.solver_config(),
            )?;
            let text = render(&bound, &out, &rows)?;
            write_output(out.output.as_deref(), &text)
        }
        Command::Sweep { s_min, s_max, steps, p, qber0, qber1, bound, out } => {
            let params = p.map(|p| KeyRateParams::new(p, qber0, qber1)).transpose()?;
            let scores = score_grid(s_min, s_max, steps)?;
            let rows = keyrate::sweep(
                &bound.template()?,
                &scores,
                params.as_ref(),
                &bound.net_config(),
                &bound.solver_config(),
            )?;
            let text = render(&bound, &out, &rows)?;
            write_output(out.output.as_deref(), &text)
        }
        Command::Keyrate { s_min, s_max, steps, p, qber0, qber1, bound, out } => {
            let params = KeyRateParams::new(p, qber0, qber1)?;
            let scores = score_grid(s_min, s_max, steps)?;
            let rows = keyrate::sweep(
                &bound.template()?,
                &scores,
                Some(&params),
                &bound.net_config(),
                &bound.solver_config(),
            )?;
            let text = render(&bound, &out, &rows)?;
            write_output(out.output.as_deref(), &text)
        }
        Command::Verify { seed } => {
            let summary = crate::verify::run_all(seed);
            print!("{}", summary.render());
            if summary.failed == 0 {
                Ok(())
            } else {
                Err(Error::Numerical(format!(
                    "{} of {} verification suites failed",
                    summary.failed,
                    summary.results.len()
                )))
            }
        }
        Command::ExportSdp { s, phi_a, phi_b, bound, out } => {
            let spec = ObjectiveSpec::new(bound.objective.into(), bound.lambda, bound.mu, phi_a)
                .map_err(Error::Matrix)?;
            let angles = chsh::AnglePair::new(phi_a, phi_b).map_err(Error::Matrix)?;
            let problem = export_sdp_standard_form(&spec, &angles, s)?;
            write_output(out.output.as_deref(), &problem.to_text())
        }
    }
}

/// Honors `DIQKD_THREADS` for the rayon pool; unset or `0` means
/// rayon's automatic choice. Ignores the error when a pool already
/// exists (tests).
fn configure_threads() -> Result<(), Error> {
    if let Ok(v) = std::env::var("DIQKD_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| Error::Config(format!("DIQKD_THREADS = {v:?} is not a number")))?;
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::SolverStatus;

    fn row(s: f64, with_rates: bool) -> BoundRow {
        BoundRow {
            s,
            phi_a: 1.5,
            phi_b: 1.25,
            n_star: 0.25,
            delta_total: 0.0125,
            c_bar: 0.5,
            r_inf: with_rates.then_some(0.4),
            k_inf: with_rates.then_some(0.33),
            status: SolverStatus::Converged,
        }
    }

    #[test]
    fn csv_has_exact_header_and_blank_rate_columns() {
        let csv = rows_to_csv(&[row(2.5, false)]);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER);
        assert_eq!(lines.next().unwrap(), "2.5,1.5,1.25,0.25,0.0125,0.5,,,converged");
        let csv = rows_to_csv(&[row(2.5, true)]);
        assert_eq!(csv.lines().nth(1).unwrap(), "2.5,1.5,1.25,0.25,0.0125,0.5,0.4,0.33,converged");
    }

    #[test]
    fn json_rows_parse_back_with_meta() {
        let bound = BoundArgs {
            objective: ObjectiveArg::Frobenius,
            lambda: 0.5,
            mu: 1e-6,
            eps0: 0.1,
            width_tol: 0.05,
            refine_factor: 2,
            lipschitz_safety: 1.5,
            max_iters: 100,
            seed: 7,
        };
        let out = OutputArgs { output: None, format: FormatArg::Json, timestamp: false };
        let rows = vec![row(2.4, true), row(2.5, true)];
        let text = rows_to_json(&bound, &out, &rows).unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed["meta"]["seed"], 7);
        assert_eq!(parsed["meta"]["objective"], "frobenius");
        assert!(parsed["meta"].get("timestamp").is_none());
        let back: Vec<BoundRow> = serde_json::from_value(parsed["rows"].clone()).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[1].s, rows[1].s);
        assert_eq!(back[1].k_inf, rows[1].k_inf);
    }

    #[test]
    fn score_grid_endpoints_and_invariants() {
        let v = score_grid(2.1, 2.8, 8).unwrap();
        assert_eq!(v.len(), 8);
        assert_eq!(v[0], 2.1);
        assert_eq!(v[7], 2.8);
        assert_eq!(score_grid(2.4, 2.4, 1).unwrap(), vec![2.4]);
        assert!(matches!(score_grid(2.5, 2.4, 3), Err(Error::Config(_))));
        assert!(matches!(score_grid(1.9, 2.4, 3), Err(Error::Config(_))));
        assert!(matches!(score_grid(2.4, 2.4, 0), Err(Error::Config(_))));
        // Above the quantum maximum: infeasible, and the message names it.
        match score_grid(2.4, 2.9, 3) {
            Err(Error::Infeasible(msg)) => assert!(msg.contains("2.8284271247461903")),
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn atomic_write_replaces_existing_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        write_output(Some(&path), "old\n").unwrap();
        write_output(Some(&path), "new\n").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "new\n");
    }

    #[test]
    fn cli_parses_subcommands() {
        use clap::Parser as _;
        let cli = Cli::try_parse_from(["diqkd-bound", "bound", "--s", "2.5"]).unwrap();
        assert!(matches!(cli.command, Command::Bound { .. }));
        let cli = Cli::try_parse_from([
            "diqkd-bound", "sweep", "--s-min", "2.1", "--s-max", "2.8", "--steps", "5",
            "--p", "0.9", "--objective", "trace",
        ])
        .unwrap();
        match cli.command {
            Command::Sweep { steps, p, .. } => {
                assert_eq!(steps, 5);
                assert_eq!(p, Some(0.9));
            }
            _ => panic!("wrong subcommand"),
        }
        let cli = Cli::try_parse_from(["diqkd-bound", "verify", "--seed", "7"]).unwrap();
        assert!(matches!(cli.command, Command::Verify { seed: 7 }));
        assert!(Cli::try_parse_from(["diqkd-bound", "bound"]).is_err());
    }

    #[test]
    fn exit_codes_match_error_classes() {
        assert_eq!(exit_code(&Error::Infeasible("x".into())), 2);
        assert_eq!(exit_code(&Error::Config("x".into())), 3);
        assert_eq!(exit_code(&Error::Numerical("x".into())), 4);
        assert_eq!(exit_code(&Error::Io(std::io::Error::other("x"))), 5);
    }
}
