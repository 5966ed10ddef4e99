//! Command-line front end.
//!
//! Every command produces a complete report string plus an exit code:
//! 0 on success, 1 on input or usage errors, 2 when a verified statement
//! fails on a concrete input. Reports carry no timestamps, so identical
//! inputs give byte-identical output.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::bundles::{euler_class, BundleFamily};
use crate::dynamics::{
    gamma_generations, gamma_one_closed_form, hall_certificate_for_prefix, verify_labeling,
    DynamicsConfig, LabelingReport,
};
use crate::error::Error;
use crate::obstruction::{analyze, AnalysisReport};
use crate::ring::Atom;
use crate::selftest::{self, SelftestReport};
use crate::sweep::{self, SweepConfig, SweepSummary};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INVARIANT: i32 = 2;

pub const DYNAMICS_MAX_WINDOW: u32 = 4;
pub const DYNAMICS_MAX_DEPTH: u32 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "euler-hall",
    version,
    about = "Euler classes, Hall's condition and index dynamics"
)]
pub struct Cli {
    /// Emit JSON (default).
    #[arg(long, global = true, conflicts_with = "text")]
    pub json: bool,
    /// Emit plain text.
    #[arg(long, global = true)]
    pub text: bool,
    /// Worker threads for sweeps and generation expansion.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub jobs: u32,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Euler class, Hall's condition, matching and verdicts for a family file.
    Analyze { file: PathBuf },
    /// Euler class of a family file (trivial lines allowed).
    Euler { file: PathBuf },
    /// Check the Euler/Hall/matching equivalence on every small family.
    Sweep {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        max_m: u32,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        max_atom: u32,
        /// Largest accepted --max-m.
        #[arg(long, default_value_t = 4)]
        m_limit: u32,
        /// Largest accepted --max-atom.
        #[arg(long, default_value_t = 5)]
        atom_limit: u32,
    },
    /// Grow Gamma_0..Gamma_depth and certify the labeling.
    Dynamics {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        window: u32,
        #[arg(long)]
        depth: u32,
    },
    /// Run the embedded fast checks.
    Selftest,
}

/// What a run prints and returns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn failure(code: i32, message: String) -> Self {
        Outcome {
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
            code,
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvariantViolation(_) => EXIT_INVARIANT,
        _ => EXIT_INPUT,
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    result: &'a T,
}

fn render_json<T: Serialize>(command: &str, result: &T) -> String {
    let envelope = Envelope {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command,
        result,
    };
    let mut s = serde_json::to_string_pretty(&envelope).expect("reports serialize");
    s.push('\n');
    s
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(e) => {
            let rendered = e.render().to_string();
            if e.use_stderr() {
                Outcome {
                    stdout: String::new(),
                    stderr: rendered,
                    code: EXIT_INPUT,
                }
            } else {
                Outcome {
                    stdout: rendered,
                    stderr: String::new(),
                    code: EXIT_OK,
                }
            }
        }
    }
}

pub fn execute(cli: &Cli) -> Outcome {
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs as usize)
        .build()
    {
        Ok(pool) => pool,
        Err(e) => return Outcome::failure(EXIT_INPUT, format!("cannot start workers: {e}")),
    };
    pool.install(|| dispatch(cli))
}

fn dispatch(cli: &Cli) -> Outcome {
    let text = cli.text;
    match &cli.command {
        Command::Analyze { file } => cmd_analyze(file, text),
        Command::Euler { file } => cmd_euler(file, text),
        Command::Sweep {
            max_m,
            max_atom,
            m_limit,
            atom_limit,
        } => cmd_sweep(*max_m, *max_atom, *m_limit, *atom_limit, text),
        Command::Dynamics { window, depth } => cmd_dynamics(*window, *depth, text),
        Command::Selftest => cmd_selftest(text),
    }
}

fn read_family(path: &Path) -> Result<BundleFamily, Outcome> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Outcome::failure(EXIT_INPUT, format!("{}: {e}", path.display())))?;
    BundleFamily::from_json(&text)
        .map_err(|e| Outcome::failure(EXIT_INPUT, format!("{}: {e}", path.display())))
}

fn fmt_atoms(atoms: &[Atom]) -> String {
    atoms
        .iter()
        .map(Atom::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn cmd_analyze(path: &Path, text: bool) -> Outcome {
    let family = match read_family(path) {
        Ok(f) => f,
        Err(o) => return o,
    };
    let report = match analyze(&family) {
        Ok(r) => r,
        Err(e) => return Outcome::failure(exit_code(&e), e.to_string()),
    };
    let stdout = if text {
        analysis_text(&report)
    } else {
        render_json("analyze", &report)
    };
    Outcome {
        stdout,
        stderr: String::new(),
        code: EXIT_OK,
    }
}

fn analysis_text(r: &AnalysisReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "family: {}", r.family.to_json());
    let _ = writeln!(s, "euler class: {}", r.euler_class);
    let _ = writeln!(s, "euler nonzero: {}", r.euler_nonzero);
    let _ = writeln!(s, "hall: {}", r.hall);
    match &r.matching {
        Some(m) => {
            let _ = writeln!(s, "matching: {}", fmt_atoms(m));
        }
        None => {
            let _ = writeln!(s, "matching: none");
        }
    }
    let _ = write!(s, "verdict: {}", r.verdict);
    if let Some(w) = r.witness {
        let _ = write!(s, " (witness {w})");
    }
    s.push('\n');
    if let Some(v) = &r.violation {
        let idx: Vec<String> = v.iter().map(usize::to_string).collect();
        let _ = writeln!(s, "violation: sets {}", idx.join(", "));
    }
    let _ = write!(s, "doubled verdict: {}", r.doubled_verdict);
    if let Some(w) = r.doubled_witness {
        let _ = write!(s, " (witness {w})");
    }
    s.push('\n');
    s
}

#[derive(Serialize)]
struct EulerReport {
    family: BundleFamily,
    euler_class: String,
    degree: Option<usize>,
    is_zero: bool,
    terms: usize,
}

pub fn cmd_euler(path: &Path, text: bool) -> Outcome {
    let family = match read_family(path) {
        Ok(f) => f,
        Err(o) => return o,
    };
    let e = euler_class(&family);
    let report = EulerReport {
        euler_class: e.to_string(),
        degree: e.homogeneous_degree(),
        is_zero: e.is_zero(),
        terms: e.num_terms(),
        family,
    };
    let stdout = if text {
        format!("{}\n", report.euler_class)
    } else {
        render_json("euler", &report)
    };
    Outcome {
        stdout,
        stderr: String::new(),
        code: EXIT_OK,
    }
}

pub fn cmd_sweep(max_m: u32, max_atom: u32, m_limit: u32, atom_limit: u32, text: bool) -> Outcome {
    if max_m > m_limit {
        return Outcome::failure(
            EXIT_INPUT,
            format!("--max-m {max_m} exceeds the limit {m_limit}"),
        );
    }
    if max_atom > atom_limit {
        return Outcome::failure(
            EXIT_INPUT,
            format!("--max-atom {max_atom} exceeds the limit {atom_limit}"),
        );
    }
    let summary = match sweep::run(&SweepConfig {
        max_m: max_m as usize,
        max_atom,
        check_coefficients: true,
    }) {
        Ok(s) => s,
        Err(e) => return Outcome::failure(exit_code(&e), e.to_string()),
    };
    let stdout = if text {
        sweep_text(&summary)
    } else {
        render_json("sweep", &summary)
    };
    let (code, stderr) = if summary.passed() {
        (EXIT_OK, String::new())
    } else {
        (
            EXIT_INVARIANT,
            format!(
                "error: {} mismatches, {} coefficient failures\n",
                summary.mismatches, summary.coefficient_failures
            ),
        )
    };
    Outcome {
        stdout,
        stderr,
        code,
    }
}

fn sweep_text(s: &SweepSummary) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "families: {}", s.families);
    let _ = writeln!(out, "agreements: {}", s.agreements);
    let _ = writeln!(out, "mismatches: {}", s.mismatches);
    let _ = writeln!(
        out,
        "coefficient identity: {}/{}",
        s.coefficient_checks - s.coefficient_failures,
        s.coefficient_checks
    );
    for size in &s.by_size {
        let _ = writeln!(
            out,
            "m={}: {} families, {} satisfy Hall",
            size.m, size.families, size.hall_true
        );
    }
    if let Some(f) = &s.first_failure {
        let _ = writeln!(out, "first failure: {f}");
    }
    out
}

#[derive(Serialize)]
struct PrefixSdr {
    generations: usize,
    size: usize,
    hall_confirmed: bool,
}

#[derive(Serialize)]
struct DynamicsReport {
    window: u32,
    depth: u32,
    /// `j` is restricted to this range.
    index_window: [i64; 2],
    generation_sizes: Vec<usize>,
    labels: Vec<Vec<Atom>>,
    labeling: LabelingReport,
    gamma_one_closed_form: Option<bool>,
    prefix_sdr: PrefixSdr,
    passed: bool,
}

pub fn cmd_dynamics(window: u32, depth: u32, text: bool) -> Outcome {
    if window == 0 || window > DYNAMICS_MAX_WINDOW {
        return Outcome::failure(
            EXIT_INPUT,
            format!("--window must be in 1..={DYNAMICS_MAX_WINDOW}, got {window}"),
        );
    }
    if depth > DYNAMICS_MAX_DEPTH {
        return Outcome::failure(
            EXIT_INPUT,
            format!("--depth must be at most {DYNAMICS_MAX_DEPTH}, got {depth}"),
        );
    }
    let result = (|| {
        let cfg = DynamicsConfig::new(window, depth)?;
        let g = gamma_generations(&cfg)?;
        let labeling = verify_labeling(&g);
        let gamma_one = if depth >= 1 {
            let got: Vec<_> = g.generations[1].iter().map(|l| l.set.clone()).collect();
            Some(got == gamma_one_closed_form(window)?)
        } else {
            None
        };
        let (size, hall_confirmed) = match hall_certificate_for_prefix(&g, depth as usize) {
            Ok(sdr) => (sdr.assignment.map_or(0, |a| a.len()), true),
            Err(Error::InvariantViolation(_)) => (0, false),
            Err(e) => return Err(e),
        };
        let passed = labeling.passed() && hall_confirmed && gamma_one != Some(false);
        Ok(DynamicsReport {
            window,
            depth,
            index_window: [-i64::from(window), i64::from(window)],
            generation_sizes: g.sizes(),
            labels: g
                .generations
                .iter()
                .map(|gen| gen.iter().map(|l| l.label).collect())
                .collect(),
            labeling,
            gamma_one_closed_form: gamma_one,
            prefix_sdr: PrefixSdr {
                generations: depth as usize + 1,
                size,
                hall_confirmed,
            },
            passed,
        })
    })();
    let report = match result {
        Ok(r) => r,
        Err(e) => return Outcome::failure(exit_code(&e), e.to_string()),
    };
    let stdout = if text {
        dynamics_text(&report)
    } else {
        render_json("dynamics", &report)
    };
    let (code, stderr) = if report.passed {
        (EXIT_OK, String::new())
    } else {
        (
            EXIT_INVARIANT,
            "error: dynamics checks failed\n".to_string(),
        )
    };
    Outcome {
        stdout,
        stderr,
        code,
    }
}

fn dynamics_text(r: &DynamicsReport) -> String {
    let pass = |b: bool| if b { "pass" } else { "FAIL" };
    let mut s = String::new();
    let _ = writeln!(s, "window: {}..={}", r.index_window[0], r.index_window[1]);
    let _ = writeln!(s, "generation sizes: {:?}", r.generation_sizes);
    let _ = writeln!(
        s,
        "label membership: {}",
        pass(r.labeling.membership.passed)
    );
    let _ = writeln!(
        s,
        "label injectivity: {}",
        pass(r.labeling.injectivity.passed)
    );
    let _ = writeln!(s, "label levels: {}", pass(r.labeling.level.passed));
    if let Some(b) = r.gamma_one_closed_form {
        let _ = writeln!(s, "Gamma_1 closed form: {}", pass(b));
    }
    let _ = writeln!(
        s,
        "prefix SDR: {} sets, matching {}",
        r.prefix_sdr.size,
        pass(r.prefix_sdr.hall_confirmed)
    );
    s
}

pub fn cmd_selftest(text: bool) -> Outcome {
    let report: SelftestReport = selftest::run();
    let stdout = if text {
        let mut s = String::new();
        for c in &report.checks {
            let _ = writeln!(
                s,
                "{} {}: {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            );
        }
        s
    } else {
        render_json("selftest", &report)
    };
    Outcome {
        stdout,
        stderr: String::new(),
        code: if report.passed {
            EXIT_OK
        } else {
            EXIT_INVARIANT
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run_args(["euler-hall", "frobnicate"]).code, EXIT_INPUT);
        assert_eq!(
            run_args(["euler-hall", "sweep", "--max-m", "0", "--max-atom", "2"]).code,
            EXIT_INPUT
        );
        assert_eq!(
            run_args(["euler-hall", "--jobs", "0", "selftest"]).code,
            EXIT_INPUT
        );
    }

    #[test]
    fn help_exits_zero() {
        let out = run_args(["euler-hall", "--help"]);
        assert_eq!(out.code, EXIT_OK);
        assert!(out.stdout.contains("sweep"));
    }

    #[test]
    fn sweep_limits() {
        assert_eq!(cmd_sweep(5, 2, 4, 5, false).code, EXIT_INPUT);
        assert_eq!(cmd_sweep(2, 6, 4, 5, false).code, EXIT_INPUT);
        let out = cmd_sweep(1, 1, 4, 5, true);
        assert_eq!(out.code, EXIT_OK);
        assert!(out.stdout.starts_with("families: 1\n"));
    }

    #[test]
    fn dynamics_limits() {
        assert_eq!(cmd_dynamics(5, 1, false).code, EXIT_INPUT);
        assert_eq!(cmd_dynamics(2, 6, false).code, EXIT_INPUT);
        let out = cmd_dynamics(1, 0, false);
        assert_eq!(out.code, EXIT_OK);
        let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["result"]["generation_sizes"], serde_json::json!([1]));
    }

    #[test]
    fn missing_file() {
        let out = cmd_analyze(Path::new("/nonexistent/family.json"), false);
        assert_eq!(out.code, EXIT_INPUT);
        assert!(out.stderr.contains("/nonexistent/family.json"));
    }
}
