//! `sid`: identify and verify conditional causal effects in a selected
//! sub-population from a graph file.
//!
//! Exit codes: 0 identifiable (or verified), 2 not identified (or a
//! verification mismatch), 1 usage, input or parse error.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use sid_core::dsl::parse_graph;
use sid_core::estimand::{render, Format};
use sid_core::identify::{is_id, s_id, s_recover};
use sid_core::oracle::{verify, xor_model_summary};
use sid_core::{AugmentedAdmg, IdentifyResult, VertexSet};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_FAIL: u8 = 2;

/// Tolerance below which `verify` counts an estimand as matching the oracle.
pub const VERIFY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(
    name = "sid",
    version,
    about = "Identification of causal effects in a selected sub-population"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide whether P_X(Y | S=1) is identifiable and print an estimand.
    Identify(IdentifyArgs),
    /// Compare the estimand with exact ground truth on random models.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Latex,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// P_X(Y | S=1) from P(V | S=1)
    Sid,
    /// P_X(Y) from P(V | S=1)
    Srecover,
    /// P_X(Y) from P(V), ignoring the selection vertex (yes/no only)
    IdCheck,
}

#[derive(Debug, clap::Args)]
struct IdentifyArgs {
    /// Graph file in the edge-list format
    #[arg(long)]
    graph: PathBuf,
    /// Comma-separated treatment vertices (may be empty)
    #[arg(long, default_value = "")]
    treatment: String,
    /// Comma-separated outcome vertices
    #[arg(long)]
    outcome: String,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    #[arg(long, value_enum, default_value_t = Mode::Sid)]
    mode: Mode,
    /// Print Σ instead of Sum in text output
    #[arg(long)]
    unicode: bool,
}

#[derive(Debug, clap::Args)]
struct VerifyArgs {
    #[arg(long, required_unless_present = "appendix_d")]
    graph: Option<PathBuf>,
    #[arg(long, default_value = "")]
    treatment: String,
    #[arg(long, required_unless_present = "appendix_d")]
    outcome: Option<String>,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 2)]
    domain_size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.05)]
    min_prob: f64,
    /// Evaluate the built-in XOR selection model exactly instead
    #[arg(long)]
    appendix_d: bool,
}

/// What the process should print and return.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(code: u8, stdout: String) -> Self {
        Outcome {
            code,
            stdout,
            stderr: String::new(),
        }
    }

    fn usage(message: impl std::fmt::Display) -> Self {
        Outcome {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
        }
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome::ok(EXIT_OK, e.to_string())
                }
                _ => Outcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: e.to_string(),
                },
            }
        }
    };
    let result = match cli.command {
        Command::Identify(args) => identify(&args),
        Command::Verify(args) => verify_cmd(&args),
    };
    result.unwrap_or_else(|o| o)
}

fn load_graph(path: &PathBuf) -> Result<AugmentedAdmg, Outcome> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Outcome::usage(format!("cannot read {}: {e}", path.display())))?;
    parse_graph(&text)
        .map(|doc| doc.graph)
        .map_err(|e| Outcome::usage(format!("{}: {e}", path.display())))
}

fn parse_csv(g: &AugmentedAdmg, csv: &str, flag: &str) -> Result<VertexSet, Outcome> {
    let set: VertexSet = csv
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    let unknown = set.difference(g.vertices());
    if !unknown.is_empty() {
        return Err(Outcome::usage(format!(
            "--{flag} names {unknown}, which the graph does not contain; vertices are {}",
            g.vertices()
        )));
    }
    Ok(set)
}

fn canonical_json(v: &Value) -> String {
    format!("{v}\n")
}

fn witness_text(r: &IdentifyResult) -> String {
    match r.witness() {
        Some(w) => format!("FAIL (not identified by this procedure): {w}\n"),
        None => String::new(),
    }
}

fn identify(args: &IdentifyArgs) -> Result<Outcome, Outcome> {
    let g = load_graph(&args.graph)?;
    let x = parse_csv(&g, &args.treatment, "treatment")?;
    let y = parse_csv(&g, &args.outcome, "outcome")?;
    let query = json!({ "treatment": x, "outcome": y });

    if args.mode == Mode::IdCheck {
        let ok = is_id(&g, &x, &y).map_err(Outcome::usage)?;
        let code = if ok { EXIT_OK } else { EXIT_FAIL };
        let stdout = match args.format {
            OutputFormat::Json => canonical_json(&json!({
                "mode": "id-check",
                "query": query,
                "identifiable": ok,
            })),
            _ if ok => "ID\n".to_owned(),
            _ => "not ID: a Hedge blocks the effect\n".to_owned(),
        };
        return Ok(Outcome::ok(code, stdout));
    }

    let (result, mode) = match args.mode {
        Mode::Srecover => (s_recover(&g, &x, &y), "srecover"),
        _ => (s_id(&g, &x, &y), "sid"),
    };
    let result = result.map_err(Outcome::usage)?;
    let code = if result.is_identifiable() {
        EXIT_OK
    } else {
        EXIT_FAIL
    };
    let stdout = match (args.format, result.estimand()) {
        (OutputFormat::Json, _) => {
            let embedded = serde_json::to_value(&result).expect("results serialize");
            canonical_json(&json!({ "mode": mode, "query": query, "result": embedded }))
        }
        (OutputFormat::Text, Some(e)) => {
            let format = if args.unicode {
                Format::Text
            } else {
                Format::Ascii
            };
            format!("{}\n", render(e, format))
        }
        (OutputFormat::Latex, Some(e)) => format!("{}\n", render(e, Format::Latex)),
        (_, None) => witness_text(&result),
    };
    Ok(Outcome::ok(code, stdout))
}

fn verify_cmd(args: &VerifyArgs) -> Result<Outcome, Outcome> {
    if args.appendix_d {
        let s = xor_model_summary().map_err(Outcome::usage)?;
        let matches = (s.estimand_value - s.truth).abs() < VERIFY_TOLERANCE;
        let report = json!({
            "model": "xor-selection",
            "query": { "treatment": ["X"], "outcome": ["Y"], "at": { "X": 0, "Y": 1 } },
            "truth": s.truth,
            "estimand": render(&s.estimand, Format::Ascii),
            "estimand_value": s.estimand_value,
            "naive_value": s.naive_value,
            "naive_gap": s.naive_gap,
            "naive_gap_exceeds_0.05": s.naive_gap > 0.05,
        });
        return Ok(Outcome::ok(
            if matches { EXIT_OK } else { EXIT_FAIL },
            canonical_json(&report),
        ));
    }
    let path = args.graph.as_ref().expect("required by clap");
    let g = load_graph(path)?;
    let x = parse_csv(&g, &args.treatment, "treatment")?;
    let y = parse_csv(&g, args.outcome.as_deref().unwrap_or(""), "outcome")?;
    let report = verify(
        &g,
        &x,
        &y,
        args.trials,
        args.domain_size,
        args.min_prob,
        args.seed,
    )
    .map_err(Outcome::usage)?;
    let passed = report.status == "identifiable" && report.max_abs_error < VERIFY_TOLERANCE;
    let value = serde_json::to_value(&report).expect("reports serialize");
    Ok(Outcome::ok(
        if passed { EXIT_OK } else { EXIT_FAIL },
        canonical_json(&value),
    ))
}
