//! `aflab`: simulate Amnesiac Flooding and its variants, judge configurations,
//! and run the batch suites.

mod config;
mod faultarg;
mod simulate;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use aflab::balance::{terminates_oracle, BalanceChecker, BalanceError};
use aflab::engine::{self, Configuration};
use aflab::graph::io::{parse_any, to_dot, to_edge_list, to_json};
use aflab::graph::{Gadget, Graph};
use aflab::suites::{run_suite, SUITE_NAMES};

use config::ExperimentConfig;

/// Exit statuses; a total function of the verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Ok = 0,
    Violation = 2,
    Inconclusive = 3,
    /// Bad flags or a malformed graph.
    Usage = 64,
    /// An invalid fault or configuration.
    Invalid = 65,
}

#[derive(Debug)]
pub struct Failure {
    pub outcome: Outcome,
    pub message: String,
}

impl Failure {
    pub fn new(outcome: Outcome, message: impl Into<String>) -> Failure {
        Failure { outcome, message: message.into() }
    }

    pub fn config(message: impl Into<String>) -> Failure {
        Failure::new(Outcome::Invalid, message)
    }

    pub fn usage(message: impl Into<String>) -> Failure {
        Failure::new(Outcome::Usage, message)
    }
}

#[derive(Parser)]
#[command(name = "aflab", version, about = "Amnesiac Flooding simulator, balance checker and fault laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a protocol, optionally under a fault, and write the trace.
    Simulate(SimulateArgs),
    /// Decide whether a configuration is balanced.
    CheckBalance(BalanceArgs),
    /// Run a batch suite and print its report.
    Suite {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(SUITE_NAMES))]
        name: String,
    },
    /// Print a generated graph.
    Generate {
        /// Gadget spec, e.g. `cycle:5` or `fec:1,2,1`.
        spec: String,
        #[arg(long, value_enum, default_value_t = Format::Edges)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Edges,
    Json,
    Dot,
}

#[derive(clap::Args)]
struct SimulateArgs {
    /// Gadget spec (`cycle:5`) or a graph file (edge list or JSON).
    #[arg(long)]
    graph: Option<String>,
    #[arg(long)]
    source: Option<u32>,
    /// Initiators per round, e.g. `0,1;;2`.
    #[arg(long)]
    schedule: Option<String>,
    /// af, parrot, one_bit, neighbourhood2 or random.
    #[arg(long)]
    protocol: Option<String>,
    /// `drop:u-v@k`, `unidir:u-v[,u-v...]` or `byz:v1,v2@h[:strategy.json]`.
    #[arg(long)]
    fault: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// per_node or shared.
    #[arg(long)]
    random_mode: Option<String>,
    /// Rounds to record.
    #[arg(long = "cap")]
    round_cap: Option<usize>,
    /// Output directory; defaults to $AFLAB_OUT_DIR, then `aflab_out`.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Write one DOT file per round.
    #[arg(long)]
    dot: bool,
    /// Stem of the output files.
    #[arg(long)]
    name: Option<String>,
    /// JSON config file (or a previous output file); flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(clap::Args)]
struct BalanceArgs {
    #[arg(long)]
    graph: Option<String>,
    /// Inline `u-v,u-v` or a file of JSON pairs or `u-v` lines.
    #[arg(long)]
    configuration: Option<String>,
    /// Also run the flooding oracle and report agreement.
    #[arg(long)]
    oracle: bool,
    #[arg(long)]
    config: Option<PathBuf>,
}

fn resolve(file: Option<&Path>, flags: ExperimentConfig) -> Result<ExperimentConfig, Failure> {
    Ok(match file {
        Some(p) => ExperimentConfig::load(p)?.merged(&flags),
        None => flags,
    })
}

pub fn load_graph(spec: &str) -> Result<Graph, Failure> {
    let path = Path::new(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{spec}: {e}")))?;
        return parse_any(&text).map_err(|e| Failure::usage(format!("malformed graph {spec}: {e}")));
    }
    let gadget: Gadget = spec.parse().map_err(|e| Failure::usage(format!("graph {spec:?} is neither a file nor a gadget spec: {e}")))?;
    gadget.build().map_err(|e| Failure::usage(format!("{spec}: {e}")))
}

fn parse_configuration(text: &str) -> Result<Configuration, Failure> {
    let path = Path::new(text);
    let raw = if !text.is_empty() && path.is_file() {
        std::fs::read_to_string(path).map_err(|e| Failure::config(format!("{text}: {e}")))?
    } else {
        text.to_string()
    };
    if raw.trim_start().starts_with('[') {
        let pairs: Vec<(u32, u32)> = serde_json::from_str(&raw).map_err(|e| Failure::config(format!("configuration: {e}")))?;
        return Ok(pairs.into_iter().collect());
    }
    let mut out = Configuration::new();
    for item in raw.lines().map(|l| l.split('#').next().unwrap_or("")).flat_map(|l| l.split(',')) {
        let item = item.trim();
        if item.is_empty() {
            continue;
        }
        out.insert(faultarg::message(item).map_err(Failure::config)?);
    }
    Ok(out)
}

fn check_balance(args: BalanceArgs) -> Result<Outcome, Failure> {
    let flags = ExperimentConfig {
        command: "check-balance".into(),
        graph: args.graph,
        configuration: args.configuration,
        oracle: args.oracle.then_some(true),
        ..Default::default()
    };
    let cfg = resolve(args.config.as_deref(), flags)?;
    let g = load_graph(cfg.require_graph()?)?;
    let s = parse_configuration(cfg.configuration.as_deref().unwrap_or(""))?;
    engine::validate(&g, &s).map_err(|e| Failure::config(e.to_string()))?;
    let oracle = || terminates_oracle(&g, &s).map_err(|e| Failure::config(e.to_string()));
    let (balanced, witness, method) = match BalanceChecker::new(&g) {
        Ok(c) => {
            let v = c.check(&s).map_err(|e| Failure::config(e.to_string()))?;
            (v.balanced, v.witness, "structures")
        }
        // too many cycles to enumerate: fall back to simulation
        Err(BalanceError::TooLarge { .. }) => (oracle()?, None, "oracle"),
        Err(e) => return Err(Failure::config(e.to_string())),
    };
    let (terminates, agreement) = if cfg.oracle == Some(true) {
        let t = oracle()?;
        (Some(t), Some(t == balanced))
    } else {
        (None, None)
    };
    let out = json!({
        "balanced": balanced,
        "witness": witness,
        "oracle_agreement": agreement,
        "oracle_terminates": terminates,
        "method": method,
    });
    println!("{}", serde_json::to_string_pretty(&out).expect("json"));
    Ok(if balanced { Outcome::Ok } else { Outcome::Violation })
}

fn suite(name: &str) -> Result<Outcome, Failure> {
    let report = run_suite(name).ok_or_else(|| Failure::usage(format!("unknown suite {name:?}")))?;
    eprintln!("{}", report.summary());
    println!("{}", serde_json::to_string_pretty(&report).expect("json"));
    Ok(if report.passed { Outcome::Ok } else { Outcome::Violation })
}

fn generate(spec: &str, format: Format) -> Result<Outcome, Failure> {
    let g = load_graph(spec)?;
    match format {
        Format::Edges => print!("{}", to_edge_list(&g)),
        Format::Json => println!("{}", to_json(&g)),
        Format::Dot => print!("{}", to_dot(&g, "G", &[])),
    }
    Ok(Outcome::Ok)
}

fn dispatch(cli: Cli) -> Result<Outcome, Failure> {
    match cli.command {
        Command::Simulate(a) => {
            let flags = ExperimentConfig {
                command: "simulate".into(),
                graph: a.graph,
                source: a.source,
                schedule: a.schedule,
                protocol: a.protocol,
                fault: a.fault,
                seed: a.seed,
                random_mode: a.random_mode,
                round_cap: a.round_cap,
                out_dir: a.out_dir,
                name: a.name,
                dot: a.dot.then_some(true),
                ..Default::default()
            };
            simulate::simulate(resolve(a.config.as_deref(), flags)?)
        }
        Command::CheckBalance(a) => check_balance(a),
        Command::Suite { name } => suite(&name),
        Command::Generate { spec, format } => generate(&spec, format),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { Outcome::Usage as u8 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(o) => ExitCode::from(o as u8),
        Err(f) => {
            eprintln!("aflab: {}", f.message);
            ExitCode::from(f.outcome as u8)
        }
    }
}
