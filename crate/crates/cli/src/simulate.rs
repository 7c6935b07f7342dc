use std::collections::HashMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use aflab::engine::export::{dot_frames, round_records, summarize, TraceSummary};
use aflab::engine::{self, Schedule, Trace};
use aflab::faults::{fault_cap, Certificate, FaultError, FaultLab, FaultVerdict, Termination};
use aflab::graph::Graph;
use aflab::variants::{parrot_cap, random_cap, run_variant, Protocol, RandomMode, RandomSource};

use crate::config::ExperimentConfig;
use crate::{faultarg, load_graph, Failure, Outcome};

pub const DEFAULT_OUT_DIR: &str = "aflab_out";
pub const DEFAULT_NAME: &str = "trace";

#[derive(Serialize)]
struct Header<'a> {
    tool: &'static str,
    version: &'static str,
    config: &'a ExperimentConfig,
}

#[derive(Serialize)]
struct SummaryRow {
    protocol: String,
    schedule: String,
    rounds_recorded: usize,
    sending_rounds: usize,
    terminated_at: Option<usize>,
    broadcast_round: Option<usize>,
    informed: usize,
    vertices: usize,
    verdict: &'static str,
    first_violation_round: Option<usize>,
}

fn verdict_name(o: Outcome) -> &'static str {
    match o {
        Outcome::Ok => "ok",
        Outcome::Violation => "violation",
        _ => "inconclusive",
    }
}

fn parse_mode(s: &str) -> Result<RandomMode, Failure> {
    match s {
        "per_node" => Ok(RandomMode::PerNode),
        "shared" => Ok(RandomMode::Shared),
        other => Err(Failure::usage(format!("unknown random mode {other:?}, expected per_node or shared"))),
    }
}

/// `S_a == S_b` for the first repeated configuration, as `(a, b - a)`.
fn recurrence(trace: &Trace) -> Option<(usize, usize)> {
    let mut seen = HashMap::new();
    for (i, s) in trace.rounds.iter().enumerate() {
        if let Some(&j) = seen.get(s) {
            return Some((j + 1, i - j));
        }
        seen.insert(s, i);
    }
    None
}

struct Run {
    trace: Trace,
    outcome: Outcome,
    fault_verdict: Option<FaultVerdict>,
    termination: Option<Termination>,
    certificate: Option<Certificate>,
}

fn run_variant_protocol(cfg: &mut ExperimentConfig, g: &Graph, p: Protocol, schedule: &Schedule) -> Result<Run, Failure> {
    if cfg.fault.is_some() {
        return Err(Failure::config(format!("faults apply to af only, not {p}")));
    }
    let [only] = schedule.as_slice() else {
        return Err(Failure::usage(format!("{p} runs from a single source")));
    };
    let mut it = only.iter();
    let (Some(&source), None) = (it.next(), it.next()) else {
        return Err(Failure::usage(format!("{p} runs from a single source")));
    };
    let mut rng = None;
    let cap_default = if p == Protocol::Random {
        let mode = parse_mode(cfg.random_mode.get_or_insert_with(|| "per_node".into()))?;
        rng = Some(RandomSource::new(*cfg.seed.get_or_insert(0), mode));
        random_cap(g, mode)
    } else {
        parrot_cap(g)
    };
    let cap = *cfg.round_cap.get_or_insert(cap_default);
    let trace = run_variant(p, g, source, rng.as_mut(), cap).map_err(|e| Failure::usage(e.to_string()))?;
    let mut certificate = None;
    let outcome = if trace.terminated() {
        if trace.broadcast { Outcome::Ok } else { Outcome::Violation }
    } else if let (Some((first, period)), false) = (recurrence(&trace), p == Protocol::Random) {
        // deterministic steps depend on the configuration alone
        certificate = Some(Certificate::Recurrence { first, period });
        Outcome::Violation
    } else {
        Outcome::Inconclusive
    };
    Ok(Run { trace, outcome, fault_verdict: None, termination: None, certificate })
}

fn run_af(cfg: &mut ExperimentConfig, g: &Graph, schedule: &Schedule, base: &Path) -> Result<Run, Failure> {
    let fault = cfg.fault.as_deref().map(|f| faultarg::parse_fault(f, base)).transpose().map_err(Failure::config)?;
    let lab = match FaultLab::new(g) {
        Ok(lab) => lab,
        Err(FaultError::TooLarge) if fault.is_none() => {
            let cap = *cfg.round_cap.get_or_insert(engine::default_cap(g, schedule));
            let trace = engine::run(g, schedule, cap).map_err(|e| Failure::usage(e.to_string()))?;
            let outcome = match (trace.terminated(), trace.broadcast) {
                (true, true) => Outcome::Ok,
                (true, false) => Outcome::Violation,
                _ => Outcome::Inconclusive,
            };
            return Ok(Run { trace, outcome, fault_verdict: None, termination: None, certificate: None });
        }
        Err(e) => return Err(Failure::usage(e.to_string())),
    };
    let (trace, verdict) = match &fault {
        Some(f) => {
            let cap = *cfg.round_cap.get_or_insert(fault_cap(g, schedule, f));
            lab.run(schedule, f, cap).map_err(|e| Failure::config(e.to_string()))?
        }
        None => {
            let cap = *cfg.round_cap.get_or_insert(engine::default_cap(g, schedule));
            lab.run_clean(schedule, cap).map_err(|e| Failure::usage(e.to_string()))?
        }
    };
    let outcome = if verdict.is_bad() {
        Outcome::Violation
    } else if verdict.inconclusive() {
        Outcome::Inconclusive
    } else {
        Outcome::Ok
    };
    let certificate = match &verdict.termination {
        Termination::NonTerminating { certificate } => Some(certificate.clone()),
        _ => None,
    };
    let termination = Some(verdict.termination.clone());
    Ok(Run { trace, outcome, fault_verdict: fault.is_some().then_some(verdict), termination, certificate })
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

pub fn simulate(cfg: ExperimentConfig) -> Result<Outcome, Failure> {
    let mut cfg = cfg.with_resolved_out_dir();
    let g = load_graph(cfg.require_graph()?)?;
    match (&cfg.schedule, cfg.source) {
        (None, None) => return Err(Failure::usage("no source given (--source or --schedule)")),
        (None, Some(src)) => cfg.schedule = Some(src.to_string()),
        (Some(s), Some(src)) if *s != src.to_string() => return Err(Failure::usage("--source and --schedule disagree")),
        _ => {}
    }
    let schedule = faultarg::schedule(cfg.schedule.as_deref().expect("set above")).map_err(Failure::usage)?;
    if let Some(v) = schedule.iter().flatten().find(|&&v| !g.contains(v)) {
        return Err(Failure::usage(format!("vertex {v} is not in the graph")));
    }
    let protocol: Protocol = cfg.protocol.get_or_insert_with(|| "af".into()).parse().map_err(|e: aflab::variants::VariantError| Failure::usage(e.to_string()))?;
    let out_dir = cfg.out_dir.get_or_insert_with(|| PathBuf::from(DEFAULT_OUT_DIR)).clone();
    let name = cfg.name.get_or_insert_with(|| DEFAULT_NAME.into()).clone();
    let dot = *cfg.dot.get_or_insert(false);

    let run = match protocol {
        Protocol::Af => run_af(&mut cfg, &g, &schedule, Path::new("."))?,
        p => run_variant_protocol(&mut cfg, &g, p, &schedule)?,
    };

    std::fs::create_dir_all(&out_dir).map_err(|e| Failure::usage(format!("{}: {e}", out_dir.display())))?;
    let header = serde_json::to_string(&Header { tool: "aflab", version: env!("CARGO_PKG_VERSION"), config: &cfg }).expect("json");

    let mut jsonl = format!("{header}\n");
    for rec in round_records(&run.trace) {
        jsonl.push_str(&serde_json::to_string(&rec).expect("json"));
        jsonl.push('\n');
    }
    let trace_path = out_dir.join(format!("{name}.jsonl"));
    write(&trace_path, &jsonl)?;

    let summary: TraceSummary = summarize(&g, &run.trace);
    let row = SummaryRow {
        protocol: protocol.to_string(),
        schedule: cfg.schedule.clone().unwrap_or_default(),
        rounds_recorded: summary.rounds_recorded,
        sending_rounds: summary.sending_rounds,
        terminated_at: summary.terminated_at,
        broadcast_round: summary.broadcast_round,
        informed: summary.informed,
        vertices: summary.vertices,
        verdict: verdict_name(run.outcome),
        first_violation_round: run.fault_verdict.as_ref().and_then(|v| v.first_violation_round),
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    w.serialize(&row).map_err(|e| Failure::usage(e.to_string()))?;
    let body = String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf8");
    let csv_path = out_dir.join(format!("{name}.csv"));
    write(&csv_path, &format!("# {header}\n{body}"))?;

    let mut files = vec![trace_path, csv_path];
    if dot {
        for (i, frame) in dot_frames(&g, &run.trace).iter().enumerate() {
            let p = out_dir.join(format!("{name}_round_{}.dot", i + 1));
            write(&p, &format!("// {header}\n{frame}"))?;
            files.push(p);
        }
    }

    let out = json!({
        "verdict": verdict_name(run.outcome),
        "protocol": protocol.to_string(),
        "summary": summary,
        "termination": run.termination,
        "fault_verdict": run.fault_verdict,
        "certificate": run.certificate,
        "files": files,
    });
    println!("{}", serde_json::to_string_pretty(&out).expect("json"));
    Ok(run.outcome)
}
