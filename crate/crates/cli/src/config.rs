//! Resolved experiment settings, read from a JSON file and overridden by flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::{Failure, Outcome};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "AFLAB_OUT_DIR";

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: String,
    /// A gadget spec such as `cycle:5`, or a graph file.
    pub graph: Option<String>,
    /// Shorthand for a one-round schedule.
    pub source: Option<u32>,
    /// Initiator sets by round, e.g. `0,1;;2`.
    pub schedule: Option<String>,
    pub protocol: Option<String>,
    pub fault: Option<String>,
    pub seed: Option<u64>,
    pub random_mode: Option<String>,
    pub round_cap: Option<usize>,
    pub out_dir: Option<PathBuf>,
    /// Stem of the output files.
    pub name: Option<String>,
    pub dot: Option<bool>,
    /// The configuration to judge, for `check-balance`.
    pub configuration: Option<String>,
    pub oracle: Option<bool>,
}

macro_rules! overlay {
    ($base:expr, $top:expr, $($f:ident),*) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f.clone(); } )*
    };
}

impl ExperimentConfig {
    /// Reads a bare config, or the header of an output file (a JSON object
    /// with a `config` member, possibly the first line of a trace).
    pub fn load(path: &Path) -> Result<ExperimentConfig, Failure> {
        let bad = |e: String| Failure::config(format!("{}: {e}", path.display()));
        let text = std::fs::read_to_string(path).map_err(|e| bad(e.to_string()))?;
        let text = text.trim_start().trim_start_matches('#');
        let value: serde_json::Value = match serde_json::from_str(text) {
            Ok(v) => v,
            Err(e) => serde_json::from_str(text.lines().next().unwrap_or("")).map_err(|_| bad(e.to_string()))?,
        };
        let value = match value {
            serde_json::Value::Object(mut o) if o.contains_key("config") => o.remove("config").expect("present"),
            v => v,
        };
        serde_json::from_value(value).map_err(|e| bad(e.to_string()))
    }

    /// `flags` wins wherever it has a value.
    pub fn merged(mut self, flags: &ExperimentConfig) -> ExperimentConfig {
        overlay!(self, flags, graph, source, schedule, protocol, fault, seed, random_mode, round_cap, out_dir, name, dot, configuration, oracle);
        self.command = flags.command.clone();
        self
    }

    /// Fills in the output directory from the environment when unset, so
    /// the recorded header names where the files went.
    pub fn with_resolved_out_dir(mut self) -> ExperimentConfig {
        if self.out_dir.is_none() {
            if let Some(d) = std::env::var_os(OUT_DIR_ENV).filter(|d| !d.is_empty()) {
                self.out_dir = Some(PathBuf::from(d));
            }
        }
        self
    }

    pub fn require_graph(&self) -> Result<&str, Failure> {
        self.graph.as_deref().ok_or_else(|| Failure::new(Outcome::Usage, "no graph given (--graph)"))
    }
}
