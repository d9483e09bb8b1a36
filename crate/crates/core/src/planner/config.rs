use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::classify::PlannerKind;

/// Environment variable naming the planner registry file.
pub const CONFIG_ENV: &str = "PDDL_COPILOT_CONFIG";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputParser {
    /// The planner writes its plan to `{plan_out}`.
    PlanFile,
    /// Metric-FF style `step 0: MOVE A B` listing on stdout.
    StdoutMetricff,
    /// One `(action args)` per stdout line.
    StdoutLines,
}

impl OutputParser {
    pub fn as_str(self) -> &'static str {
        match self {
            OutputParser::PlanFile => "plan-file",
            OutputParser::StdoutMetricff => "stdout-metricff",
            OutputParser::StdoutLines => "stdout-lines",
        }
    }
}

/// One registered planner. `command` is an argument vector in which the
/// substrings `{domain}`, `{problem}` and `{plan_out}` are replaced by
/// absolute paths inside the per-call scratch directory.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlannerConfig {
    pub name: String,
    pub kind: PlannerKind,
    pub command: Vec<String>,
    pub output_parser: OutputParser,
    pub timeout_seconds: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub working_dir: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read planner config {path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("malformed planner config {path}: {message}")]
    Malformed { path: PathBuf, message: String },
    #[error("planner '{name}': {message}")]
    Invalid { name: String, message: String },
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |message: &str| ConfigError::Invalid { name: self.name.clone(), message: message.to_string() };
        if self.name.trim().is_empty() {
            return Err(invalid("name must not be empty"));
        }
        if self.command.is_empty() || self.command[0].is_empty() {
            return Err(invalid("command must name a program"));
        }
        let mentions = |placeholder: &str| self.command.iter().any(|a| a.contains(placeholder));
        if !mentions("{domain}") || !mentions("{problem}") {
            return Err(invalid("command must contain the {domain} and {problem} placeholders"));
        }
        if self.output_parser == OutputParser::PlanFile && !mentions("{plan_out}") {
            return Err(invalid("the plan-file output parser needs a {plan_out} placeholder"));
        }
        if self.timeout_seconds == 0 {
            return Err(invalid("timeout_seconds must be a positive integer"));
        }
        Ok(())
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    planners: Vec<PlannerConfig>,
}

/// The set of configured planners, in file order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Registry {
    planners: Vec<PlannerConfig>,
}

impl Registry {
    pub fn new(planners: Vec<PlannerConfig>) -> Result<Self, ConfigError> {
        for (i, p) in planners.iter().enumerate() {
            p.validate()?;
            if planners[..i].iter().any(|q| q.name == p.name) {
                return Err(ConfigError::Invalid {
                    name: p.name.clone(),
                    message: "duplicate planner name".to_string(),
                });
            }
        }
        Ok(Registry { planners })
    }

    pub fn from_json(text: &str, path: &Path) -> Result<Self, ConfigError> {
        let file: ConfigFile = serde_json::from_str(text)
            .map_err(|e| ConfigError::Malformed { path: path.to_path_buf(), message: e.to_string() })?;
        Registry::new(file.planners)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path)
            .map_err(|e| ConfigError::Io { path: path.to_path_buf(), message: e.to_string() })?;
        Registry::from_json(&text, path)
    }

    /// Loads `explicit` if given, else the file named by `PDDL_COPILOT_CONFIG`,
    /// else returns an empty registry.
    pub fn discover(explicit: Option<&Path>) -> Result<Self, ConfigError> {
        match explicit {
            Some(path) => Registry::load(path),
            None => match std::env::var_os(CONFIG_ENV) {
                Some(path) if !path.is_empty() => Registry::load(Path::new(&path)),
                _ => Ok(Registry::default()),
            },
        }
    }

    pub fn planners(&self) -> &[PlannerConfig] {
        &self.planners
    }

    /// First configured planner of `kind`.
    pub fn for_kind(&self, kind: PlannerKind) -> Option<&PlannerConfig> {
        self.planners.iter().find(|p| p.kind == kind)
    }
}
