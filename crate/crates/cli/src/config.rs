//! Experiment configuration files.

use fpet_core::error::line_col;
use fpet_core::interval::FAMILY_IDS;
use fpet_core::rational::parse_q;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::PathBuf;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    RunConvergence,
    CheckInvariance,
    CheckCharacteristic,
    CheckVdc,
    EnumeratePrecedents,
    VerifyTimechange,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::RunConvergence => "run-convergence",
            Command::CheckInvariance => "check-invariance",
            Command::CheckCharacteristic => "check-characteristic",
            Command::CheckVdc => "check-vdc",
            Command::EnumeratePrecedents => "enumerate-precedents",
            Command::VerifyTimechange => "verify-timechange",
        }
    }

    fn needs_system(self) -> bool {
        !matches!(
            self,
            Command::EnumeratePrecedents | Command::VerifyTimechange
        )
    }

    fn needs_family(self) -> bool {
        self != Command::VerifyTimechange
    }
}

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_N_MAX: u64 = 12;
pub const DEFAULT_BUDGET: u64 = 10_000_000;
pub const DEFAULT_THRESHOLD: f64 = 1e-2;
pub const DEFAULT_T_MAX: f64 = 1e4;
pub const DEFAULT_H_MAX: f64 = 1e2;
pub const DEFAULT_MAX_NODES: usize = 10_000;
pub const DEFAULT_ALPHAS: [f64; 8] = [0.2, 1.0 / 3.0, 0.4, 0.5, 0.6, 2.0, 3.0, 3.5];
pub const DEFAULT_SHIFTS: [&str; 5] = ["1", "-1", "1/3", "-1/3", "7"];

fn default_intervals() -> String {
    "pinned".into()
}
fn default_n_max() -> u64 {
    DEFAULT_N_MAX
}
fn default_tol() -> f64 {
    DEFAULT_TOL
}
fn default_budget() -> u64 {
    DEFAULT_BUDGET
}
fn default_threshold() -> f64 {
    DEFAULT_THRESHOLD
}
fn default_t_max() -> f64 {
    DEFAULT_T_MAX
}
fn default_h_max() -> f64 {
    DEFAULT_H_MAX
}
fn default_max_nodes() -> usize {
    DEFAULT_MAX_NODES
}
fn default_alphas() -> Vec<f64> {
    DEFAULT_ALPHAS.to_vec()
}
fn default_shifts() -> Vec<String> {
    DEFAULT_SHIFTS.iter().map(|s| s.to_string()).collect()
}

/// One experiment. Paths are relative to the directory of the config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub command: Command,
    /// Stem of the output files; defaults to the config file stem.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<PathBuf>,
    #[serde(default)]
    pub observables: Vec<PathBuf>,
    /// Test function `f_0` for moment checks; defaults to the conjugate of
    /// the exact limit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f0: Option<PathBuf>,
    #[serde(default = "default_intervals")]
    pub intervals: String,
    #[serde(default = "default_n_max")]
    pub n_max: u64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Quadrature evaluations allowed per oscillatory average.
    #[serde(default = "default_budget")]
    pub budget: u64,
    /// Recorded for reproducibility; every computation is deterministic.
    #[serde(default)]
    pub seed: u64,
    /// Pass threshold on final distances.
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_h_max")]
    pub h_max: f64,
    #[serde(default = "default_max_nodes")]
    pub max_nodes: usize,
    /// Coefficients `c_1, …, c_d` of `θ(t) = Σ c_j t^{j/d}` for verify-timechange.
    #[serde(default)]
    pub phase: Vec<String>,
    #[serde(default = "default_alphas")]
    pub alphas: Vec<f64>,
    /// Interval index used for each exponent; `n_max` for all when empty.
    #[serde(default)]
    pub indices: Vec<u64>,
    /// Flow times for the off-diagonal check, as rational strings.
    #[serde(default = "default_shifts")]
    pub shifts: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    pub source_name: String,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}:{}: {}",
            self.source_name, self.line, self.column, self.message
        )
    }
}

impl std::error::Error for ConfigError {}

/// Line of the first `key = …` assignment, or 1.
fn key_position(text: &str, key: &str) -> (usize, usize) {
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let trimmed = line.trim_start();
        if let Some(rest) = trimmed.strip_prefix(key) {
            if rest.trim_start().starts_with('=') {
                return line_col(text, offset + line.len() - trimmed.len());
            }
        }
        offset += line.len();
    }
    (1, 1)
}

/// Strict parse: unknown and duplicate keys are errors, knobs must be
/// positive, and the files required by the command must be named.
pub fn parse_config(text: &str, source_name: &str) -> Result<ExperimentSpec, ConfigError> {
    let spec: ExperimentSpec = toml::from_str(text).map_err(|e| {
        let span = e.span().unwrap_or(0..0);
        let (line, column) = line_col(text, span.start);
        let mut message = e.message().to_string();
        if message.contains("duplicate key") {
            if let Some(key) = text.get(span).map(str::trim).filter(|k| !k.is_empty()) {
                message = format!("duplicate key `{key}`");
            }
        }
        ConfigError {
            source_name: source_name.to_string(),
            line,
            column,
            message,
        }
    })?;
    spec.validate().map_err(|(key, message)| {
        let (line, column) = key_position(text, key);
        ConfigError {
            source_name: source_name.to_string(),
            line,
            column,
            message,
        }
    })?;
    Ok(spec)
}

impl ExperimentSpec {
    /// A spec with every knob at its default.
    pub fn new(command: Command) -> Self {
        ExperimentSpec {
            command,
            name: None,
            system: None,
            family: None,
            observables: Vec::new(),
            f0: None,
            intervals: default_intervals(),
            n_max: DEFAULT_N_MAX,
            tol: DEFAULT_TOL,
            budget: DEFAULT_BUDGET,
            seed: 0,
            threshold: DEFAULT_THRESHOLD,
            t_max: DEFAULT_T_MAX,
            h_max: DEFAULT_H_MAX,
            max_nodes: DEFAULT_MAX_NODES,
            phase: Vec::new(),
            alphas: default_alphas(),
            indices: Vec::new(),
            shifts: default_shifts(),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("experiment specs always serialize")
    }

    /// Checks knobs and required references; errors name the offending key.
    pub fn validate(&self) -> Result<(), (&'static str, String)> {
        let positive = |key: &'static str, x: f64| {
            if x.is_finite() && x > 0.0 {
                Ok(())
            } else {
                Err((key, format!("`{key}` must be positive, got {x}")))
            }
        };
        positive("tol", self.tol)?;
        positive("threshold", self.threshold)?;
        positive("t_max", self.t_max)?;
        positive("h_max", self.h_max)?;
        if self.n_max == 0 {
            return Err(("n_max", "`n_max` must be positive".into()));
        }
        if self.budget == 0 {
            return Err(("budget", "`budget` must be positive".into()));
        }
        if self.max_nodes == 0 {
            return Err(("max_nodes", "`max_nodes` must be positive".into()));
        }
        for &a in &self.alphas {
            positive("alphas", a)?;
        }
        for (key, list) in [("phase", &self.phase), ("shifts", &self.shifts)] {
            if let Some((s, e)) = list.iter().find_map(|s| parse_q(s).err().map(|e| (s, e))) {
                return Err((key, format!("`{key}` entry {s:?}: {e}")));
            }
        }
        if !FAMILY_IDS.contains(&self.intervals.as_str()) {
            return Err((
                "intervals",
                format!(
                    "unknown interval family `{}` (expected one of {})",
                    self.intervals,
                    FAMILY_IDS.join(", ")
                ),
            ));
        }
        if self.command.needs_system() && self.system.is_none() {
            return Err(("command", format!("{} needs `system`", self.command.name())));
        }
        if self.command.needs_family() && self.family.is_none() {
            return Err(("command", format!("{} needs `family`", self.command.name())));
        }
        if self.command.needs_system() && self.observables.is_empty() {
            return Err((
                "command",
                format!("{} needs `observables`", self.command.name()),
            ));
        }
        if self.command == Command::VerifyTimechange {
            if self.phase.is_empty() {
                return Err(("command", "verify-timechange needs `phase`".into()));
            }
            if self.alphas.is_empty() {
                return Err(("alphas", "`alphas` must not be empty".into()));
            }
            if !self.indices.is_empty() && self.indices.len() != self.alphas.len() {
                return Err((
                    "indices",
                    "`indices` needs one entry per exponent in `alphas`".into(),
                ));
            }
            if self.indices.contains(&0) {
                return Err(("indices", "`indices` must be positive".into()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let text = "command = \"run-convergence\"\nsystem = \"s.toml\"\nfamily = \"f.toml\"\nobservables = [\"o.toml\"]\n";
        let spec = parse_config(text, "exp.toml").unwrap();
        assert_eq!(spec.tol, 1e-8);
        assert_eq!(spec.n_max, 12);
        assert_eq!(spec.budget, 10_000_000);
        assert_eq!(spec.intervals, "pinned");
        assert_eq!(spec.seed, 0);
    }

    #[test]
    fn unknown_key_is_positioned() {
        let text = "command = \"enumerate-precedents\"\nfamily = \"f.toml\"\ntoll = 1e-3\n";
        let err = parse_config(text, "exp.toml").unwrap_err();
        assert_eq!(err.line, 3);
        assert!(err.message.contains("toll"), "{}", err.message);
    }

    #[test]
    fn duplicate_key_is_named() {
        let text =
            "command = \"enumerate-precedents\"\nfamily = \"f.toml\"\nn_max = 3\nn_max = 4\n";
        let err = parse_config(text, "exp.toml").unwrap_err();
        assert_eq!(err.line, 4);
        assert!(err.message.contains("n_max"), "{}", err.message);
    }

    #[test]
    fn nonpositive_knob_points_at_its_line() {
        let text = "command = \"enumerate-precedents\"\nfamily = \"f.toml\"\n\ntol = -1.0\n";
        let err = parse_config(text, "exp.toml").unwrap_err();
        assert_eq!((err.line, err.column), (4, 1));
    }

    #[test]
    fn missing_reference_is_an_error() {
        let err =
            parse_config("command = \"check-vdc\"\nfamily = \"f.toml\"\n", "exp.toml").unwrap_err();
        assert!(err.message.contains("system"));
    }

    #[test]
    fn unknown_interval_family_is_rejected() {
        let text =
            "command = \"enumerate-precedents\"\nfamily = \"f.toml\"\nintervals = \"spiral\"\n";
        assert_eq!(parse_config(text, "e").unwrap_err().line, 3);
    }
}
