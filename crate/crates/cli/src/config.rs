//! Experiment configuration: a single JSON document per run.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use twirlkit::ensembles::{Dopant, EnsembleKind, PauliString, Placement};
use twirlkit::form_factors::TimeGrid;
use twirlkit::parallel::RngSeed;

/// Largest `d` for Monte Carlo twirl curves in the runner.
pub const MAX_MC_DIM: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Probe {
    FormFactors,
    Otoc,
    FramePotential,
    Loschmidt,
    Entanglement,
    Tmi,
    CliffordAsymptote,
    DopedOtoc,
}

impl Probe {
    pub fn name(self) -> &'static str {
        match self {
            Probe::FormFactors => "form-factors",
            Probe::Otoc => "otoc",
            Probe::FramePotential => "frame-potential",
            Probe::Loschmidt => "loschmidt",
            Probe::Entanglement => "entanglement",
            Probe::Tmi => "tmi",
            Probe::CliffordAsymptote => "clifford-asymptote",
            Probe::DopedOtoc => "doped-otoc",
        }
    }

    /// Probes whose operators or circuits live on qubits.
    pub fn needs_qubits(self) -> bool {
        matches!(self, Probe::Otoc | Probe::Loschmidt | Probe::CliffordAsymptote | Probe::DopedOtoc)
    }

    fn uses_time_grid(self) -> bool {
        !matches!(self, Probe::CliffordAsymptote | Probe::DopedOtoc)
    }
}

impl fmt::Display for Probe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Pauli labels for the probe operators; qubit 0 is the leftmost letter.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorLabels {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub probe: Probe,
    #[serde(default = "EnsembleKind::gue")]
    pub ensemble: EnsembleKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_qubits: Option<usize>,
    #[serde(default = "default_grid")]
    pub time_grid: TimeGrid,
    #[serde(default = "default_spectra")]
    pub n_spectra: usize,
    #[serde(default = "default_twirl_samples")]
    pub n_twirl_samples: usize,
    /// Also emit Monte Carlo twirl curves (needs `d <= MAX_MC_DIM`).
    #[serde(default)]
    pub monte_carlo: bool,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub operators: OperatorLabels,
    /// Frame-potential order.
    #[serde(default = "default_k")]
    pub k: usize,
    /// Doping counts for `doped-otoc`.
    #[serde(default = "default_doping")]
    pub doping: Vec<usize>,
    #[serde(default = "default_dopant")]
    pub dopant: Dopant,
    #[serde(default)]
    pub placement: Placement,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn default_grid() -> TimeGrid {
    TimeGrid::log(0.01, 1e4, 200)
}

fn default_spectra() -> usize {
    100
}

fn default_twirl_samples() -> usize {
    1000
}

fn default_k() -> usize {
    1
}

fn default_doping() -> Vec<usize> {
    vec![0, 1, 2, 4, 8, 16]
}

fn default_dopant() -> Dopant {
    Dopant::T
}

/// A validation failure tied to one config field.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{field}: {message}")]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config:\n  {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n  "))]
    Invalid(Vec<FieldError>),
}

fn field(field: &str, message: impl Into<String>) -> FieldError {
    FieldError { field: field.into(), message: message.into() }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
        Self::from_json(&text)
    }

    pub fn seed(&self) -> RngSeed {
        RngSeed(self.seed)
    }

    /// Hilbert-space dimension, from `d` or `2^n_qubits`.
    pub fn dim(&self) -> usize {
        match (self.d, self.n_qubits) {
            (Some(d), _) => d,
            (None, Some(n)) => 1 << n,
            (None, None) => 0,
        }
    }

    pub fn qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    /// Operator `A`, defaulting to `X` on the first qubit.
    pub fn operator_a(&self) -> twirlkit::Result<PauliString> {
        match &self.operators.a {
            Some(label) => PauliString::parse(label),
            None => PauliString::single(self.qubits(), 0, 'X'),
        }
    }

    /// Operator `B`, defaulting to `X` on the second qubit.
    pub fn operator_b(&self) -> twirlkit::Result<PauliString> {
        match &self.operators.b {
            Some(label) => PauliString::parse(label),
            None => PauliString::single(self.qubits(), 1, 'X'),
        }
    }

    /// Collects every field-level problem rather than stopping at the first.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut errors = Vec::new();
        if let Err(e) = self.ensemble.validate() {
            errors.push(field("ensemble.scale", e.to_string()));
        }
        match (self.d, self.n_qubits) {
            (None, None) => errors.push(field("d", "either d or n_qubits is required")),
            (Some(d), Some(n)) if n >= usize::BITS as usize || d != 1 << n => {
                errors.push(field("n_qubits", format!("d = {d} is not 2^{n}")))
            }
            (Some(d), _) if d < 2 => errors.push(field("d", "must be >= 2")),
            (None, Some(n)) if n == 0 || n > 24 => errors.push(field("n_qubits", "must be in 1..=24")),
            _ => {}
        }
        let d = self.dim();
        if d >= 2 && self.probe.needs_qubits() && !d.is_power_of_two() {
            errors.push(field("d", format!("probe {} needs d = 2^n, got {d}", self.probe)));
        }
        if self.probe.uses_time_grid() {
            if let Err(e) = self.time_grid.validate() {
                errors.push(field("time_grid", e.to_string()));
            }
        }
        if self.n_spectra < 2 {
            errors.push(field("n_spectra", "must be >= 2"));
        }
        if self.n_twirl_samples == 0 {
            errors.push(field("n_twirl_samples", "must be >= 1"));
        }
        if self.k == 0 {
            errors.push(field("k", "must be >= 1"));
        }
        if self.monte_carlo && d > MAX_MC_DIM {
            errors.push(field("monte_carlo", format!("Monte Carlo curves are limited to d <= {MAX_MC_DIM}")));
        }
        if self.probe == Probe::DopedOtoc && self.doping.is_empty() {
            errors.push(field("doping", "needs at least one doping count"));
        }
        if let Placement::Fixed(q) = self.placement {
            if q >= self.qubits().max(1) {
                errors.push(field("placement", format!("qubit {q} out of range")));
            }
        }
        if self.probe.needs_qubits() && d.is_power_of_two() && d >= 4 {
            for (name, op) in [("operators.a", self.operator_a()), ("operators.b", self.operator_b())] {
                match op {
                    Ok(p) if p.n() != self.qubits() => {
                        errors.push(field(name, format!("label acts on {} qubits, expected {}", p.n(), self.qubits())))
                    }
                    Ok(_) => {}
                    Err(e) => errors.push(field(name, e.to_string())),
                }
            }
        }
        if self.probe.needs_qubits() && d < 4 {
            errors.push(field("n_qubits", format!("probe {} needs at least 2 qubits", self.probe)));
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid(errors))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_takes_defaults() {
        let cfg = ExperimentConfig::from_json(r#"{"probe": "form-factors", "d": 256}"#).unwrap();
        assert_eq!(cfg.ensemble, EnsembleKind::gue());
        assert_eq!(cfg.time_grid.points, 200);
        assert_eq!(cfg.dim(), 256);
    }

    #[test]
    fn qubit_probes_reject_non_power_of_two() {
        let err = ExperimentConfig::from_json(r#"{"probe": "otoc", "d": 12}"#).unwrap_err();
        let ConfigError::Invalid(fields) = err else { panic!("expected field errors") };
        assert!(fields.iter().any(|f| f.field == "d"), "{fields:?}");
    }

    #[test]
    fn every_bad_field_is_reported() {
        let text = r#"{"probe": "tmi", "d": 16, "n_spectra": 0, "n_twirl_samples": 0,
            "time_grid": {"kind": "log", "t_min": 0.0, "t_max": 1.0, "points": 5}}"#;
        let ConfigError::Invalid(fields) = ExperimentConfig::from_json(text).unwrap_err() else {
            panic!("expected field errors")
        };
        let names: Vec<&str> = fields.iter().map(|f| f.field.as_str()).collect();
        assert_eq!(names, ["time_grid", "n_spectra", "n_twirl_samples"]);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(matches!(
            ExperimentConfig::from_json(r#"{"probe": "otoc", "d": 16, "colour": 1}"#),
            Err(ConfigError::Parse(_))
        ));
    }

    #[test]
    fn operator_labels_must_match_qubits() {
        let text = r#"{"probe": "otoc", "n_qubits": 3, "operators": {"a": "XI"}}"#;
        let ConfigError::Invalid(fields) = ExperimentConfig::from_json(text).unwrap_err() else {
            panic!("expected field errors")
        };
        assert_eq!(fields[0].field, "operators.a");
    }
}
