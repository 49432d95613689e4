//! Repeated analysis of synthetic transcripts: detection rates of a fraud
//! scenario, or false-positive rates of an honest one.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::AnalysisConfig;
use super::report::analyze_transcript;
use crate::error::{Error, Result};
use crate::synth::FraudScenario;

fn default_trials() -> u64 {
    100
}

fn default_thresholds() -> Vec<u64> {
    vec![9, 18, 99, 198]
}

/// TOML layout: top-level `trials` and `thresholds`, an optional
/// `[analysis]` table and a required `[scenario]` table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSpec {
    #[serde(default = "default_trials")]
    pub trials: u64,
    /// A value counts as flagged when below `1 / threshold`.
    #[serde(default = "default_thresholds")]
    pub thresholds: Vec<u64>,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    pub scenario: FraudScenario,
}

impl SimulationSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: SimulationSpec =
            toml::from_str(text).map_err(|e| Error::Scenario(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        SimulationSpec::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.thresholds.contains(&0) {
            return Err(Error::Scenario("thresholds must be positive".into()));
        }
        self.analysis.validate()?;
        self.scenario.validate()
    }
}

/// Quantities tracked per trial; `None` when the group test was skipped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub seed: u64,
    pub alpha_prime: f64,
    pub alpha_tilde_prime: f64,
    pub consolidated_alpha1: Option<f64>,
    pub consolidated_alpha_tilde: Option<f64>,
}

pub const METRICS: [&str; 4] = [
    "alpha_prime",
    "alpha_tilde_prime",
    "consolidated_alpha1",
    "consolidated_alpha_tilde",
];

impl TrialOutcome {
    pub fn metric(&self, name: &str) -> Option<f64> {
        match name {
            "alpha_prime" => Some(self.alpha_prime),
            "alpha_tilde_prime" => Some(self.alpha_tilde_prime),
            "consolidated_alpha1" => self.consolidated_alpha1,
            "consolidated_alpha_tilde" => self.consolidated_alpha_tilde,
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub metric: String,
    pub threshold: u64,
    /// Trials where the metric was available.
    pub trials: u64,
    pub flagged: u64,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub trials: u64,
    pub base_seed: u64,
    pub rates: Vec<RateRow>,
    pub outcomes: Vec<TrialOutcome>,
}

impl SimulationReport {
    pub fn rate(&self, metric: &str, threshold: u64) -> Option<f64> {
        self.rates
            .iter()
            .find(|r| r.metric == metric && r.threshold == threshold)
            .map(|r| r.rate)
    }

    /// Fraction of trials where either corrected significance is below
    /// `1 / threshold`.
    pub fn either_prime_rate(&self, threshold: u64) -> f64 {
        if self.outcomes.is_empty() {
            return 0.0;
        }
        let cut = 1.0 / threshold as f64;
        let hits = self
            .outcomes
            .iter()
            .filter(|o| o.alpha_prime < cut || o.alpha_tilde_prime < cut)
            .count();
        hits as f64 / self.outcomes.len() as f64
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("simulation report serializes")
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "trials {}  base seed {}", self.trials, self.base_seed);
        let _ = writeln!(
            out,
            "{:<26} {:>9} {:>8} {:>8} {:>7}",
            "metric", "threshold", "flagged", "trials", "rate"
        );
        for r in &self.rates {
            let _ = writeln!(
                out,
                "{:<26} {:>9} {:>8} {:>8} {:>7.3}",
                r.metric, r.threshold, r.flagged, r.trials, r.rate
            );
        }
        out
    }
}

pub fn run_trial(spec: &SimulationSpec, seed: u64) -> Result<TrialOutcome> {
    let transcript = spec.scenario.generate(seed)?;
    let analysis = analyze_transcript(&transcript, &spec.analysis)?;
    let consolidated = analysis.consolidated.as_ref().map(|(_, s)| s);
    Ok(TrialOutcome {
        seed,
        alpha_prime: analysis.summary.alpha_prime.alpha,
        alpha_tilde_prime: analysis.summary.alpha_tilde_prime.alpha,
        consolidated_alpha1: consolidated.map(|s| s.alpha1.alpha),
        consolidated_alpha_tilde: consolidated.map(|s| s.alpha_tilde.alpha),
    })
}

/// Trial `i` uses seed `scenario.seed + i` (wrapping).
pub fn simulate(spec: &SimulationSpec) -> Result<SimulationReport> {
    spec.validate()?;
    let outcomes = (0..spec.trials)
        .map(|i| run_trial(spec, spec.scenario.seed.wrapping_add(i)))
        .collect::<Result<Vec<_>>>()?;
    let mut rates = Vec::new();
    for metric in METRICS {
        let values: Vec<f64> = outcomes.iter().filter_map(|o| o.metric(metric)).collect();
        if values.is_empty() {
            continue;
        }
        for &threshold in &spec.thresholds {
            let cut = 1.0 / threshold as f64;
            let flagged = values.iter().filter(|&&v| v < cut).count() as u64;
            rates.push(RateRow {
                metric: metric.to_string(),
                threshold,
                trials: values.len() as u64,
                flagged,
                rate: flagged as f64 / values.len() as f64,
            });
        }
    }
    Ok(SimulationReport {
        trials: spec.trials,
        base_seed: spec.scenario.seed,
        rates,
        outcomes,
    })
}
