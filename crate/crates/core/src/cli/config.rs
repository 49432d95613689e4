//! Flat TOML configuration for the analysis thresholds and sizes.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::aggregate::{RowTrials, SummaryPolicy, DEFAULT_DETECTION_ALPHA};
use crate::error::{Error, Result};
use crate::flagseq::DEFAULT_MAX_MARKS;
use crate::stationarity::DEFAULT_SEGMENTS;

/// Every key is optional. Trial counts left unset are derived from the
/// roster size and `precincts`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    pub max_marks: usize,
    pub segments: usize,
    pub top_k: usize,
    pub tuned_top_k: usize,
    /// Precincts analysed together; scales the default trial counts.
    pub precincts: usize,
    pub longest_run_trials: Option<u64>,
    pub run_count_trials: Option<u64>,
    pub stationarity_trials: Option<u64>,
    pub group_longest_run_trials: Option<u64>,
    pub group_run_count_trials: Option<u64>,
    pub group_stationarity_trials: Option<u64>,
    pub summary_trials: u64,
    pub detection_alpha: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            max_marks: DEFAULT_MAX_MARKS,
            segments: DEFAULT_SEGMENTS,
            top_k: 5,
            tuned_top_k: 6,
            precincts: 1,
            longest_run_trials: None,
            run_count_trials: None,
            stationarity_trials: None,
            group_longest_run_trials: None,
            group_run_count_trials: None,
            group_stationarity_trials: None,
            summary_trials: 9,
            detection_alpha: DEFAULT_DETECTION_ALPHA,
        }
    }
}

impl AnalysisConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: AnalysisConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        AnalysisConfig::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("max_marks", self.max_marks),
            ("top_k", self.top_k),
            ("tuned_top_k", self.tuned_top_k),
            ("precincts", self.precincts),
        ];
        if let Some((key, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(Error::Config(format!("`{key}` must be positive")));
        }
        if self.segments < 2 {
            return Err(Error::Config("`segments` must be at least 2".into()));
        }
        let trials = [
            self.longest_run_trials,
            self.run_count_trials,
            self.stationarity_trials,
            self.group_longest_run_trials,
            self.group_run_count_trials,
            self.group_stationarity_trials,
            Some(self.summary_trials),
        ];
        if trials.iter().flatten().any(|&t| t == 0) {
            return Err(Error::Config("trial counts must be positive".into()));
        }
        if !(self.detection_alpha > 0.0 && self.detection_alpha <= 1.0) {
            return Err(Error::Config("`detection_alpha` must be in (0, 1]".into()));
        }
        Ok(())
    }

    pub fn candidate_trials(&self, c: usize) -> RowTrials {
        let d = RowTrials::for_candidates(c, self.precincts);
        RowTrials {
            longest_run: self.longest_run_trials.unwrap_or(d.longest_run),
            run_count: self.run_count_trials.unwrap_or(d.run_count),
            stationarity: self.stationarity_trials.unwrap_or(d.stationarity),
        }
    }

    pub fn group_trials(&self) -> RowTrials {
        let d = RowTrials::for_groups(self.precincts);
        RowTrials {
            longest_run: self.group_longest_run_trials.unwrap_or(d.longest_run),
            run_count: self.group_run_count_trials.unwrap_or(d.run_count),
            stationarity: self.group_stationarity_trials.unwrap_or(d.stationarity),
        }
    }

    pub fn summary_policy(&self) -> SummaryPolicy {
        SummaryPolicy {
            summary_trials: self.summary_trials,
            detection_alpha: self.detection_alpha,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(
            AnalysisConfig::from_toml("").unwrap(),
            AnalysisConfig::default()
        );
    }

    #[test]
    fn derived_trials() {
        let c = AnalysisConfig::from_toml("precincts = 9").unwrap();
        let t = c.candidate_trials(11);
        assert_eq!((t.longest_run, t.run_count, t.stationarity), (198, 99, 99));
        let g = c.group_trials();
        assert_eq!((g.longest_run, g.run_count), (18, 9));
        let c = AnalysisConfig::from_toml("longest_run_trials = 50\nsegments = 6").unwrap();
        assert_eq!(c.candidate_trials(11).longest_run, 50);
        assert_eq!(c.segments, 6);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(AnalysisConfig::from_toml("top_k = 0").is_err());
        assert!(AnalysisConfig::from_toml("segments = 1").is_err());
        assert!(AnalysisConfig::from_toml("summary_trials = 0").is_err());
        assert!(AnalysisConfig::from_toml("colour = 3").is_err());
        assert!(AnalysisConfig::from_toml("detection_alpha = 0.0").is_err());
    }
}
