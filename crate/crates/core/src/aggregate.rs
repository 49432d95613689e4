//! Per-candidate result rows and precinct-level summaries corrected for the
//! number of tests performed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flagseq::{run_stats, FlagSequence, FlagState, Transcript};
use crate::runstats::{
    exact_longest_run_alpha, exact_run_count_alpha, BernoulliModel, Significance,
};
use crate::stationarity::stationarity_alpha;

/// Threshold below which a combined significance counts as proof of fraud.
pub const DEFAULT_DETECTION_ALPHA: f64 = 1e-9;

/// Number of trials each per-row significance is compared against: a value
/// is suspicious when it falls below `1 / trials`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowTrials {
    pub longest_run: u64,
    pub run_count: u64,
    pub stationarity: u64,
}

impl RowTrials {
    /// Data-driven defaults for `c` candidates over `precincts` precincts.
    pub fn for_candidates(c: usize, precincts: usize) -> Self {
        let t = (c * precincts) as u64;
        RowTrials {
            longest_run: 2 * t,
            run_count: t,
            stationarity: t,
        }
    }

    /// Defaults for group (consolidated) rows: one group per precinct.
    pub fn for_groups(precincts: usize) -> Self {
        RowTrials::for_candidates(1, precincts)
    }
}

/// True iff `value < 1 / trials`.
pub fn suspicion_flags(value: f64, trials: u64) -> bool {
    assert!(trials >= 1, "trial count must be positive");
    value < 1.0 / trials as f64
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuspicionMarks {
    pub alpha0: bool,
    pub alpha1: bool,
    pub alpha_tilde: bool,
    pub alpha_check: bool,
}

impl SuspicionMarks {
    pub fn any(&self) -> bool {
        self.alpha0 || self.alpha1 || self.alpha_tilde || self.alpha_check
    }
}

/// One result row: runs inputs and significances for a flag sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateStats {
    pub candidate: String,
    pub r0: usize,
    pub s0: usize,
    pub alpha0: Significance,
    pub r1: usize,
    pub s1: usize,
    pub alpha1: Significance,
    pub m: usize,
    pub alpha_tilde: Significance,
    /// Stationarity significance; absent when the sequence is shorter than
    /// the segment count or the row was built from counts alone.
    pub alpha_check: Option<Significance>,
    pub suspicious: SuspicionMarks,
}

impl CandidateStats {
    pub fn n(&self) -> usize {
        self.r0 + self.r1
    }

    /// Builds a row from run counts alone, without the stationarity column.
    pub fn from_counts(
        candidate: impl Into<String>,
        (r0, s0): (usize, usize),
        (r1, s1): (usize, usize),
        m: usize,
        trials: &RowTrials,
    ) -> Result<Self> {
        let n = r0 + r1;
        if n == 0 {
            return Err(Error::InsufficientData("row with no ballots".into()));
        }
        if s0 > r0 || s1 > r1 || (s0 == 0) != (r0 == 0) || (s1 == 0) != (r1 == 0) {
            return Err(Error::domain(format!(
                "inconsistent runs: r0={r0} s0={s0} r1={r1} s1={s1}"
            )));
        }
        let p0 = BernoulliModel::new(n, r0 as f64 / n as f64)?;
        let p1 = BernoulliModel::new(n, r1 as f64 / n as f64)?;
        let alpha0 = exact_longest_run_alpha(&p0, s0)?;
        let alpha1 = exact_longest_run_alpha(&p1, s1)?;
        let alpha_tilde = exact_run_count_alpha(&p1, m)?;
        Ok(CandidateStats {
            candidate: candidate.into(),
            r0,
            s0,
            alpha0,
            r1,
            s1,
            alpha1,
            m,
            alpha_tilde,
            alpha_check: None,
            suspicious: SuspicionMarks {
                alpha0: suspicion_flags(alpha0.alpha, trials.longest_run),
                alpha1: suspicion_flags(alpha1.alpha, trials.longest_run),
                alpha_tilde: suspicion_flags(alpha_tilde.alpha, trials.run_count),
                alpha_check: false,
            },
        })
    }

    /// Computes every column for a flag sequence, using `segments` for the
    /// stationarity test.
    pub fn from_flags(seq: &FlagSequence, segments: usize, trials: &RowTrials) -> Result<Self> {
        let stats = run_stats(seq)?;
        let mut row = CandidateStats::from_counts(
            seq.label(),
            (seq.count(FlagState::Zero), stats.s0),
            (seq.count(FlagState::One), stats.s1),
            stats.m,
            trials,
        )?;
        if seq.n() >= segments {
            let check = stationarity_alpha(seq, segments)?;
            row.suspicious.alpha_check = suspicion_flags(check.alpha, trials.stationarity);
            row.alpha_check = Some(check);
        }
        Ok(row)
    }

    /// Smaller of the two longest-run significances.
    pub fn alpha_min(&self) -> f64 {
        self.alpha0.alpha.min(self.alpha1.alpha)
    }
}

/// `(alpha_min, alpha_tilde_min)` over all rows and both flag states.
pub fn min_significances(rows: &[CandidateStats]) -> Result<(f64, f64)> {
    if rows.is_empty() {
        return Err(Error::InsufficientData("no candidate rows".into()));
    }
    Ok(rows.iter().fold((1.0f64, 1.0f64), |(a, t), r| {
        (a.min(r.alpha_min()), t.min(r.alpha_tilde.alpha))
    }))
}

/// `1 - (1 - x)^k`: chance that at least one of `k` independent tests falls
/// at or below `x`. Evaluated through `ln_1p`/`exp_m1`, which stays exact to
/// rounding down to subnormal `x`.
pub fn family_wise(x: f64, k: u32) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("significance {x} outside [0, 1]")));
    }
    if k == 0 {
        return Err(Error::domain("test count must be positive"));
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    Ok((-(k as f64 * (-x).ln_1p()).exp_m1()).clamp(0.0, 1.0))
}

fn test_count(c: usize, factor: usize) -> Result<u32> {
    if c == 0 {
        return Err(Error::domain("candidate count must be positive"));
    }
    u32::try_from(c * factor).map_err(|_| Error::domain("candidate count too large"))
}

/// Longest-run significance corrected for `2c` tests.
pub fn overall_alpha_prime(alpha_min: f64, c: usize) -> Result<f64> {
    family_wise(alpha_min, test_count(c, 2)?)
}

/// Run-count significance corrected for `c` tests.
pub fn overall_alpha_tilde_prime(alpha_tilde_min: f64, c: usize) -> Result<f64> {
    family_wise(alpha_tilde_min, test_count(c, 1)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Neither corrected significance is suspicious.
    NoEvidence,
    /// At least one corrected significance is below the summary threshold.
    Suspicious,
    /// `min(α′, ᾶ′)` is below the detection threshold.
    Detected,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrecinctSummary {
    pub precinct_id: String,
    pub c: usize,
    pub alpha_min: f64,
    pub alpha_tilde_min: f64,
    pub alpha_prime: Significance,
    pub alpha_tilde_prime: Significance,
    pub suspicious_alpha_prime: bool,
    pub suspicious_alpha_tilde_prime: bool,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryPolicy {
    /// Corrected values below `1 / summary_trials` are suspicious.
    pub summary_trials: u64,
    pub detection_alpha: f64,
}

impl Default for SummaryPolicy {
    fn default() -> Self {
        SummaryPolicy {
            summary_trials: 9,
            detection_alpha: DEFAULT_DETECTION_ALPHA,
        }
    }
}

/// Precinct summary from rows alone, for a roster of `c` candidates.
pub fn summarize(
    precinct_id: impl Into<String>,
    c: usize,
    rows: &[CandidateStats],
    policy: &SummaryPolicy,
) -> Result<PrecinctSummary> {
    let (alpha_min, alpha_tilde_min) = min_significances(rows)?;
    let alpha_prime = Significance::new(overall_alpha_prime(alpha_min, c)?)?;
    let alpha_tilde_prime = Significance::new(overall_alpha_tilde_prime(alpha_tilde_min, c)?)?;
    let suspicious_alpha_prime = suspicion_flags(alpha_prime.alpha, policy.summary_trials);
    let suspicious_alpha_tilde_prime =
        suspicion_flags(alpha_tilde_prime.alpha, policy.summary_trials);
    let verdict = if alpha_prime.alpha.min(alpha_tilde_prime.alpha) < policy.detection_alpha {
        Verdict::Detected
    } else if suspicious_alpha_prime || suspicious_alpha_tilde_prime {
        Verdict::Suspicious
    } else {
        Verdict::NoEvidence
    };
    Ok(PrecinctSummary {
        precinct_id: precinct_id.into(),
        c,
        alpha_min,
        alpha_tilde_min,
        alpha_prime,
        alpha_tilde_prime,
        suspicious_alpha_prime,
        suspicious_alpha_tilde_prime,
        verdict,
    })
}

pub fn precinct_summary(
    transcript: &Transcript,
    rows: &[CandidateStats],
    policy: &SummaryPolicy,
) -> Result<PrecinctSummary> {
    if rows.len() != transcript.c() {
        return Err(Error::InsufficientData(format!(
            "{} rows for {} candidates",
            rows.len(),
            transcript.c()
        )));
    }
    summarize(transcript.precinct_id(), transcript.c(), rows, policy)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trials() -> RowTrials {
        RowTrials::for_candidates(11, 9)
    }

    #[test]
    fn suspicion_thresholds() {
        assert!(suspicion_flags(0.004, 198));
        assert!(suspicion_flags(0.01, 99));
        assert!(!suspicion_flags(0.2, 9));
        assert!(!suspicion_flags(1.0 / 9.0, 9));
        assert_eq!(trials().longest_run, 198);
        assert_eq!(trials().run_count, 99);
    }

    #[test]
    fn corrections() {
        let a = overall_alpha_prime(1e-20, 11).unwrap();
        assert!((a - 2.2e-19).abs() / 2.2e-19 < 1e-12);
        assert_eq!(overall_alpha_prime(1.0, 11).unwrap(), 1.0);
        assert!((overall_alpha_prime(0.5, 1).unwrap() - 0.75).abs() < 1e-15);
        assert_eq!(overall_alpha_tilde_prime(1.0, 11).unwrap(), 1.0);
        assert!((overall_alpha_tilde_prime(0.1, 2).unwrap() - 0.19).abs() < 1e-15);
        assert!(overall_alpha_prime(1.2, 3).is_err());
        assert!(overall_alpha_prime(0.1, 0).is_err());
    }

    #[test]
    fn precinct_214_run_count_correction() {
        let t = 10f64.powf(-19.4);
        let p = -overall_alpha_tilde_prime(t, 11).unwrap().log10();
        assert!((p - 18.4).abs() < 0.05, "{p}");
    }

    #[test]
    fn minima_over_rows() {
        let rows = vec![
            CandidateStats::from_counts("A", (30, 10), (20, 5), 20, &trials()).unwrap(),
            CandidateStats::from_counts("B", (45, 40), (5, 1), 7, &trials()).unwrap(),
        ];
        let (a, t) = min_significances(&rows).unwrap();
        let expect_a = rows.iter().map(|r| r.alpha_min()).fold(1.0, f64::min);
        let expect_t = rows.iter().map(|r| r.alpha_tilde.alpha).fold(1.0, f64::min);
        assert_eq!((a, t), (expect_a, expect_t));
        let single = min_significances(&rows[..1]).unwrap();
        assert_eq!(single, (rows[0].alpha_min(), rows[0].alpha_tilde.alpha));
        assert!(min_significances(&[]).is_err());
    }

    #[test]
    fn honest_rows_give_unit_primes() {
        // constant sequences: every significance is 1
        let row = CandidateStats::from_counts("A", (0, 0), (10, 10), 1, &trials()).unwrap();
        assert_eq!(row.alpha0.alpha, 1.0);
        assert_eq!(row.alpha1.alpha, 1.0);
        assert_eq!(row.alpha_tilde.alpha, 1.0);
        assert_eq!(
            min_significances(std::slice::from_ref(&row)).unwrap(),
            (1.0, 1.0)
        );
        let s = summarize(
            "x",
            3,
            &[row.clone(), row.clone(), row],
            &SummaryPolicy::default(),
        )
        .unwrap();
        assert_eq!(s.alpha_prime.alpha, 1.0);
        assert_eq!(s.alpha_tilde_prime.alpha, 1.0);
        assert!(!s.suspicious_alpha_prime && !s.suspicious_alpha_tilde_prime);
        assert_eq!(s.verdict, Verdict::NoEvidence);
    }

    #[test]
    fn inconsistent_counts_rejected() {
        assert!(CandidateStats::from_counts("A", (3, 4), (2, 1), 2, &trials()).is_err());
        assert!(CandidateStats::from_counts("A", (3, 0), (2, 1), 2, &trials()).is_err());
        assert!(CandidateStats::from_counts("A", (0, 0), (0, 0), 1, &trials()).is_err());
    }

    #[test]
    fn family_wise_agrees_with_linear_for_tiny_values() {
        for k in 1..=22u32 {
            for e in 8..=16 {
                let x = 10f64.powi(-e);
                let exact = family_wise(x, k).unwrap();
                let linear = k as f64 * x;
                let bound = (k as f64 - 1.0) * x / 2.0 + 1e-14;
                assert!((exact - linear).abs() / exact <= bound, "k={k} x={x}");
            }
        }
    }
}
