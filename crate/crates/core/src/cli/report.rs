//! Full analysis of one transcript and its report document.
//!
//! The report is JSON. Every significance keeps its unrounded `alpha` and
//! `power` next to the one-decimal `display` string shown in tables.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::aggregate::{summarize, CandidateStats, PrecinctSummary, RowTrials, Verdict};
use crate::cli::config::AnalysisConfig;
use crate::cli::ingest::{read_transcript, IngestedTranscript};
use crate::error::{Error, Result};
use crate::flagseq::{
    candidate_flags, consolidated_flags, rank_candidates, tuned_flags, GroupFlags, Transcript,
};
use crate::runstats::Significance;
use crate::stationarity::{segments_are_sparse, MIN_FLAGS_PER_SEGMENT};

/// Rounds a power to one decimal, halves up.
pub fn display_power(power: f64) -> String {
    if power.is_infinite() {
        "inf".into()
    } else {
        format!("{:.1}", (power * 10.0).round() / 10.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerValue {
    pub alpha: f64,
    #[serde(with = "crate::serde_inf")]
    pub power: f64,
    pub display: String,
    pub suspicious: bool,
}

impl PowerValue {
    pub fn new(sig: Significance, suspicious: bool) -> Self {
        PowerValue {
            alpha: sig.alpha,
            power: sig.power,
            display: display_power(sig.power),
            suspicious,
        }
    }

    fn cell(&self) -> String {
        if self.suspicious {
            format!("{}*", self.display)
        } else {
            self.display.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub label: String,
    pub r0: usize,
    pub s0: usize,
    pub p_alpha0: PowerValue,
    pub r1: usize,
    pub s1: usize,
    pub p_alpha1: PowerValue,
    pub m: usize,
    pub p_alpha_tilde: PowerValue,
    pub p_alpha_check: Option<PowerValue>,
}

impl From<&CandidateStats> for ReportRow {
    fn from(s: &CandidateStats) -> Self {
        ReportRow {
            label: s.candidate.clone(),
            r0: s.r0,
            s0: s.s0,
            p_alpha0: PowerValue::new(s.alpha0, s.suspicious.alpha0),
            r1: s.r1,
            s1: s.s1,
            p_alpha1: PowerValue::new(s.alpha1, s.suspicious.alpha1),
            m: s.m,
            p_alpha_tilde: PowerValue::new(s.alpha_tilde, s.suspicious.alpha_tilde),
            p_alpha_check: s
                .alpha_check
                .map(|c| PowerValue::new(c, s.suspicious.alpha_check)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupReport {
    pub top_k: usize,
    pub leaders: Vec<String>,
    pub tie_at_cut: bool,
    pub row: ReportRow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryReport {
    pub alpha_min: f64,
    pub alpha_tilde_min: f64,
    pub p_alpha_prime: PowerValue,
    pub p_alpha_tilde_prime: PowerValue,
    pub verdict: Verdict,
}

impl From<&PrecinctSummary> for SummaryReport {
    fn from(s: &PrecinctSummary) -> Self {
        SummaryReport {
            alpha_min: s.alpha_min,
            alpha_tilde_min: s.alpha_tilde_min,
            p_alpha_prime: PowerValue::new(s.alpha_prime, s.suspicious_alpha_prime),
            p_alpha_tilde_prime: PowerValue::new(
                s.alpha_tilde_prime,
                s.suspicious_alpha_tilde_prime,
            ),
            verdict: s.verdict,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub precinct_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub date: Option<String>,
    pub n: usize,
    pub c: usize,
    pub invalid_ballots: usize,
    pub candidates: Vec<ReportRow>,
    pub consolidated: Option<GroupReport>,
    pub tuned: Option<GroupReport>,
    pub summary: SummaryReport,
    pub warnings: Vec<String>,
}

impl ReportFile {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))
    }
}

/// Everything computed for one transcript, before conversion to a report.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub rows: Vec<CandidateStats>,
    pub consolidated: Option<(GroupFlags, CandidateStats)>,
    pub tuned: Option<(GroupFlags, CandidateStats)>,
    pub summary: PrecinctSummary,
    pub warnings: Vec<String>,
}

fn group_row(
    transcript: &Transcript,
    top_k: usize,
    rule: fn(&Transcript, usize) -> Result<GroupFlags>,
    name: &str,
    config: &AnalysisConfig,
    trials: &RowTrials,
    warnings: &mut Vec<String>,
) -> Result<Option<(GroupFlags, CandidateStats)>> {
    if top_k > transcript.c() {
        warnings.push(format!(
            "{name} test skipped: top {top_k} exceeds {} candidates",
            transcript.c()
        ));
        return Ok(None);
    }
    let group = rule(transcript, top_k)?;
    if group.leaders.tie_at_cut {
        warnings.push(format!(
            "{name} test: vote tie at the top-{top_k} cut, resolved by roster order"
        ));
    }
    let stats = CandidateStats::from_flags(&group.flags, config.segments, trials)?;
    Ok(Some((group, stats)))
}

pub fn analyze_transcript(transcript: &Transcript, config: &AnalysisConfig) -> Result<Analysis> {
    config.validate()?;
    rank_candidates(transcript)?;
    let mut warnings = Vec::new();
    if transcript.n() < config.segments {
        warnings.push(format!(
            "stationarity test skipped: {} ballots for {} segments",
            transcript.n(),
            config.segments
        ));
    } else if segments_are_sparse(transcript.n(), config.segments) {
        warnings.push(format!(
            "stationarity test: fewer than {MIN_FLAGS_PER_SEGMENT} ballots per segment"
        ));
    }
    let trials = config.candidate_trials(transcript.c());
    let rows = transcript
        .candidates()
        .iter()
        .map(|label| {
            let seq = candidate_flags(transcript, label)?;
            CandidateStats::from_flags(&seq, config.segments, &trials)
        })
        .collect::<Result<Vec<_>>>()?;
    let group_trials = config.group_trials();
    let consolidated = group_row(
        transcript,
        config.top_k,
        consolidated_flags,
        "consolidated",
        config,
        &group_trials,
        &mut warnings,
    )?;
    let tuned = group_row(
        transcript,
        config.tuned_top_k,
        tuned_flags,
        "tuned",
        config,
        &group_trials,
        &mut warnings,
    )?;
    let summary = summarize(
        transcript.precinct_id(),
        transcript.c(),
        &rows,
        &config.summary_policy(),
    )?;
    Ok(Analysis {
        rows,
        consolidated,
        tuned,
        summary,
        warnings,
    })
}

fn group_report(group: &Option<(GroupFlags, CandidateStats)>, top_k: usize) -> Option<GroupReport> {
    group.as_ref().map(|(g, stats)| GroupReport {
        top_k,
        leaders: g.leaders.labels.clone(),
        tie_at_cut: g.leaders.tie_at_cut,
        row: stats.into(),
    })
}

pub fn build_report(
    transcript: &Transcript,
    date: Option<String>,
    analysis: &Analysis,
    config: &AnalysisConfig,
) -> ReportFile {
    ReportFile {
        precinct_id: transcript.precinct_id().to_string(),
        date,
        n: transcript.n(),
        c: transcript.c(),
        invalid_ballots: transcript.invalid_count(),
        candidates: analysis.rows.iter().map(ReportRow::from).collect(),
        consolidated: group_report(&analysis.consolidated, config.top_k),
        tuned: group_report(&analysis.tuned, config.tuned_top_k),
        summary: (&analysis.summary).into(),
        warnings: analysis.warnings.clone(),
    }
}

pub fn analyze_ingested(
    ingested: &IngestedTranscript,
    config: &AnalysisConfig,
) -> Result<ReportFile> {
    let analysis = analyze_transcript(&ingested.transcript, config)?;
    let mut report = build_report(
        &ingested.transcript,
        ingested.date.clone(),
        &analysis,
        config,
    );
    if !ingested.invalid_rows.is_empty() {
        let lines: Vec<String> = ingested
            .invalid_rows
            .iter()
            .map(|l| l.to_string())
            .collect();
        report.warnings.insert(
            0,
            format!("invalid ballots excluded at lines {}", lines.join(", ")),
        );
    }
    Ok(report)
}

/// Parses transcript CSV text and analyzes it.
pub fn analyze(text: &str, default_precinct: &str, config: &AnalysisConfig) -> Result<ReportFile> {
    let ingested = read_transcript(text, default_precinct, config.max_marks)?;
    analyze_ingested(&ingested, config)
}

fn push_row(out: &mut String, label: &str, width: usize, row: &ReportRow) {
    let check = row
        .p_alpha_check
        .as_ref()
        .map_or_else(|| "-".to_string(), PowerValue::cell);
    let _ = writeln!(
        out,
        "{label:<width$} {:>5} {:>5} {:>6} {:>5} {:>5} {:>6} {:>5} {:>6} {:>6}",
        row.r0,
        row.s0,
        row.p_alpha0.cell(),
        row.r1,
        row.s1,
        row.p_alpha1.cell(),
        row.m,
        row.p_alpha_tilde.cell(),
        check,
    );
}

/// Plain-text table; `*` marks suspicious values.
pub fn render_table(report: &ReportFile) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "Precinct {}: n = {} valid ballots ({} invalid), c = {}",
        report.precinct_id, report.n, report.invalid_ballots, report.c
    );
    let width = report
        .candidates
        .iter()
        .map(|r| r.label.chars().count())
        .chain([14])
        .max()
        .unwrap_or(14);
    let _ = writeln!(
        out,
        "{:<width$} {:>5} {:>5} {:>6} {:>5} {:>5} {:>6} {:>5} {:>6} {:>6}",
        "candidate", "r0", "s0", "pα0", "r1", "s1", "pα1", "m", "pᾶ", "pα̌"
    );
    for row in &report.candidates {
        push_row(&mut out, &row.label, width, row);
    }
    for (name, group) in [
        ("consolidated", &report.consolidated),
        ("tuned", &report.tuned),
    ] {
        if let Some(g) = group {
            push_row(&mut out, &format!("[{name}]"), width, &g.row);
        }
    }
    let s = &report.summary;
    let _ = writeln!(
        out,
        "summary: pα′ = {}, pᾶ′ = {}, verdict: {:?}",
        s.p_alpha_prime.cell(),
        s.p_alpha_tilde_prime.cell(),
        s.verdict
    );
    for g in [&report.consolidated, &report.tuned].into_iter().flatten() {
        let _ = writeln!(out, "top {} leaders: {}", g.top_k, g.leaders.join(", "));
    }
    for w in &report.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_rounds_half_up() {
        assert_eq!(display_power(12.25), "12.3");
        assert_eq!(display_power(0.04), "0.0");
        assert_eq!(display_power(9.96), "10.0");
        assert_eq!(display_power(f64::INFINITY), "inf");
    }

    #[test]
    fn small_transcript_report() {
        let text = "A,B,C,D,E,F\n1,1,1,1,1,0\n1,0,0,0,0,1\n0,1,1,0,0,0\n1,1,1,1,1,0\n";
        let report = analyze(text, "toy", &AnalysisConfig::default()).unwrap();
        assert_eq!(report.n, 4);
        assert_eq!(report.candidates.len(), 6);
        assert_eq!(report.consolidated.as_ref().unwrap().row.r1, 2);
        assert!(report.warnings.iter().any(|w| w.contains("stationarity")));
        let table = render_table(&report);
        assert!(table.contains("[consolidated]"));
        assert_eq!(ReportFile::from_json(&report.to_json()).unwrap(), report);
    }

    #[test]
    fn empty_transcript_errors() {
        assert!(matches!(
            analyze("A,B\n", "x", &AnalysisConfig::default()),
            Err(Error::InsufficientData(_))
        ));
    }
}
