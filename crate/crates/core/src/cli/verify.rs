//! Recomputes the published per-candidate, group and precinct powers from
//! their integer inputs and compares them with the printed values.
//!
//! The printed stationarity powers (`p_alpha_check`) are carried in the data
//! files but not checked: they need the raw ballot order, which only the
//! run summaries describe.

use std::fmt::Write as _;

use serde::Deserialize;

use crate::aggregate::{
    min_significances, overall_alpha_prime, overall_alpha_tilde_prime, CandidateStats, RowTrials,
};
use crate::error::{Error, Result};

const CANDIDATES_CSV: &str = include_str!("../../data/candidates.csv");
const GROUPS_CSV: &str = include_str!("../../data/groups.csv");
const PRECINCTS_CSV: &str = include_str!("../../data/precincts.csv");

/// Printed powers carry one decimal.
pub const TABLE_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct PublishedRow {
    pub precinct: u32,
    #[serde(alias = "rule", alias = "candidate")]
    pub label: String,
    #[serde(default)]
    pub party: Option<String>,
    pub r0: usize,
    pub s0: usize,
    pub p_alpha0: f64,
    pub r1: usize,
    pub s1: usize,
    pub p_alpha1: f64,
    pub m: usize,
    pub p_alpha_tilde: f64,
    pub p_alpha_check: f64,
}

impl PublishedRow {
    pub fn n(&self) -> usize {
        self.r0 + self.r1
    }

    pub fn stats(&self, trials: &RowTrials) -> Result<CandidateStats> {
        CandidateStats::from_counts(
            self.label.clone(),
            (self.r0, self.s0),
            (self.r1, self.s1),
            self.m,
            trials,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct PublishedPrecinct {
    pub precinct: u32,
    pub district: u32,
    pub c: usize,
    pub n: usize,
    pub mixing: String,
    pub p_alpha_prime: f64,
    pub p_alpha_tilde_prime: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PublishedDataset {
    pub candidates: Vec<PublishedRow>,
    pub consolidated: Vec<PublishedRow>,
    pub tuned: Vec<PublishedRow>,
    pub precincts: Vec<PublishedPrecinct>,
}

fn parse_csv<T: for<'de> Deserialize<'de>>(text: &str) -> Result<Vec<T>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    reader
        .deserialize()
        .map(|r| {
            r.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line() as usize);
                Error::parse(line, e.to_string())
            })
        })
        .collect()
}

impl PublishedDataset {
    /// The dataset shipped in `data/`.
    pub fn embedded() -> Self {
        PublishedDataset::parse(CANDIDATES_CSV, GROUPS_CSV, PRECINCTS_CSV)
            .expect("embedded tables parse")
    }

    pub fn parse(candidates: &str, groups: &str, precincts: &str) -> Result<Self> {
        let candidates: Vec<PublishedRow> = parse_csv(candidates)?;
        let groups: Vec<PublishedRow> = parse_csv(groups)?;
        let (consolidated, tuned): (Vec<_>, Vec<_>) =
            groups.into_iter().partition(|g| g.label == "consolidated");
        if let Some(bad) = tuned.iter().find(|g| g.label != "tuned") {
            return Err(Error::Config(format!("unknown group rule `{}`", bad.label)));
        }
        Ok(PublishedDataset {
            candidates,
            consolidated,
            tuned,
            precincts: parse_csv(precincts)?,
        })
    }

    pub fn precinct_rows(&self, precinct: u32) -> impl Iterator<Item = &PublishedRow> {
        self.candidates
            .iter()
            .filter(move |r| r.precinct == precinct)
    }

    pub fn group_row(&self, rule: &str, precinct: u32) -> Option<&PublishedRow> {
        let rows = match rule {
            "consolidated" => &self.consolidated,
            "tuned" => &self.tuned,
            _ => return None,
        };
        rows.iter().find(|r| r.precinct == precinct)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub item: String,
    pub printed: String,
    pub computed: String,
    pub pass: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    fn power(&mut self, item: String, printed: f64, computed: f64) {
        self.checks.push(Check {
            item,
            printed: format!("{printed:.1}"),
            computed: format!("{computed:.3}"),
            pass: (computed - printed).abs() <= TABLE_TOLERANCE + 1e-9,
        });
    }

    /// `printed` is a value quoted with two significant digits, so the
    /// computed one must fall within half a unit of the last digit.
    fn scientific(&mut self, item: String, printed: f64, computed: f64) {
        let half_unit = 0.5 * 10f64.powf(printed.abs().log10().floor() - 1.0);
        self.checks.push(Check {
            item,
            printed: format!("{printed:.1e}"),
            computed: format!("{computed:.3e}"),
            pass: (computed - printed).abs() <= half_unit * (1.0 + 1e-9),
        });
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = if c.pass { "ok  " } else { "FAIL" };
            let _ = writeln!(
                out,
                "{status} {:<44} printed {:>9} computed {:>11}",
                c.item, c.printed, c.computed
            );
        }
        let failed = self.failures().count();
        let _ = writeln!(
            out,
            "{} checks, {} failed (stationarity powers are not checked: they need raw ballot order)",
            self.checks.len(),
            failed
        );
        out
    }
}

fn check_row(
    report: &mut VerificationReport,
    prefix: &str,
    row: &PublishedRow,
) -> Result<CandidateStats> {
    // trial counts only affect suspicion marks, which are not compared
    let stats = row.stats(&RowTrials::for_candidates(1, 1))?;
    report.power(format!("{prefix} pα0"), row.p_alpha0, stats.alpha0.power);
    report.power(format!("{prefix} pα1"), row.p_alpha1, stats.alpha1.power);
    report.power(
        format!("{prefix} pᾶ"),
        row.p_alpha_tilde,
        stats.alpha_tilde.power,
    );
    Ok(stats)
}

pub fn verify_dataset(data: &PublishedDataset) -> Result<VerificationReport> {
    let mut report = VerificationReport::default();
    for precinct in &data.precincts {
        let mut rows = Vec::new();
        for row in data.precinct_rows(precinct.precinct) {
            if row.n() != precinct.n {
                return Err(Error::domain(format!(
                    "{} at {} has n = {}, precinct has {}",
                    row.label,
                    precinct.precinct,
                    row.n(),
                    precinct.n
                )));
            }
            rows.push(check_row(
                &mut report,
                &format!("{} {}", precinct.precinct, row.label),
                row,
            )?);
        }
        if rows.len() != precinct.c {
            return Err(Error::InsufficientData(format!(
                "precinct {} has {} rows for {} candidates",
                precinct.precinct,
                rows.len(),
                precinct.c
            )));
        }
        let (alpha_min, alpha_tilde_min) = min_significances(&rows)?;
        let prime = overall_alpha_prime(alpha_min, precinct.c)?;
        let tilde_prime = overall_alpha_tilde_prime(alpha_tilde_min, precinct.c)?;
        report.power(
            format!("{} pα′", precinct.precinct),
            precinct.p_alpha_prime,
            -prime.log10(),
        );
        report.power(
            format!("{} pᾶ′", precinct.precinct),
            precinct.p_alpha_tilde_prime,
            -tilde_prime.log10(),
        );
        if precinct.precinct == 219 {
            report.scientific("219 α′".into(), 2.2e-19, prime);
        }
        if precinct.precinct == 215 {
            report.scientific("215 ᾶ′".into(), 6.2e-3, tilde_prime);
        }
    }
    for (rule, rows) in [("consolidated", &data.consolidated), ("tuned", &data.tuned)] {
        for row in rows {
            let stats = check_row(&mut report, &format!("{} {rule}", row.precinct), row)?;
            match (rule, row.precinct) {
                ("consolidated", 217) => report.scientific(
                    "217 consolidated ᾶ".into(),
                    5.9e-15,
                    stats.alpha_tilde.alpha,
                ),
                ("tuned", 212) => {
                    report.scientific("212 tuned ᾶ".into(), 6.2e-5, stats.alpha_tilde.alpha)
                }
                _ => {}
            }
        }
    }
    Ok(report)
}

/// Checks the embedded dataset.
pub fn verify_tables() -> Result<VerificationReport> {
    verify_dataset(&PublishedDataset::embedded())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_dataset_shape() {
        let d = PublishedDataset::embedded();
        assert_eq!(d.candidates.len(), 99);
        assert_eq!(d.consolidated.len(), 9);
        assert_eq!(d.tuned.len(), 9);
        assert_eq!(d.precincts.len(), 9);
        for p in &d.precincts {
            assert!(d.precinct_rows(p.precinct).all(|r| r.n() == p.n));
            assert_eq!(d.group_row("consolidated", p.precinct).unwrap().n(), p.n);
            assert_eq!(d.group_row("tuned", p.precinct).unwrap().n(), p.n);
        }
    }

    #[test]
    fn scientific_tolerance() {
        let mut r = VerificationReport::default();
        r.scientific("a".into(), 5.9e-15, 5.93e-15);
        r.scientific("b".into(), 5.9e-15, 5.96e-15);
        assert!(r.checks[0].pass);
        assert!(!r.checks[1].pass);
    }
}
