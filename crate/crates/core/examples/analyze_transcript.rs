//! Analyze a transcript end to end: write it as CSV, read it back and print
//! the significance table.
//!
//! The transcript mimics precinct 218: Anikeeva's votes form one block of
//! 382 and nine shorter ones, with every other ballot marking a single
//! rival.

use ballot_runs::cli::config::AnalysisConfig;
use ballot_runs::cli::ingest::write_transcript;
use ballot_runs::cli::report::{analyze, render_table};
use ballot_runs::Transcript;

fn anikeeva_like() -> ballot_runs::Result<Transcript> {
    let mut runs = vec![(true, 382), (false, 13)];
    for _ in 0..8 {
        runs.extend([(true, 17), (false, 4)]);
    }
    runs.push((true, 14));
    let ballots = runs
        .iter()
        .flat_map(|&(vote, len)| std::iter::repeat_n(vec![if vote { 0 } else { 1 }], len));
    Transcript::from_ballots("218", vec!["Anikeeva".into(), "Other".into()], 5, ballots)
}

fn main() -> ballot_runs::Result<()> {
    let csv = write_transcript(&anikeeva_like()?, Some("2024-09-08"));
    let config = AnalysisConfig {
        top_k: 1,
        tuned_top_k: 2,
        ..AnalysisConfig::default()
    };
    let report = analyze(&csv, "unknown", &config)?;
    print!("{}", render_table(&report));
    for w in &report.warnings {
        println!("warning: {w}");
    }
    Ok(())
}
