//! Render a synthetic transcript with a stuffed batch as an SVG grid.
//!
//! Usage: `cargo run --example plot_transcript [-- OUT.svg]`

use ballot_runs::cli::plot::plot_svg;
use ballot_runs::synth::{BatchSpec, CandidateSpec, FraudScenario};

fn main() -> ballot_runs::Result<()> {
    let labels = ["Ash", "Birch", "Cedar", "Elm", "Fir", "Hazel", "Larch"];
    let scenario = FraudScenario {
        precinct_id: "demo".into(),
        candidates: labels
            .iter()
            .zip([0.35, 0.3, 0.3, 0.25, 0.25, 0.15, 0.1])
            .map(|(l, p)| CandidateSpec {
                label: l.to_string(),
                probability: p,
            })
            .collect(),
        n_honest: 300,
        max_marks: 5,
        slate: None,
        batch: Some(BatchSpec {
            pattern: labels[..5].iter().map(|s| s.to_string()).collect(),
            size: 40,
            position: Some(120),
        }),
        mixing_chunk: 0,
        seed: 3,
    };
    let transcript = scenario.generate(scenario.seed)?;
    let svg = plot_svg(&transcript, 5, 6)?;
    let out = std::env::args().nth(1).unwrap_or_else(|| {
        std::env::temp_dir()
            .join("ballot-grid.svg")
            .display()
            .to_string()
    });
    std::fs::write(&out, &svg)?;
    println!(
        "{} ballots, {} bytes of SVG written to {out}",
        transcript.n(),
        svg.len()
    );
    Ok(())
}
