//! Detection rate of a stuffed batch, and the false-positive rate of the
//! same electorate without it.
//!
//! Usage: `cargo run --release --example simulate_fraud [-- TRIALS]`

use ballot_runs::cli::config::AnalysisConfig;
use ballot_runs::cli::simulate::{simulate, SimulationSpec};
use ballot_runs::synth::{BatchSpec, CandidateSpec, FraudScenario};

fn scenario(batch: bool) -> FraudScenario {
    let candidates: Vec<CandidateSpec> = (0..11)
        .map(|i| CandidateSpec {
            label: format!("C{i:02}"),
            probability: if i < 5 { 0.3 } else { 0.15 },
        })
        .collect();
    let pattern = candidates[..5].iter().map(|c| c.label.clone()).collect();
    FraudScenario {
        precinct_id: "sim".into(),
        candidates,
        n_honest: 400,
        max_marks: 5,
        slate: None,
        batch: batch.then_some(BatchSpec {
            pattern,
            size: 50,
            position: None,
        }),
        mixing_chunk: 0,
        seed: 1_000,
    }
}

fn main() -> ballot_runs::Result<()> {
    let trials = std::env::args()
        .nth(1)
        .and_then(|t| t.parse().ok())
        .unwrap_or(100);
    for (name, batch) in [("stuffed", true), ("honest", false)] {
        let spec = SimulationSpec {
            trials,
            thresholds: vec![9, 18, 99, 198],
            analysis: AnalysisConfig::default(),
            scenario: scenario(batch),
        };
        let report = simulate(&spec)?;
        println!("== {name} ==");
        print!("{}", report.render());
        println!(
            "either corrected value below 1/9: {:.3}\n",
            report.either_prime_rate(9)
        );
    }
    Ok(())
}
