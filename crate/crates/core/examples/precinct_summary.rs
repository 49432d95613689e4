//! Per-candidate rows from run summaries, combined into a precinct verdict
//! with the multiple-testing correction.

use ballot_runs::aggregate::{summarize, CandidateStats, RowTrials, SummaryPolicy};

fn main() -> ballot_runs::Result<()> {
    // (label, (r0, s0), (r1, s1), m) for the eleven 218 candidates
    let inputs = [
        ("Anikeeva", (45, 13), (532, 382), 19),
        ("Afonin", (547, 385), (30, 5), 31),
        ("Bulkina", (37, 5), (540, 383), 31),
        ("Vasilyeva", (43, 8), (534, 383), 29),
        ("Zelenchenko", (40, 11), (537, 382), 25),
        ("Mazirko", (32, 5), (545, 385), 27),
        ("Razina", (555, 386), (22, 3), 35),
        ("Sbornov", (571, 392), (6, 2), 11),
        ("Silivanova", (556, 385), (21, 3), 31),
        ("Ushakov", (558, 386), (19, 3), 27),
        ("Fedotov", (557, 386), (20, 3), 27),
    ];
    let trials = RowTrials::for_candidates(inputs.len(), 1);
    let rows = inputs
        .iter()
        .map(|&(label, zeros, ones, m)| CandidateStats::from_counts(label, zeros, ones, m, &trials))
        .collect::<ballot_runs::Result<Vec<_>>>()?;
    for r in &rows {
        println!(
            "{:<11} power0 {:>5.1}  power1 {:>5.1}  run-count power {:>5.1}",
            r.candidate, r.alpha0.power, r.alpha1.power, r.alpha_tilde.power
        );
    }
    let summary = summarize("218", rows.len(), &rows, &SummaryPolicy::default())?;
    println!(
        "corrected: alpha' = {:.2e}, alpha~' = {:.2e}, verdict {:?}",
        summary.alpha_prime.alpha, summary.alpha_tilde_prime.alpha, summary.verdict
    );
    Ok(())
}
