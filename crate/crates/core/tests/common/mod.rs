#![allow(dead_code)]

use ballot_runs::synth::{BatchSpec, CandidateSpec, FraudScenario};
use ballot_runs::Transcript;

/// Eleven candidates, five leaders at 0.3 and six others at 0.15, 400
/// honest ballots; with `batch`, 50 ballots marking exactly the leaders are
/// inserted at a random position.
pub fn stuffing_scenario(batch: bool) -> FraudScenario {
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
        seed: 0,
    }
}

/// Two-candidate transcript whose first column has the run structure of
/// Anikeeva at precinct 218: 532 votes of 577, longest block 382, 19 runs.
pub fn anikeeva_transcript() -> Transcript {
    let mut runs = vec![(true, 382), (false, 13)];
    for _ in 0..8 {
        runs.extend([(true, 17), (false, 4)]);
    }
    runs.push((true, 14));
    let ballots = runs
        .iter()
        .flat_map(|&(vote, len)| std::iter::repeat_n(vec![if vote { 0 } else { 1 }], len));
    Transcript::from_ballots("218", vec!["Anikeeva".into(), "Other".into()], 5, ballots).unwrap()
}

/// Runs `f` over `0..count` on all available cores, keeping index order.
pub fn par_map<T: Send>(count: u64, f: impl Fn(u64) -> T + Sync) -> Vec<T> {
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()) as u64;
    let per = count.div_ceil(threads.max(1)).max(1);
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..count)
            .step_by(per as usize)
            .map(|start| {
                let f = &f;
                scope.spawn(move || (start..(start + per).min(count)).map(f).collect::<Vec<_>>())
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().unwrap())
            .collect()
    })
}
