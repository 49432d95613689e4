//! Segment stationarity: does the vote rate drift across the count?

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ballot_runs::stationarity::{chi2_statistic, segment_counts, stationarity_alpha};
use ballot_runs::FlagSequence;

fn sample(rng: &mut ChaCha8Rng, n: usize, p: impl Fn(usize) -> f64) -> Vec<bool> {
    (0..n).map(|i| rng.gen::<f64>() < p(i)).collect()
}

fn main() -> ballot_runs::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n = 480;
    let steady = FlagSequence::new("steady", sample(&mut rng, n, |_| 0.35));
    let drifting = FlagSequence::new(
        "drifting",
        sample(&mut rng, n, |i| if i < n / 2 { 0.25 } else { 0.45 }),
    );

    for seq in [&steady, &drifting] {
        let counts = segment_counts(seq, 12)?;
        let x2 = chi2_statistic(&counts)?;
        let sig = stationarity_alpha(seq, 12)?;
        let k: Vec<String> = counts.k.iter().map(|k| format!("{k:.0}")).collect();
        println!("{:<9} ones per segment [{}]", seq.label(), k.join(" "));
        println!(
            "          chi2 = {x2:.2} on 11 dof, alpha = {:.3e}, power {:.1}",
            sig.alpha, sig.power
        );
    }
    Ok(())
}
