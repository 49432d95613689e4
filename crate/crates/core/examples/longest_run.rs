//! Significance of a long run of identical flags.
//!
//! Anikeeva at precinct 218 received 532 votes out of 577, with an unbroken
//! block of 382 consecutive ballots marking her.

use ballot_runs::runstats::{
    exact_longest_run_alpha, longest_run_alpha_from_distribution, longest_run_distribution,
    quick_bound_alpha,
};
use ballot_runs::BernoulliModel;

fn main() -> ballot_runs::Result<()> {
    let (n, r1, s1) = (577, 532, 382);
    let model = BernoulliModel::new(n, r1 as f64 / n as f64)?;
    let exact = exact_longest_run_alpha(&model, s1)?;
    let bound = quick_bound_alpha(&model, s1)?;
    println!("n = {n}, p = {:.4}, longest run {s1}", model.p());
    println!(
        "exact alpha   {:.4e}  (power {:.1})",
        exact.alpha, exact.power
    );
    println!("quick bound   {bound:.4e}  (power {:.1})", -bound.log10());

    // a small case through the full distribution
    let small = BernoulliModel::new(60, 0.5)?;
    let dist = longest_run_distribution(&small);
    let mode = (0..dist.len())
        .max_by(|&a, &b| dist[a].total_cmp(&dist[b]))
        .unwrap();
    println!("\nn = 60, p = 0.5: most likely longest run is {mode}");
    for s in [6, 8, 10, 12] {
        let a = longest_run_alpha_from_distribution(&dist, s)?;
        let b = exact_longest_run_alpha(&small, s)?;
        println!(
            "  P(longest >= {s:>2}) = {:.6}  (absorbing form {:.6})",
            a.alpha, b.alpha
        );
    }
    Ok(())
}
