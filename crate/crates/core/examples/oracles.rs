//! Cross-check the exact engines against brute-force enumeration and
//! seeded Monte Carlo.

use ballot_runs::oracle::{
    enumerate_longest_run_tail, enumerate_run_count_cdf, monte_carlo_tail, TailTarget,
};
use ballot_runs::runstats::{exact_longest_run_alpha, exact_run_count_alpha};
use ballot_runs::BernoulliModel;

fn main() -> ballot_runs::Result<()> {
    let mut worst: f64 = 0.0;
    for n in 1..=14 {
        for p in [0.1, 0.3, 0.5, 0.8] {
            let model = BernoulliModel::new(n, p)?;
            for k in 1..=n {
                let a = exact_longest_run_alpha(&model, k)?.alpha;
                let b = enumerate_longest_run_tail(n, p, k)?.value;
                let c = exact_run_count_alpha(&model, k)?.alpha;
                let d = enumerate_run_count_cdf(n, p, k)?.value;
                worst = worst.max((a - b).abs()).max((c - d).abs());
            }
        }
    }
    println!("largest gap to enumeration over n <= 14: {worst:.2e}");

    let model = BernoulliModel::new(100, 0.5)?;
    let exact = exact_longest_run_alpha(&model, 7)?.alpha;
    let mc = monte_carlo_tail(100, 0.5, TailTarget::LongestRunAtLeast(7), 200_000, 11)?;
    println!(
        "n = 100, p = 0.5, longest >= 7: exact {exact:.5}, sampled {:.5} +/- {:.5}",
        mc.value, mc.stderr
    );
    match monte_carlo_tail(
        577,
        532.0 / 577.0,
        TailTarget::RunCountAtMost(19),
        10_000,
        1,
    ) {
        Err(e) => println!("sampler declines the 218 run count: {e}"),
        Ok(est) => println!("unexpected estimate {}", est.value),
    }
    Ok(())
}
