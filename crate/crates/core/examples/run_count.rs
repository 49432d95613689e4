//! Too few runs: a sequence that switches state less often than chance
//! would suggest.

use ballot_runs::runstats::{
    exact_run_count_alpha, gaussian_run_count_approx, run_count_distribution, run_count_moments,
};
use ballot_runs::BernoulliModel;

fn main() -> ballot_runs::Result<()> {
    let model = BernoulliModel::new(577, 532.0 / 577.0)?;
    let moments = run_count_moments(&model)?;
    println!(
        "expected runs {:.2}, sd {:.2}",
        moments.mean,
        moments.variance.sqrt()
    );
    for m in [19, 40, 60, 75] {
        let exact = exact_run_count_alpha(&model, m)?;
        let approx = gaussian_run_count_approx(&model, m)?;
        println!(
            "m = {m:>2}: exact {:.3e} (power {:>5.1})   normal approx {approx:.3e}",
            exact.alpha, exact.power
        );
    }

    let small = BernoulliModel::new(30, 0.4)?;
    let v = run_count_distribution(&small);
    let total: f64 = v.iter().sum();
    println!("\nn = 30, p = 0.4: run count distribution sums to {total:.15}");
    Ok(())
}
