//! Exact and approximate significances of run statistics under an IID
//! Bernoulli model of the flag sequence.
//!
//! Two statistics are covered:
//!
//! * the length of the longest run of a tracked flag state, whose upper tail
//!   probability is the significance `α` of an anomalously long series;
//! * the total number of maximal runs, whose lower tail probability is the
//!   significance `ᾶ` of anomalously few toggles.
//!
//! All tails are accumulated as sums of nonnegative terms, so significances
//! far below machine epsilon keep their relative precision.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flagseq::{FlagSequence, FlagState};

/// `n` independent flags, each equal to the tracked state with probability `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BernoulliModel {
    n: usize,
    p: f64,
    q: f64,
}

impl BernoulliModel {
    pub fn new(n: usize, p: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("model length must be positive"));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain(format!("probability {p} outside [0, 1]")));
        }
        Ok(BernoulliModel { n, p, q: 1.0 - p })
    }

    /// Plug-in model for `state`: `p = r_state / n`.
    pub fn fit(seq: &FlagSequence, state: FlagState) -> Result<Self> {
        if seq.n() == 0 {
            return Err(Error::InsufficientData("empty flag sequence".into()));
        }
        BernoulliModel::new(seq.n(), seq.frequency(state))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Mean toggle rate `2pq` between adjacent flags.
    pub fn toggle_rate(&self) -> f64 {
        2.0 * self.p * self.q
    }
}

/// A tail probability together with its power `-log10(alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Significance {
    pub alpha: f64,
    #[serde(with = "crate::serde_inf")]
    pub power: f64,
}

impl Significance {
    pub fn new(alpha: f64) -> Result<Self> {
        Ok(Significance {
            alpha,
            power: power(alpha)?,
        })
    }

    /// Clamps tiny excursions above 1 produced by rounding.
    pub(crate) fn from_sum(alpha: f64) -> Result<Self> {
        Significance::new(alpha.clamp(0.0, 1.0))
    }

    pub fn certain() -> Self {
        Significance {
            alpha: 1.0,
            power: 0.0,
        }
    }
}

/// `-log10(alpha)`, infinite at zero.
pub fn power(alpha: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::domain(format!(
            "significance {alpha} outside [0, 1]"
        )));
    }
    if alpha == 0.0 {
        Ok(f64::INFINITY)
    } else if alpha == 1.0 {
        Ok(0.0)
    } else {
        Ok(-alpha.log10())
    }
}

fn check_run_length(model: &BernoulliModel, s: usize) -> Result<()> {
    if s > model.n {
        return Err(Error::domain(format!(
            "run length {s} exceeds sequence length {}",
            model.n
        )));
    }
    Ok(())
}

/// Probability that the longest run of the tracked state is at least `s`.
///
/// Tracks the length of the trailing run, capped below `s`, and moves mass
/// into an absorbing "run of `s` seen" state. This is O(n·s); it agrees with
/// the full distribution from [`longest_run_distribution`] but only ever adds
/// probabilities.
pub fn exact_longest_run_alpha(model: &BernoulliModel, s: usize) -> Result<Significance> {
    check_run_length(model, s)?;
    if s == 0 {
        return Ok(Significance::certain());
    }
    let (p, q) = (model.p, model.q);
    // trailing[j]: not yet absorbed, last j flags are tracked (j < s)
    let mut trailing = vec![0.0f64; s];
    trailing[0] = 1.0;
    let mut absorbed = 0.0f64;
    for _ in 0..model.n {
        absorbed += p * trailing[s - 1];
        let alive: f64 = trailing.iter().sum();
        for j in (1..s).rev() {
            trailing[j] = p * trailing[j - 1];
        }
        trailing[0] = q * alive;
    }
    Significance::from_sum(absorbed)
}

/// Distribution `w[i]` of the longest tracked-state run, `i = 0..=n`.
///
/// Runs the full recurrence over `u[i][j]`, the probability that the longest
/// run has length `i` while the last `j` flags are in the tracked state.
/// Arrays are updated in place with `i` and `j` descending. O(n³).
pub fn longest_run_distribution(model: &BernoulliModel) -> Vec<f64> {
    let n = model.n;
    let (p, q) = (model.p, model.q);
    let mut u = vec![vec![0.0f64; n + 2]; n + 2];
    let mut w = vec![0.0f64; n + 2];
    u[0][0] = 1.0;
    w[0] = 1.0;
    for len in 0..n {
        for i in (0..=len + 1).rev() {
            let row_w = w[i];
            if i > 0 {
                u[i][i] = p * (u[i][i - 1] + u[i - 1][i - 1]);
                for j in (1..i).rev() {
                    u[i][j] = p * u[i][j - 1];
                }
            }
            u[i][0] = q * row_w;
            w[i] = u[i][..=i].iter().sum();
        }
    }
    w.truncate(n + 1);
    w
}

/// Tail sum of [`longest_run_distribution`], smallest terms first.
pub fn longest_run_alpha_from_distribution(dist: &[f64], s: usize) -> Result<Significance> {
    if s >= dist.len() {
        return Err(Error::domain(format!(
            "run length {s} exceeds sequence length {}",
            dist.len().saturating_sub(1)
        )));
    }
    Significance::from_sum(dist[s..].iter().rev().sum())
}

/// Upper bound `[1 + q(n - s)] p^s` on the longest-run tail.
pub fn quick_bound_alpha(model: &BernoulliModel, s: usize) -> Result<f64> {
    check_run_length(model, s)?;
    if s == 0 {
        return Err(Error::domain("quick bound needs a positive run length"));
    }
    let tail = model.p.powi(s as i32);
    Ok((1.0 + model.q * (model.n - s) as f64) * tail)
}

/// Distribution `v[i]` of the number of runs, `i = 0..=n` (`v[0] = 0`).
pub fn run_count_distribution(model: &BernoulliModel) -> Vec<f64> {
    let n = model.n;
    let (p, q) = (model.p, model.q);
    // a: last flag tracked, b: last flag opposite
    let mut a = vec![0.0f64; n + 2];
    let mut b = vec![0.0f64; n + 2];
    a[1] = p;
    b[1] = q;
    for len in 1..n {
        for i in (1..=len + 1).rev() {
            let (a_prev, b_prev) = (a[i - 1], b[i - 1]);
            a[i] = p * (a[i] + b_prev);
            b[i] = q * (b[i] + a_prev);
        }
    }
    (0..=n).map(|i| a[i] + b[i]).collect()
}

/// Probability that the number of runs does not exceed `m`.
pub fn exact_run_count_alpha(model: &BernoulliModel, m: usize) -> Result<Significance> {
    if m == 0 || m > model.n {
        return Err(Error::domain(format!(
            "run count {m} outside 1..={}",
            model.n
        )));
    }
    let v = run_count_distribution(model);
    Significance::from_sum(v[1..=m].iter().sum())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunCountMoments {
    pub mean: f64,
    pub variance: f64,
}

/// Closed-form mean and variance of the run count, for `n >= 2`.
pub fn run_count_moments(model: &BernoulliModel) -> Result<RunCountMoments> {
    if model.n < 2 {
        return Err(Error::domain("run-count moments need at least two flags"));
    }
    let n = model.n as f64;
    let theta = model.toggle_rate();
    Ok(RunCountMoments {
        mean: 1.0 + (n - 1.0) * theta,
        variance: (2.0 * n - 3.0) * theta - (3.0 * n - 5.0) * theta * theta,
    })
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Normal approximation of [`exact_run_count_alpha`] with a +1/2 continuity
/// correction. Advisory: it can underestimate the exact tail.
pub fn gaussian_run_count_approx(model: &BernoulliModel, m: usize) -> Result<f64> {
    let moments = run_count_moments(model)?;
    if moments.variance <= 0.0 {
        return Err(Error::Degenerate(
            "run count has zero variance for a constant sequence".into(),
        ));
    }
    let z = (m as f64 + 0.5 - moments.mean) / moments.variance.sqrt();
    Ok(normal_cdf(z))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(n: usize, p: f64) -> BernoulliModel {
        BernoulliModel::new(n, p).unwrap()
    }

    #[test]
    fn longest_run_small_cases() {
        let a = exact_longest_run_alpha(&model(4, 0.5), 2).unwrap();
        assert!((a.alpha - 0.5).abs() < 1e-15);
        assert_eq!(
            exact_longest_run_alpha(&model(9, 0.3), 0).unwrap().alpha,
            1.0
        );
        let a = exact_longest_run_alpha(&model(10, 0.5), 3).unwrap();
        assert!((a.alpha - 520.0 / 1024.0).abs() < 1e-15);
        assert!(exact_longest_run_alpha(&model(4, 0.5), 5).is_err());
    }

    #[test]
    fn degenerate_probabilities() {
        assert_eq!(
            exact_longest_run_alpha(&model(6, 0.0), 1).unwrap().alpha,
            0.0
        );
        assert_eq!(
            exact_longest_run_alpha(&model(6, 0.0), 1).unwrap().power,
            f64::INFINITY
        );
        assert_eq!(
            exact_longest_run_alpha(&model(6, 1.0), 6).unwrap().alpha,
            1.0
        );
        assert_eq!(exact_run_count_alpha(&model(6, 1.0), 1).unwrap().alpha, 1.0);
        assert_eq!(exact_run_count_alpha(&model(6, 0.0), 1).unwrap().alpha, 1.0);
    }

    #[test]
    fn quick_bound_examples() {
        assert!((quick_bound_alpha(&model(4, 0.5), 2).unwrap() - 0.5).abs() < 1e-15);
        assert!((quick_bound_alpha(&model(10, 0.5), 3).unwrap() - 0.5625).abs() < 1e-15);
        assert_eq!(quick_bound_alpha(&model(7, 1.0), 7).unwrap(), 1.0);
        assert!(quick_bound_alpha(&model(7, 0.5), 0).is_err());
        assert!(quick_bound_alpha(&model(7, 0.5), 8).is_err());
    }

    #[test]
    fn run_count_small_cases() {
        let a = exact_run_count_alpha(&model(3, 0.5), 1).unwrap();
        assert!((a.alpha - 0.25).abs() < 1e-15);
        let a = exact_run_count_alpha(&model(37, 0.2), 37).unwrap();
        assert!((a.alpha - 1.0).abs() < 1e-14);
        assert!(exact_run_count_alpha(&model(3, 0.5), 0).is_err());
        assert!(exact_run_count_alpha(&model(3, 0.5), 4).is_err());
    }

    #[test]
    fn single_flag_model() {
        let v = run_count_distribution(&model(1, 0.3));
        assert_eq!(v, vec![0.0, 1.0]);
        let w = longest_run_distribution(&model(1, 0.3));
        assert!((w[0] - 0.7).abs() < 1e-15 && (w[1] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn moments_examples() {
        let m = run_count_moments(&model(2, 0.5)).unwrap();
        assert!((m.mean - 1.5).abs() < 1e-15 && (m.variance - 0.25).abs() < 1e-15);
        let m = run_count_moments(&model(10, 0.5)).unwrap();
        assert!((m.mean - 5.5).abs() < 1e-15 && (m.variance - 2.25).abs() < 1e-15);
        let m = run_count_moments(&model(10, 0.0)).unwrap();
        assert_eq!((m.mean, m.variance), (1.0, 0.0));
        assert!(run_count_moments(&model(1, 0.5)).is_err());
    }

    #[test]
    fn gaussian_approx() {
        let g = gaussian_run_count_approx(&model(10, 0.5), 5).unwrap();
        assert!((g - 0.5).abs() < 1e-15);
        let exact = exact_run_count_alpha(&model(10, 0.5), 5).unwrap().alpha;
        assert!((exact - 0.5).abs() < 1e-15);
        let g = gaussian_run_count_approx(&model(10, 0.5), 10).unwrap();
        assert!(g > 0.999);
        assert!(matches!(
            gaussian_run_count_approx(&model(10, 1.0), 3),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn power_values() {
        assert!((power(1e-3).unwrap() - 3.0).abs() < 1e-12);
        assert_eq!(power(1.0).unwrap(), 0.0);
        assert_eq!(power(0.0).unwrap(), f64::INFINITY);
        assert!((power(2.2e-19).unwrap() - 18.657_577_319_177_793).abs() < 1e-12);
        assert!(power(1.5).is_err());
        assert!(power(-0.1).is_err());
    }

    #[test]
    fn absorbing_form_matches_full_distribution() {
        for &(n, p) in &[(30usize, 0.3f64), (57, 0.9), (80, 0.5), (41, 1.0 / 41.0)] {
            let m = model(n, p);
            let w = longest_run_distribution(&m);
            for s in 0..=n {
                let a = exact_longest_run_alpha(&m, s).unwrap().alpha;
                let b = longest_run_alpha_from_distribution(&w, s).unwrap().alpha;
                assert!((a - b).abs() <= 1e-12, "n={n} p={p} s={s}: {a} vs {b}");
                if b > 0.0 {
                    assert!(((a - b) / b).abs() < 1e-9, "relative n={n} s={s}");
                }
            }
        }
    }

    #[test]
    fn fit_uses_counts() {
        let seq = FlagSequence::from_bits("x", "110");
        let m = BernoulliModel::fit(&seq, FlagState::Zero).unwrap();
        assert_eq!(m.n(), 3);
        assert!((m.p() - 1.0 / 3.0).abs() < 1e-15);
        assert!((m.p() + m.q() - 1.0).abs() < 1e-15);
    }
}
