//! Brute-force and Monte Carlo references for the exact run engines.
//!
//! Enumeration walks every binary string of length `n <= 20`, scans it for
//! runs directly and weights it by `p^ones * q^zeros`. Sampling uses
//! `ChaCha8Rng::seed_from_u64(seed)` from `rand_chacha`, whose stream is
//! fixed across platforms; each trial draws `n` uniforms with
//! `Rng::gen::<f64>()` and sets a flag when the draw is below `p`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::runstats::{gaussian_run_count_approx, quick_bound_alpha, BernoulliModel};

pub const MAX_ENUMERATION_LEN: usize = 20;
pub const MIN_MONTE_CARLO_TRIALS: u64 = 1_000;
/// Smallest target probability the sampler is willing to estimate.
pub const MIN_MONTE_CARLO_PROBABILITY: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleEstimate {
    pub value: f64,
    /// Zero for exhaustive results.
    pub stderr: f64,
    pub trials: u64,
}

impl OracleEstimate {
    pub fn is_exhaustive(&self) -> bool {
        self.stderr == 0.0
    }
}

/// Exhaustive distributions of the longest run of ones and of the number of
/// runs over all strings of length `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnumeratedDistributions {
    /// `longest[i]`: probability the longest run of ones is exactly `i`.
    pub longest: Vec<f64>,
    /// `runs[i]`: probability of exactly `i` runs (`runs[0] = 0` for n > 0).
    pub runs: Vec<f64>,
}

fn scan(bits: u32, n: usize) -> (usize, usize, u32) {
    let (mut longest, mut current, mut runs) = (0usize, 0usize, 0usize);
    let mut prev: Option<bool> = None;
    for k in 0..n {
        let bit = bits >> k & 1 == 1;
        if prev != Some(bit) {
            runs += 1;
        }
        current = if bit { current + 1 } else { 0 };
        longest = longest.max(current);
        prev = Some(bit);
    }
    (longest, runs, bits.count_ones())
}

pub fn enumerate_distributions(n: usize, p: f64) -> Result<EnumeratedDistributions> {
    if n > MAX_ENUMERATION_LEN {
        return Err(Error::TooLarge {
            n,
            max: MAX_ENUMERATION_LEN,
        });
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("probability {p} outside [0, 1]")));
    }
    let q = 1.0 - p;
    let mut longest = vec![0.0; n + 1];
    let mut runs = vec![0.0; n + 1];
    for bits in 0..(1u32 << n) {
        let (s, m, ones) = scan(bits, n);
        // powi(0) is 1, so 0^0 = 1
        let weight = p.powi(ones as i32) * q.powi(n as i32 - ones as i32);
        longest[s] += weight;
        runs[m] += weight;
    }
    Ok(EnumeratedDistributions { longest, runs })
}

fn exhaustive(value: f64) -> OracleEstimate {
    OracleEstimate {
        value,
        stderr: 0.0,
        trials: 0,
    }
}

/// P(longest run of ones >= s) by enumeration.
pub fn enumerate_longest_run_tail(n: usize, p: f64, s: usize) -> Result<OracleEstimate> {
    let d = enumerate_distributions(n, p)?;
    if s > n {
        return Err(Error::domain(format!("run length {s} exceeds {n}")));
    }
    Ok(exhaustive(d.longest[s..].iter().sum()))
}

/// P(number of runs <= m) by enumeration.
pub fn enumerate_run_count_cdf(n: usize, p: f64, m: usize) -> Result<OracleEstimate> {
    let d = enumerate_distributions(n, p)?;
    if m > n {
        return Err(Error::domain(format!("run count {m} exceeds {n}")));
    }
    Ok(exhaustive(d.runs[..=m].iter().sum()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailTarget {
    /// Longest run of ones is at least this long.
    LongestRunAtLeast(usize),
    /// Number of runs is at most this many.
    RunCountAtMost(usize),
}

/// Screens out targets whose probability is clearly below what sampling
/// can resolve. Uses the quick bound for run lengths (an upper bound) and
/// the normal approximation for run counts.
fn screen_target(n: usize, p: f64, target: TailTarget) -> Result<()> {
    let model = BernoulliModel::new(n, p)?;
    let estimate = match target {
        TailTarget::LongestRunAtLeast(0) => 1.0,
        TailTarget::LongestRunAtLeast(s) => quick_bound_alpha(&model, s)?,
        TailTarget::RunCountAtMost(m) => {
            if m == 0 || m > n {
                return Err(Error::domain(format!("run count {m} outside 1..={n}")));
            }
            match gaussian_run_count_approx(&model, m) {
                Ok(g) => g,
                Err(Error::Degenerate(_)) | Err(Error::Domain(_)) => 1.0,
                Err(e) => return Err(e),
            }
        }
    };
    if estimate < MIN_MONTE_CARLO_PROBABILITY {
        return Err(Error::OutOfRange(format!(
            "{target:?} at n={n}, p={p} has probability near {estimate:.1e}"
        )));
    }
    Ok(())
}

pub fn monte_carlo_tail(
    n: usize,
    p: f64,
    target: TailTarget,
    trials: u64,
    seed: u64,
) -> Result<OracleEstimate> {
    if trials < MIN_MONTE_CARLO_TRIALS {
        return Err(Error::domain(format!(
            "at least {MIN_MONTE_CARLO_TRIALS} trials required, got {trials}"
        )));
    }
    screen_target(n, p, target)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0u64;
    for _ in 0..trials {
        let (mut longest, mut current, mut runs) = (0usize, 0usize, 0usize);
        let mut prev = None;
        for _ in 0..n {
            let bit = rng.gen::<f64>() < p;
            if prev != Some(bit) {
                runs += 1;
            }
            current = if bit { current + 1 } else { 0 };
            longest = longest.max(current);
            prev = Some(bit);
        }
        let hit = match target {
            TailTarget::LongestRunAtLeast(s) => longest >= s,
            TailTarget::RunCountAtMost(m) => runs <= m,
        };
        hits += hit as u64;
    }
    let value = hits as f64 / trials as f64;
    Ok(OracleEstimate {
        value,
        stderr: (value * (1.0 - value) / trials as f64).sqrt(),
        trials,
    })
}
