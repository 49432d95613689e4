//! χ² test that the rate of ones is constant along the counting order.
//!
//! The sequence is cut into `l` equal segments. When `l` does not divide
//! `n`, a flag straddling a boundary contributes to both neighbours in
//! proportion to how much of its unit interval falls in each.

use crate::error::{Error, Result};
use crate::flagseq::FlagSequence;
use crate::runstats::Significance;

/// Segment count used for the stationarity column.
pub const DEFAULT_SEGMENTS: usize = 12;

/// Below this many flags per segment the normal approximation is weak.
pub const MIN_FLAGS_PER_SEGMENT: usize = 24;

const GAMMA_MAX_ITER: usize = 10_000;
const GAMMA_EPS: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentCounts {
    pub l: usize,
    /// Fractional number of ones in each segment.
    pub k: Vec<f64>,
    pub mu: f64,
    pub sigma2: f64,
}

pub fn segment_counts(seq: &FlagSequence, l: usize) -> Result<SegmentCounts> {
    let n = seq.n();
    if l < 2 {
        return Err(Error::domain("need at least two segments"));
    }
    if l > n {
        return Err(Error::domain(format!("{l} segments exceed {n} flags")));
    }
    // In units of 1/l: flag j spans (j*l, (j+1)*l], segment i spans (i*n, (i+1)*n].
    let mut k = vec![0.0f64; l];
    for (j, _) in seq.flags().iter().enumerate().filter(|(_, &f)| f) {
        let (lo, hi) = (j * l, (j + 1) * l);
        let mut seg = lo / n;
        while seg < l && seg * n < hi {
            let overlap = hi.min((seg + 1) * n) - lo.max(seg * n);
            k[seg] += overlap as f64 / l as f64;
            seg += 1;
        }
    }
    let (r0, r1) = (seq.r0() as f64, seq.r1() as f64);
    Ok(SegmentCounts {
        l,
        k,
        mu: r1 / l as f64,
        sigma2: r0 * r1 / (n as f64 * l as f64),
    })
}

/// `Σ (k_i - μ)² / σ²`.
pub fn chi2_statistic(counts: &SegmentCounts) -> Result<f64> {
    if counts.sigma2 <= 0.0 {
        return Err(Error::Degenerate(
            "constant flow has zero segment variance".into(),
        ));
    }
    Ok(counts
        .k
        .iter()
        .map(|k| (k - counts.mu).powi(2))
        .sum::<f64>()
        / counts.sigma2)
}

/// Regularized upper incomplete gamma function `Q(a, x)`.
pub fn regularized_gamma_q(a: f64, x: f64) -> Result<f64> {
    if a.is_nan() || a <= 0.0 || x.is_nan() || x < 0.0 {
        return Err(Error::domain(format!("Q({a}, {x}) is undefined")));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    let log_prefactor = -x + a * x.ln() - libm::lgamma(a);
    if x < a + 1.0 {
        // series for P, complement is well conditioned here
        let mut ap = a;
        let mut term = 1.0 / a;
        let mut sum = term;
        for _ in 0..GAMMA_MAX_ITER {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * GAMMA_EPS {
                return Ok((1.0 - sum * log_prefactor.exp()).clamp(0.0, 1.0));
            }
        }
    } else {
        // modified Lentz continued fraction for Q
        const TINY: f64 = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..=GAMMA_MAX_ITER {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < TINY {
                d = TINY;
            }
            c = b + an / c;
            if c.abs() < TINY {
                c = TINY;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < GAMMA_EPS {
                return Ok((log_prefactor.exp() * h).clamp(0.0, 1.0));
            }
        }
    }
    Err(Error::Numeric(format!(
        "incomplete gamma Q({a}, {x}) did not converge"
    )))
}

/// Survival function of the χ² distribution with `dof` degrees of freedom.
pub fn chi2_upper_tail(x: f64, dof: usize) -> Result<f64> {
    if dof == 0 {
        return Err(Error::domain("χ² needs at least one degree of freedom"));
    }
    if x.is_nan() || x < 0.0 {
        return Err(Error::domain(format!("χ² statistic {x} is negative")));
    }
    regularized_gamma_q(dof as f64 / 2.0, x / 2.0)
}

/// Significance that segment-to-segment variation of the flag rate is
/// random. Sequences without both states carry no information and score 1.
pub fn stationarity_alpha(seq: &FlagSequence, l: usize) -> Result<Significance> {
    let counts = segment_counts(seq, l)?;
    if seq.r0() == 0 || seq.r1() == 0 {
        return Ok(Significance::certain());
    }
    let stat = chi2_statistic(&counts)?;
    Significance::new(chi2_upper_tail(stat, l - 1)?)
}

/// True when segments hold fewer flags than the approximation wants.
pub fn segments_are_sparse(n: usize, l: usize) -> bool {
    n < MIN_FLAGS_PER_SEGMENT * l
}
