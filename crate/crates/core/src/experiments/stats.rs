//! Small statistics helpers for the harness.

use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, ContinuousCDF, DiscreteCDF, Normal};
use statrs::statistics::{Data, OrderStatistics};

use crate::error::{Error, Result};

/// Least-squares line through `(x, y)` points: `(slope, intercept, rms residual)`.
pub fn ls_slope(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    (slope, intercept, (rss / n).sqrt())
}

/// Sample quantile (median-unbiased interpolation); `NaN` for empty input.
pub fn quantile(values: &[f64], tau: f64) -> f64 {
    Data::new(values.to_vec()).quantile(tau)
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    Data::new(values.to_vec()).median()
}

/// Two-sided Wilson score interval for `successes` out of `trials` at the
/// given confidence level.
pub fn wilson_interval(successes: usize, trials: usize, confidence: f64) -> Result<(f64, f64)> {
    if trials == 0 || successes > trials {
        return Err(Error::InvalidParameter(format!(
            "Wilson interval needs 0 <= k <= n, n > 0; got k={successes}, n={trials}"
        )));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "confidence must lie in (0, 1), got {confidence}"
        )));
    }
    let z = Normal::standard().inverse_cdf(0.5 + confidence / 2.0);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    // The endpoints at k = 0 and k = n are exactly 0 and 1; pin them
    // against rounding.
    let lo = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if successes == trials {
        1.0
    } else {
        (centre + half).min(1.0)
    };
    Ok((lo, hi))
}

/// `P(X >= k)` for `X ~ Binomial(trials, p)`.
pub fn binomial_upper_tail(k: u64, trials: u64, p: f64) -> Result<f64> {
    if k == 0 {
        return Ok(1.0);
    }
    let dist = Binomial::new(p, trials).map_err(|e| Error::InvalidParameter(format!("binomial: {e}")))?;
    Ok(dist.sf(k - 1))
}

/// Fitted convergence exponent of an error quantile against `log₂ n / n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    /// Slope of `ln(error)` against `ln(log₂ n / n)`.
    pub exponent: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit in log space.
    pub residual: f64,
    /// `2α / (1 + 2α)`.
    pub target: f64,
    pub points: usize,
}

pub fn target_exponent(alpha: f64) -> f64 {
    2.0 * alpha / (1.0 + 2.0 * alpha)
}

/// The theoretical rate `(log₂ n / n)^{2α/(1+2α)}`.
pub fn rate(n: usize, alpha: f64) -> f64 {
    let nf = n as f64;
    (nf.log2() / nf).powf(target_exponent(alpha))
}

/// Fits `error ≈ C (log₂ n / n)^e` through `(n, error)` pairs; needs at
/// least four distinct `n` and positive errors.
pub fn fit_rate(points: &[(usize, f64)], alpha: f64) -> Result<RateFit> {
    let mut ns: Vec<usize> = points.iter().map(|p| p.0).collect();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() != points.len() {
        return Err(Error::InvalidParameter("rate fit needs one error value per n".into()));
    }
    if ns.len() < 4 {
        return Err(Error::InvalidParameter(format!(
            "rate fit needs at least 4 distinct n, got {}",
            ns.len()
        )));
    }
    let mut xy = Vec::with_capacity(points.len());
    for &(n, err) in points {
        if n < 2 || !(err > 0.0 && err.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "rate fit needs n >= 2 and a positive error, got n={n}, error={err}"
            )));
        }
        let nf = n as f64;
        xy.push(((nf.log2() / nf).ln(), err.ln()));
    }
    let (exponent, intercept, residual) = ls_slope(&xy);
    Ok(RateFit {
        exponent,
        intercept,
        residual,
        target: target_exponent(alpha),
        points: xy.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_matches_reference_values() {
        // z = 2.5758293035489
        let (lo, hi) = wilson_interval(50, 100, 0.99).unwrap();
        assert!((lo - 0.375_279_6).abs() < 1e-6, "{lo}");
        assert!((hi - 0.624_720_4).abs() < 1e-6, "{hi}");
        let (lo, hi) = wilson_interval(10, 10, 0.99).unwrap();
        assert!(hi == 1.0 && lo > 0.5);
        assert!(wilson_interval(0, 0, 0.99).is_err());
    }

    #[test]
    fn binomial_tail() {
        assert_eq!(binomial_upper_tail(0, 10, 0.3).unwrap(), 1.0);
        assert!((binomial_upper_tail(10, 10, 0.5).unwrap() - 0.5f64.powi(10)).abs() < 1e-15);
        assert!((binomial_upper_tail(1, 10, 0.5).unwrap() - (1.0 - 0.5f64.powi(10))).abs() < 1e-12);
    }

    #[test]
    fn exact_power_law_is_recovered() {
        let pts: Vec<(usize, f64)> = (8..=14)
            .step_by(2)
            .map(|j| {
                let n = 1usize << j;
                let x = (j as f64) / n as f64;
                (n, 3.0 * x.powf(0.66))
            })
            .collect();
        let fit = fit_rate(&pts, 1.0).unwrap();
        assert!((fit.exponent - 0.66).abs() < 1e-6);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-6);
        assert!((fit.target - 2.0 / 3.0).abs() < 1e-15);
        assert!((target_exponent(0.5) - 0.5).abs() < 1e-15);
        assert!(fit_rate(&pts[..3], 1.0).is_err());
    }

    #[test]
    fn quantiles() {
        let v: Vec<f64> = (1..=5).map(f64::from).collect();
        assert_eq!(median(&v), 3.0);
        assert_eq!(quantile(&v, 1.0), 5.0);
        assert!(median(&[]).is_nan());
    }
}
