//! Thresholding rules, the threshold `λ_{n,δ}` and level selection.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pyramid::CoefficientPyramid;
use crate::samples::dyadic_level;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdMode {
    #[default]
    Soft,
    Hard,
}

impl FromStr for ThresholdMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "soft" => Ok(Self::Soft),
            "hard" => Ok(Self::Hard),
            other => Err(Error::Parse(format!(
                "unknown threshold mode '{other}' (expected soft|hard)"
            ))),
        }
    }
}

impl fmt::Display for ThresholdMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Soft => "soft",
            Self::Hard => "hard",
        })
    }
}

#[inline]
pub fn soft_threshold(x: f64, lambda: f64) -> f64 {
    if x > lambda {
        x - lambda
    } else if x < -lambda {
        x + lambda
    } else {
        0.0
    }
}

#[inline]
pub fn hard_threshold(x: f64, lambda: f64) -> f64 {
    if x.abs() <= lambda {
        0.0
    } else {
        x
    }
}

impl ThresholdMode {
    #[inline]
    pub fn apply(self, x: f64, lambda: f64) -> f64 {
        match self {
            Self::Soft => soft_threshold(x, lambda),
            Self::Hard => hard_threshold(x, lambda),
        }
    }
}

/// Thresholds every detail coefficient; the approximation block at `J0`
/// is copied unchanged.
pub fn apply_threshold(pyramid: &CoefficientPyramid, lambda: f64, mode: ThresholdMode) -> Result<CoefficientPyramid> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "threshold must be finite and >= 0, got {lambda}"
        )));
    }
    let mut out = pyramid.clone();
    for d in out.details_mut() {
        for x in d.iter_mut() {
            *x = mode.apply(*x, lambda);
        }
    }
    Ok(out)
}

/// `λ_{n,δ} = C_φ b (1 + 2√((1+δ) ln 2)) √(log₂ n / n)`.
///
/// `δ = 0` is accepted as the limiting case.
pub fn compute_threshold(n: usize, delta: f64, b: f64, c_phi: f64) -> Result<f64> {
    let level = dyadic_level(n)?;
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "delta must be finite and >= 0, got {delta}"
        )));
    }
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::InvalidParameter(format!("b must be finite and > 0, got {b}")));
    }
    if !(c_phi >= 1.0) || !c_phi.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "c_phi must be finite and >= 1, got {c_phi}"
        )));
    }
    let factor = 1.0 + 2.0 * ((1.0 + delta) * std::f64::consts::LN_2).sqrt();
    Ok(c_phi * b * factor * (level as f64 / n as f64).sqrt())
}

/// The three levels of the estimator: `J = log₂ n`, the coarse level `J0`
/// and `J1 = ⌈(J − log₂ J)/(1+2α)⌉`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Levels {
    pub j: u32,
    pub j0: u32,
    pub j1: u32,
}

impl Levels {
    /// Level triple for an explicit `J0`, without checking `J0 <= J1`.
    pub fn with_coarse(n: usize, alpha: f64, j0: u32) -> Result<Self> {
        let j = dyadic_level(n)?;
        check_alpha(alpha)?;
        if j0 > j {
            return Err(Error::LevelOutOfRange { level: j0, max: j });
        }
        Ok(Self {
            j,
            j0,
            j1: boundary_level(j, alpha),
        })
    }

    pub fn is_ordered(&self) -> bool {
        self.j0 <= self.j1 && self.j1 <= self.j
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "alpha must be finite and > 0, got {alpha}"
        )))
    }
}

fn boundary_level(j: u32, alpha: f64) -> u32 {
    let x = (j as f64 - (j as f64).log2()) / (1.0 + 2.0 * alpha);
    // A value that is an integer up to rounding must not be bumped up.
    let j1 = (x - 1e-9).ceil().max(0.0) as u32;
    j1.min(j)
}

/// Smallest coarse level the boundary construction with `n_moments`
/// vanishing moments allows: `1 + ⌈log₂(2N − 1)⌉`.
pub fn coarse_level_for_moments(n_moments: usize) -> u32 {
    let m = 2 * n_moments.max(1) - 1;
    1 + (usize::BITS - (m - 1).leading_zeros()) * u32::from(m > 1)
}

/// Default coarse level for Hölder exponent `alpha`: 0 for `α <= 1`,
/// `1 + ⌈log₂(2⌈α⌉ − 1)⌉` otherwise.
pub fn default_coarse_level(alpha: f64) -> u32 {
    if alpha <= 1.0 {
        0
    } else {
        coarse_level_for_moments(alpha.ceil() as usize)
    }
}

/// Levels for `n` samples of a signal with Hölder exponent `alpha`.
///
/// Fails with [`Error::TooFewSamples`] when `J0 > J1`.
pub fn compute_levels(n: usize, alpha: f64) -> Result<Levels> {
    check_alpha(alpha)?;
    let levels = Levels::with_coarse(n, alpha, 0)?;
    let j0 = default_coarse_level(alpha);
    if j0 > levels.j1 {
        return Err(Error::TooFewSamples {
            n,
            alpha,
            j0,
            j1: levels.j1,
        });
    }
    Ok(Levels { j0, ..levels })
}

/// Minimum sample count from the main theorem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinSamples {
    /// `(4α+2)^{2α+2} (log₂(4α+2))²` for `α > 1`, `512` otherwise.
    pub raw: f64,
    /// `raw` rounded up to a power of two (saturates at `2^63`).
    pub n0: u64,
}

pub fn min_samples(alpha: f64) -> MinSamples {
    if alpha <= 1.0 {
        return MinSamples { raw: 512.0, n0: 512 };
    }
    let base = 4.0 * alpha + 2.0;
    let raw = base.powf(2.0 * alpha + 2.0) * base.log2().powi(2);
    let n0 = if raw >= 2f64.powi(63) {
        1u64 << 63
    } else {
        (raw.ceil() as u64).next_power_of_two()
    };
    MinSamples { raw, n0 }
}
