//! Hölder-class test signals and a discrete membership certificate.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::samples::SignalSamples;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalKind {
    /// `f ≡ M`.
    Constant,
    /// `f(t) = M t`.
    Linear,
    /// `f(t) = M |t − 1/2|^α`, `α <= 1`.
    Cusp,
    /// `f(t) = A sin(2πt)` with `A` chosen so that `f ∈ Λ^α(M)`.
    Sinusoid,
    /// Truncated Weierstrass sum `Σ 2^{−mα} cos(2^m π t)`, rescaled into
    /// `Λ^α(M)`, `α <= 1`.
    Weierstrass,
}

impl FromStr for SignalKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "constant" => Self::Constant,
            "linear" => Self::Linear,
            "cusp" => Self::Cusp,
            "sinusoid" => Self::Sinusoid,
            "weierstrass" => Self::Weierstrass,
            other => return Err(Error::Parse(format!("unknown signal kind '{other}'"))),
        })
    }
}

impl fmt::Display for SignalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Constant => "constant",
            Self::Linear => "linear",
            Self::Cusp => "cusp",
            Self::Sinusoid => "sinusoid",
            Self::Weierstrass => "weierstrass",
        })
    }
}

/// Number of terms kept in the Weierstrass sum.
pub const WEIERSTRASS_TERMS: u32 = 20;

/// A closed-form signal together with the class `Λ^α(M)` it belongs to.
#[derive(Debug, Clone, PartialEq)]
pub struct HolderSignal {
    kind: SignalKind,
    alpha: f64,
    m: f64,
    /// Multiplier applied to the raw generator.
    scale: f64,
}

/// Builds a signal of the given kind in `Λ^α(M)`.
pub fn make_signal(kind: SignalKind, alpha: f64, m: f64) -> Result<HolderSignal> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "alpha must be finite and > 0, got {alpha}"
        )));
    }
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::InvalidParameter(format!("M must be finite and > 0, got {m}")));
    }
    let scale = match kind {
        SignalKind::Constant | SignalKind::Linear | SignalKind::Cusp => m,
        SignalKind::Sinusoid => {
            let p = if alpha <= 1.0 { 0 } else { alpha.floor() as i32 };
            m / (2f64.powi(p + 1) * PI.powf(alpha))
        }
        SignalKind::Weierstrass => m / weierstrass_constant(alpha),
    };
    if matches!(kind, SignalKind::Cusp | SignalKind::Weierstrass) && alpha > 1.0 {
        return Err(Error::NotCertified(format!(
            "{kind} signals are only certified for alpha <= 1"
        )));
    }
    Ok(HolderSignal { kind, alpha, m, scale })
}

/// `sup_Δ S(Δ)/Δ^α` bounded from above, where
/// `S(Δ) = Σ_m 2^{−mα} min(2, 2^m π Δ)` dominates every increment of the
/// raw Weierstrass sum over a gap `Δ`.
///
/// `S` is nondecreasing, so on `[Δ_i, Δ_{i+1}]` the ratio is at most
/// `S(Δ_{i+1}) / Δ_i^α`; below the grid the linear part of `S` gives the
/// bound directly.
fn weierstrass_constant(alpha: f64) -> f64 {
    let s = |d: f64| {
        (0..WEIERSTRASS_TERMS)
            .map(|m| (-(m as f64) * alpha).exp2() * (2.0f64).min((m as f64).exp2() * PI * d))
            .sum::<f64>()
    };
    let ratio = 1.001f64;
    let d_min = 1e-12f64;
    let slope: f64 = (0..WEIERSTRASS_TERMS)
        .map(|m| (m as f64 * (1.0 - alpha)).exp2())
        .sum::<f64>()
        * PI;
    let mut best = slope * d_min.powf(1.0 - alpha);
    let mut d = d_min;
    while d < 1.0 {
        let next = (d * ratio).min(1.0);
        best = best.max(s(next) / d.powf(alpha));
        d = next;
    }
    best
}

impl HolderSignal {
    pub fn kind(&self) -> SignalKind {
        self.kind
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn eval(&self, t: f64) -> f64 {
        let raw = match self.kind {
            SignalKind::Constant => 1.0,
            SignalKind::Linear => t,
            SignalKind::Cusp => (t - 0.5).abs().powf(self.alpha),
            SignalKind::Sinusoid => (2.0 * PI * t).sin(),
            SignalKind::Weierstrass => (0..WEIERSTRASS_TERMS)
                .map(|m| (-(m as f64) * self.alpha).exp2() * ((m as f64).exp2() * PI * t).cos())
                .sum(),
        };
        self.scale * raw
    }

    /// `f(i/n)` for `i = 1..=n`.
    pub fn sample(&self, n: usize) -> Result<SignalSamples> {
        SignalSamples::from_fn(n, |t| self.eval(t))
    }
}

/// Outcome of [`check_holder`]; `worst_ratio` is the largest observed
/// increment divided by its allowed bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderCheck {
    pub holds: bool,
    pub worst_ratio: f64,
    /// Grid indices `(i, k)` attaining `worst_ratio`.
    pub worst_pair: Option<(usize, usize)>,
}

const REL_TOL: f64 = 1e-12;

/// Checks the Hölder inequality on the sample grid `t_i = i/n`.
///
/// For `α <= 1` every pair is compared directly. For `α > 1` adjacent
/// first differences must stay below `M`, and every pair of `p`-th divided
/// differences (`p = ⌊α⌋`) must satisfy the bound with exponent `α − p`;
/// since a divided difference equals the derivative somewhere in its
/// stencil, pairs are compared at the largest possible distance between
/// those points.
pub fn check_holder(samples: &SignalSamples, alpha: f64, m: f64) -> HolderCheck {
    let y = samples.values();
    let n = y.len();
    let step = 1.0 / n as f64;
    if alpha <= 1.0 {
        let allowed: Vec<f64> = (0..n).map(|d| m * (d as f64 * step).powf(alpha)).collect();
        return pairwise(y, |d| allowed[d], 0.0);
    }
    let scale = y.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let first: Vec<f64> = y.windows(2).map(|w| (w[1] - w[0]) / step).collect();
    let slack = 4.0 * f64::EPSILON * scale / step;
    let mut worst = HolderCheck {
        holds: true,
        worst_ratio: 0.0,
        worst_pair: None,
    };
    for (i, d) in first.iter().enumerate() {
        let ratio = (d.abs() - slack).max(0.0) / m;
        if ratio > worst.worst_ratio {
            worst = HolderCheck {
                holds: ratio <= 1.0 + REL_TOL,
                worst_ratio: ratio,
                worst_pair: Some((i, i + 1)),
            };
        }
    }
    let p = alpha.floor() as usize;
    let beta = alpha - p as f64;
    let mut diff = y.to_vec();
    for _ in 0..p {
        diff = diff.windows(2).map(|w| (w[1] - w[0]) / step).collect();
    }
    let slack = (2f64).powi(p as i32 + 2) * f64::EPSILON * scale / step.powi(p as i32);
    let higher = pairwise(&diff, |d| m * ((d + p) as f64 * step).min(1.0).powf(beta), slack);
    if higher.worst_ratio > worst.worst_ratio || !higher.holds {
        return HolderCheck {
            holds: worst.holds && higher.holds,
            ..higher
        };
    }
    worst
}

/// Largest `(|v_i − v_k| − slack) / allowed(k − i)` over all pairs.
fn pairwise(v: &[f64], allowed: impl Fn(usize) -> f64, slack: f64) -> HolderCheck {
    let mut worst_ratio = 0.0;
    let mut worst_pair = None;
    for i in 0..v.len() {
        for k in i + 1..v.len() {
            let excess = ((v[k] - v[i]).abs() - slack).max(0.0);
            if excess == 0.0 {
                continue;
            }
            let ratio = excess / allowed(k - i);
            if ratio > worst_ratio {
                worst_ratio = ratio;
                worst_pair = Some((i, k));
            }
        }
    }
    HolderCheck {
        holds: worst_ratio <= 1.0 + REL_TOL,
        worst_ratio,
        worst_pair,
    }
}
