//! The shrinkage pipeline: transform, threshold the details, invert.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::haar::{haar_dwt, haar_idwt};
use crate::interval::IntervalSystem;
use crate::pyramid::CoefficientPyramid;
use crate::samples::SignalSamples;
use crate::threshold::{apply_threshold, coarse_level_for_moments, compute_threshold, Levels, ThresholdMode};

/// An orthogonal wavelet transform of `n = 2^J` samples down to a fixed
/// coarse level.
pub trait WaveletTransform: Send + Sync {
    fn forward(&self, samples: &SignalSamples) -> Result<CoefficientPyramid>;
    fn inverse(&self, pyramid: &CoefficientPyramid) -> Result<SignalSamples>;
    fn coarse_level(&self) -> u32;
    /// `Some(n)` when the transform only accepts one length.
    fn sample_count(&self) -> Option<usize>;
    /// The system constant `C_φ`.
    fn c_phi(&self) -> f64;
    fn system(&self) -> WaveletSystem;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HaarTransform {
    pub coarse_level: u32,
}

impl WaveletTransform for HaarTransform {
    fn forward(&self, samples: &SignalSamples) -> Result<CoefficientPyramid> {
        haar_dwt(samples, self.coarse_level)
    }

    fn inverse(&self, pyramid: &CoefficientPyramid) -> Result<SignalSamples> {
        haar_idwt(pyramid)
    }

    fn coarse_level(&self) -> u32 {
        self.coarse_level
    }

    fn sample_count(&self) -> Option<usize> {
        None
    }

    fn c_phi(&self) -> f64 {
        1.0
    }

    fn system(&self) -> WaveletSystem {
        WaveletSystem::Haar
    }
}

/// Which wavelet basis the estimator uses. Serializes as `"haar"` or
/// `"interval:N"`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum WaveletSystem {
    #[default]
    Haar,
    Interval {
        moments: usize,
    },
}

impl FromStr for WaveletSystem {
    type Err = Error;

    /// Accepts `haar` or `interval:N`.
    fn from_str(s: &str) -> Result<Self> {
        if s == "haar" {
            return Ok(Self::Haar);
        }
        let moments = s
            .strip_prefix("interval:")
            .and_then(|m| m.parse::<usize>().ok())
            .ok_or_else(|| Error::Parse(format!("unknown wavelet system '{s}' (expected haar or interval:N)")))?;
        if !(1..=5).contains(&moments) {
            return Err(Error::UnsupportedMoments(moments));
        }
        Ok(Self::Interval { moments })
    }
}

impl TryFrom<String> for WaveletSystem {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<WaveletSystem> for String {
    fn from(s: WaveletSystem) -> String {
        s.to_string()
    }
}

impl fmt::Display for WaveletSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Haar => f.write_str("haar"),
            Self::Interval { moments } => write!(f, "interval:{moments}"),
        }
    }
}

/// Everything the estimator needs for one sample count.
#[derive(Debug, Clone, PartialEq)]
pub struct ShrinkageConfig {
    alpha: f64,
    m: f64,
    b: f64,
    delta: f64,
    c_phi: f64,
    system: WaveletSystem,
    levels: Levels,
    lambda: f64,
    mode: ThresholdMode,
}

/// Signal class and noise parameters shared by every config constructor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShrinkageParams {
    pub alpha: f64,
    pub m: f64,
    pub b: f64,
    pub delta: f64,
    pub mode: ThresholdMode,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be finite and > 0, got {v}"
        )))
    }
}

impl ShrinkageConfig {
    /// Builds a config from explicit levels, checking every invariant.
    pub fn new(params: ShrinkageParams, system: WaveletSystem, c_phi: f64, levels: Levels) -> Result<Self> {
        positive("alpha", params.alpha)?;
        positive("M", params.m)?;
        let n = 1usize << levels.j;
        let lambda = compute_threshold(n, params.delta, params.b, c_phi)?;
        let cfg = Self {
            alpha: params.alpha,
            m: params.m,
            b: params.b,
            delta: params.delta,
            c_phi,
            system,
            levels,
            lambda,
            mode: params.mode,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Haar config for `n` samples; requires `α <= 1` and uses `J0 = 0`.
    pub fn for_haar(n: usize, params: ShrinkageParams) -> Result<Self> {
        if params.alpha > 1.0 {
            return Err(Error::InvalidParameter(format!(
                "Haar wavelets cover alpha <= 1 only, got {}",
                params.alpha
            )));
        }
        let levels = Levels::with_coarse(n, params.alpha, 0)?;
        Self::new(params, WaveletSystem::Haar, 1.0, levels)
    }

    /// Config matching a built interval system (its `J0`, `n` and `C_φ`).
    ///
    /// Fails with [`Error::TooFewSamples`] when `J0 > J1`.
    pub fn for_interval(system: &IntervalSystem, params: ShrinkageParams) -> Result<Self> {
        let levels = Levels::with_coarse(system.n(), params.alpha, system.j0())?;
        if levels.j0 > levels.j1 {
            return Err(Error::TooFewSamples {
                n: system.n(),
                alpha: params.alpha,
                j0: levels.j0,
                j1: levels.j1,
            });
        }
        let kind = WaveletSystem::Interval {
            moments: system.moments(),
        };
        Self::new(params, kind, system.c_phi_estimate(), levels)
    }

    /// Config for any transform; when `J0 > J1` (too few samples for the
    /// theorem) `J1` is raised to `J0` instead of failing. `J1` only splits
    /// the detail levels for diagnostics, so the estimate is unaffected.
    pub fn for_transform_relaxed(transform: &dyn WaveletTransform, n: usize, params: ShrinkageParams) -> Result<Self> {
        let mut levels = Levels::with_coarse(n, params.alpha, transform.coarse_level())?;
        levels.j1 = levels.j1.max(levels.j0);
        Self::new(params, transform.system(), transform.c_phi(), levels)
    }

    /// Re-checks the invariants of a config.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InconsistentConfig(msg));
        if !self.levels.is_ordered() {
            return bad(format!(
                "levels must satisfy J0 <= J1 <= J, got J0={} J1={} J={}",
                self.levels.j0, self.levels.j1, self.levels.j
            ));
        }
        if let WaveletSystem::Interval { moments } = self.system {
            if (moments as f64) < self.alpha {
                return bad(format!(
                    "N={moments} vanishing moments cannot cover alpha={}",
                    self.alpha
                ));
            }
            let min_j0 = coarse_level_for_moments(moments);
            if self.levels.j0 < min_j0 {
                return bad(format!("N={moments} needs J0 >= {min_j0}, got {}", self.levels.j0));
            }
        }
        let expected = compute_threshold(1 << self.levels.j, self.delta, self.b, self.c_phi)?;
        if expected != self.lambda {
            return bad(format!(
                "lambda {} does not match the formula value {expected}",
                self.lambda
            ));
        }
        Ok(())
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn c_phi(&self) -> f64 {
        self.c_phi
    }

    pub fn system(&self) -> WaveletSystem {
        self.system
    }

    pub fn levels(&self) -> Levels {
        self.levels
    }

    pub fn n(&self) -> usize {
        1 << self.levels.j
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mode(&self) -> ThresholdMode {
        self.mode
    }
}

/// Denoises `y`. Interval configs build their system on every call; use
/// [`shrink_with`] to reuse one.
pub fn shrink(y: &SignalSamples, config: &ShrinkageConfig) -> Result<SignalSamples> {
    match config.system() {
        WaveletSystem::Haar => shrink_with(
            y,
            config,
            &HaarTransform {
                coarse_level: config.levels().j0,
            },
        ),
        WaveletSystem::Interval { moments } => {
            let system = IntervalSystem::build(moments, y.len(), config.levels().j0)?;
            shrink_with(y, config, &system)
        }
    }
}

/// Denoises `y` with a prepared transform that must match `config`.
pub fn shrink_with(
    y: &SignalSamples,
    config: &ShrinkageConfig,
    transform: &dyn WaveletTransform,
) -> Result<SignalSamples> {
    check_match(y, config, transform)?;
    let coeffs = transform.forward(y)?;
    let thresholded = apply_threshold(&coeffs, config.lambda(), config.mode())?;
    transform.inverse(&thresholded)
}

fn check_match(y: &SignalSamples, config: &ShrinkageConfig, transform: &dyn WaveletTransform) -> Result<()> {
    if y.len() != config.n() {
        return Err(Error::DimensionMismatch {
            expected: config.n(),
            got: y.len(),
        });
    }
    if let Some(n) = transform.sample_count() {
        if n != y.len() {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: y.len(),
            });
        }
    }
    if transform.system() != config.system() {
        return Err(Error::InconsistentConfig(format!(
            "config is for {} but the transform is {}",
            config.system(),
            transform.system()
        )));
    }
    if transform.coarse_level() != config.levels().j0 {
        return Err(Error::InconsistentConfig(format!(
            "config has J0={} but the transform stops at {}",
            config.levels().j0,
            transform.coarse_level()
        )));
    }
    if transform.c_phi() != config.c_phi() {
        return Err(Error::InconsistentConfig(
            "C_phi differs between config and transform".into(),
        ));
    }
    Ok(())
}
