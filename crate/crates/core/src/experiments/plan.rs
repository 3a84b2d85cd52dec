//! Experiment plans as read from JSON.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::{NoiseFamily, NoiseSpec};
use crate::samples::dyadic_level;
use crate::shrink::{ShrinkageParams, WaveletSystem};
use crate::signals::{make_signal, HolderSignal, SignalKind};
use crate::threshold::{min_samples, ThresholdMode};

/// The clean signal of every trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalSpec {
    pub kind: SignalKind,
    pub alpha: f64,
    #[serde(rename = "M")]
    pub m: f64,
}

impl SignalSpec {
    pub fn build(&self) -> Result<HolderSignal> {
        make_signal(self.kind, self.alpha, self.m)
    }
}

/// Noise family and range; the seed of each trial is derived, not stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseModel {
    pub family: NoiseFamily,
    pub b: f64,
}

impl NoiseModel {
    pub fn with_seed(&self, seed: u64) -> NoiseSpec {
        NoiseSpec {
            family: self.family.clone(),
            b: self.b,
            seed,
        }
    }
}

fn default_envelope_quantile() -> f64 {
    0.999
}

/// A grid of `(n, δ)` cells, each run for `trials` independent noise draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    pub signal: SignalSpec,
    pub noise: NoiseModel,
    pub n_list: Vec<usize>,
    pub delta_list: Vec<f64>,
    pub trials: usize,
    #[serde(default)]
    pub mode: ThresholdMode,
    #[serde(default)]
    pub system: WaveletSystem,
    #[serde(default)]
    pub master_seed: u64,
    /// Quantile of `max_sq_err / rate` at the smallest `n` that calibrates
    /// the error envelope of each `δ`.
    #[serde(default = "default_envelope_quantile")]
    pub envelope_quantile: f64,
    /// Fixed envelope constant; skips the calibration when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub envelope: Option<f64>,
}

/// One `(n, δ)` pair of a plan, numbered `n`-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub index: usize,
    pub n: usize,
    pub delta: f64,
    /// `n` is below the theorem's minimum sample count.
    pub below_n0: bool,
}

impl ExperimentPlan {
    /// Checks everything that can be checked without building transforms.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        self.signal.build()?;
        self.noise.with_seed(0).validate()?;
        if !(self.noise.b > 0.0) {
            return bad(format!(
                "noise range b must be > 0, got {} (use the zero family for noiseless runs)",
                self.noise.b
            ));
        }
        for &n in &self.n_list {
            dyadic_level(n)?;
        }
        for &d in &self.delta_list {
            if !(d >= 0.0 && d.is_finite()) {
                return bad(format!("delta must be finite and >= 0, got {d}"));
            }
        }
        match self.system {
            WaveletSystem::Haar if self.signal.alpha > 1.0 => {
                return bad(format!(
                    "Haar wavelets cover alpha <= 1 only, got {}",
                    self.signal.alpha
                ));
            }
            WaveletSystem::Interval { moments } if (moments as f64) < self.signal.alpha => {
                return bad(format!(
                    "N={moments} vanishing moments cannot cover alpha={}",
                    self.signal.alpha
                ));
            }
            _ => {}
        }
        if !(self.envelope_quantile > 0.0 && self.envelope_quantile < 1.0) {
            return bad(format!(
                "envelope_quantile must lie in (0, 1), got {}",
                self.envelope_quantile
            ));
        }
        if let Some(c) = self.envelope {
            if !(c > 0.0 && c.is_finite()) {
                return bad(format!("envelope must be finite and > 0, got {c}"));
            }
        }
        Ok(())
    }

    pub fn params(&self, delta: f64) -> ShrinkageParams {
        ShrinkageParams {
            alpha: self.signal.alpha,
            m: self.signal.m,
            b: self.noise.b,
            delta,
            mode: self.mode,
        }
    }

    /// All cells, `n`-major then `δ`.
    pub fn cells(&self) -> Vec<Cell> {
        let n0 = min_samples(self.signal.alpha).n0;
        let mut cells = Vec::with_capacity(self.n_list.len() * self.delta_list.len());
        for &n in &self.n_list {
            for &delta in &self.delta_list {
                cells.push(Cell {
                    index: cells.len(),
                    n,
                    delta,
                    below_n0: (n as u64) < n0,
                });
            }
        }
        cells
    }
}
