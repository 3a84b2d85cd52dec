//! Bounded, zero-mean, independent noise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::samples::SignalSamples;

/// Distribution of a single draw on `[−b/2, b/2]`. Every family is
/// symmetric about 0, hence has mean exactly 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseFamily {
    /// No noise at all.
    Zero,
    Uniform,
    /// `±b/2` with equal probability.
    Rademacher,
    /// Gaussian with standard deviation `sigma_fraction · b/2`, conditioned
    /// on `|e| <= b/2`.
    TruncatedGaussian {
        sigma_fraction: f64,
    },
    /// Index `i` draws from `components[i % len]`.
    Mixture {
        components: Vec<NoiseFamily>,
    },
}

impl NoiseFamily {
    fn validate(&self, nested: bool) -> Result<()> {
        match self {
            Self::TruncatedGaussian { sigma_fraction } if !(*sigma_fraction > 0.0 && sigma_fraction.is_finite()) => {
                Err(Error::InvalidParameter(format!(
                    "sigma_fraction must be finite and > 0, got {sigma_fraction}"
                )))
            }
            Self::Mixture { .. } if nested => Err(Error::InvalidParameter("mixtures cannot be nested".into())),
            Self::Mixture { components } if components.is_empty() => {
                Err(Error::InvalidParameter("a mixture needs at least one component".into()))
            }
            Self::Mixture { components } => components.iter().try_for_each(|c| c.validate(true)),
            _ => Ok(()),
        }
    }

    fn draw(&self, half: f64, rng: &mut ChaCha8Rng, index: usize) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Uniform => rng.random_range(-half..=half),
            Self::Rademacher => {
                if rng.random_bool(0.5) {
                    half
                } else {
                    -half
                }
            }
            Self::TruncatedGaussian { sigma_fraction } => {
                let normal = Normal::new(0.0, sigma_fraction * half).expect("validated standard deviation");
                loop {
                    let x = normal.sample(rng);
                    if x.abs() <= half {
                        return x;
                    }
                }
            }
            Self::Mixture { components } => components[index % components.len()].draw(half, rng, index),
        }
    }
}

/// A noise family, its total range `b` (draws lie in `[−b/2, b/2]`) and
/// the seed of its stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub family: NoiseFamily,
    pub b: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.b >= 0.0 && self.b.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "b must be finite and >= 0, got {}",
                self.b
            )));
        }
        self.family.validate(false)
    }
}

/// `n` independent draws; identical `(spec, n)` give identical output.
pub fn sample_noise(spec: &NoiseSpec, n: usize) -> Result<SignalSamples> {
    spec.validate()?;
    if spec.b == 0.0 {
        return SignalSamples::zeros(n);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let half = spec.b / 2.0;
    SignalSamples::new((0..n).map(|i| spec.family.draw(half, &mut rng, i)).collect())
}
