use crate::error::{Error, Result};

/// `n = 2^J` real samples taken on the grid `i/n`, `i = 1..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalSamples {
    values: Vec<f64>,
    level: u32,
}

/// Returns `log2(n)` when `n` is a power of two `>= 2`.
pub fn dyadic_level(n: usize) -> Result<u32> {
    if n >= 2 && n.is_power_of_two() {
        Ok(n.trailing_zeros())
    } else {
        Err(Error::NotPowerOfTwo(n))
    }
}

impl SignalSamples {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let level = dyadic_level(values.len())?;
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self { values, level })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![0.0; n])
    }

    /// Samples `f(i/n)` for `i = 1..=n`.
    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        dyadic_level(n)?;
        let nf = n as f64;
        Self::new((1..=n).map(|i| f(i as f64 / nf)).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `J = log2(n)`.
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Elementwise sum; both operands must have the same length.
    pub fn add(&self, other: &SignalSamples) -> Result<SignalSamples> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(SignalSamples {
            values,
            level: self.level,
        })
    }

    /// `max_i (a_i - b_i)^2`.
    pub fn max_sq_error(&self, other: &SignalSamples) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b) * (a - b))
            .fold(0.0, f64::max)
    }

    /// `(1/n) Σ (a_i - b_i)^2`.
    pub fn mean_sq_error(&self, other: &SignalSamples) -> f64 {
        let s: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        s / self.len() as f64
    }

    pub fn sum_of_squares(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }
}
