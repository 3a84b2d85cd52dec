use crate::error::{Error, Result};

/// Wavelet coefficients of a sampled signal: approximation coefficients
/// `c_{J0,k}` followed by details `d_{j,k}` for `j = J0..J-1`.
///
/// Entries are stored in the integral convention `c_{j,k} = <ḡ, φ_{j,k}>`
/// unless `scaled` is set, in which case every entry carries the extra
/// `√n` factor of the discrete transform (so that the flattened pyramid is
/// `W y` for the orthogonal matrix `W`).
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientPyramid {
    coarse_level: u32,
    approx: Vec<f64>,
    details: Vec<Vec<f64>>,
    scaled: bool,
}

impl CoefficientPyramid {
    pub fn new(coarse_level: u32, approx: Vec<f64>, details: Vec<Vec<f64>>, scaled: bool) -> Result<Self> {
        if coarse_level >= usize::BITS - 1 || approx.len() != 1usize << coarse_level {
            return Err(Error::MalformedPyramid(format!(
                "approximation block has {} entries, expected 2^{coarse_level}",
                approx.len()
            )));
        }
        for (offset, d) in details.iter().enumerate() {
            let j = coarse_level as usize + offset;
            if j >= usize::BITS as usize - 1 || d.len() != 1usize << j {
                return Err(Error::MalformedPyramid(format!(
                    "detail level {j} has {} entries, expected 2^{j}",
                    d.len()
                )));
            }
        }
        if coarse_level as usize + details.len() == 0 {
            return Err(Error::MalformedPyramid("pyramid of a single sample".into()));
        }
        Ok(Self {
            coarse_level,
            approx,
            details,
            scaled,
        })
    }

    pub fn zeros(level: u32, coarse_level: u32) -> Result<Self> {
        if coarse_level > level {
            return Err(Error::LevelOutOfRange {
                level: coarse_level,
                max: level,
            });
        }
        let details = (coarse_level..level).map(|j| vec![0.0; 1 << j]).collect();
        Self::new(coarse_level, vec![0.0; 1 << coarse_level], details, false)
    }

    /// Rebuilds a pyramid from the flat layout `[c_J0 | d_J0 | ... | d_{J-1}]`.
    pub fn from_flat(flat: &[f64], coarse_level: u32, scaled: bool) -> Result<Self> {
        let n = flat.len();
        let level = crate::samples::dyadic_level(n)?;
        if coarse_level > level {
            return Err(Error::LevelOutOfRange {
                level: coarse_level,
                max: level,
            });
        }
        let mut pos = 1usize << coarse_level;
        let approx = flat[..pos].to_vec();
        let mut details = Vec::with_capacity((level - coarse_level) as usize);
        for j in coarse_level..level {
            let len = 1usize << j;
            details.push(flat[pos..pos + len].to_vec());
            pos += len;
        }
        Self::new(coarse_level, approx, details, scaled)
    }

    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        out.extend_from_slice(&self.approx);
        for d in &self.details {
            out.extend_from_slice(d);
        }
        out
    }

    pub fn coarse_level(&self) -> u32 {
        self.coarse_level
    }

    /// `J`, the level of the underlying samples.
    pub fn level(&self) -> u32 {
        self.coarse_level + self.details.len() as u32
    }

    /// Total number of coefficients, always `2^J`.
    pub fn len(&self) -> usize {
        1 << self.level()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_scaled(&self) -> bool {
        self.scaled
    }

    pub fn approx(&self) -> &[f64] {
        &self.approx
    }

    pub fn approx_mut(&mut self) -> &mut [f64] {
        &mut self.approx
    }

    /// Detail coefficients at absolute level `j`.
    pub fn detail(&self, j: u32) -> Option<&[f64]> {
        j.checked_sub(self.coarse_level)
            .and_then(|o| self.details.get(o as usize))
            .map(Vec::as_slice)
    }

    pub fn detail_mut(&mut self, j: u32) -> Option<&mut [f64]> {
        j.checked_sub(self.coarse_level)
            .and_then(move |o| self.details.get_mut(o as usize))
            .map(Vec::as_mut_slice)
    }

    /// Iterates `(j, d_j)` from the coarsest detail level up.
    pub fn details(&self) -> impl Iterator<Item = (u32, &[f64])> {
        self.details
            .iter()
            .enumerate()
            .map(move |(o, d)| (self.coarse_level + o as u32, d.as_slice()))
    }

    pub(crate) fn details_mut(&mut self) -> impl Iterator<Item = &mut Vec<f64>> {
        self.details.iter_mut()
    }

    fn rescaled(&self, factor: f64, scaled: bool) -> Self {
        let scale = |v: &Vec<f64>| v.iter().map(|x| x * factor).collect::<Vec<_>>();
        Self {
            coarse_level: self.coarse_level,
            approx: scale(&self.approx),
            details: self.details.iter().map(scale).collect(),
            scaled,
        }
    }

    /// Same coefficients with the `√n` factor applied.
    pub fn to_scaled(&self) -> Self {
        if self.scaled {
            return self.clone();
        }
        self.rescaled((self.len() as f64).sqrt(), true)
    }

    /// Same coefficients in the integral convention.
    pub fn to_unscaled(&self) -> Self {
        if !self.scaled {
            return self.clone();
        }
        self.rescaled(1.0 / (self.len() as f64).sqrt(), false)
    }

    /// Sum of squares of the `√n`-scaled coefficients; equals `Σ y_i^2`.
    pub fn scaled_energy(&self) -> f64 {
        let raw: f64 = self.flatten().iter().map(|x| x * x).sum();
        if self.scaled {
            raw
        } else {
            raw * self.len() as f64
        }
    }
}
