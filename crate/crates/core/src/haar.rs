//! Fast Haar analysis and synthesis on `[0, 1]`.
//!
//! The transform works on block means: if `m_{j,k}` is the mean of the
//! samples in the dyadic block `(k 2^-j, (k+1) 2^-j]`, then
//! `c_{j,k} = 2^{-j/2} m_{j,k}` and `d_{j,k} = 2^{-j/2} (m_{j+1,2k} - m_{j+1,2k+1}) / 2`.
//! Averaging keeps constant signals exact in floating point.

use crate::error::{Error, Result};
use crate::pyramid::CoefficientPyramid;
use crate::samples::SignalSamples;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoeffKind {
    Approx,
    Detail,
}

fn level_scale(j: u32) -> f64 {
    (-(j as f64) / 2.0).exp2()
}

/// Haar coefficients of the piecewise-constant extension of `samples`,
/// down to `coarse_level`. Runs in `O(n)`.
pub fn haar_dwt(samples: &SignalSamples, coarse_level: u32) -> Result<CoefficientPyramid> {
    let level = samples.level();
    if coarse_level > level {
        return Err(Error::LevelOutOfRange {
            level: coarse_level,
            max: level,
        });
    }
    let mut means = samples.values().to_vec();
    let mut details = Vec::with_capacity((level - coarse_level) as usize);
    for j in (coarse_level..level).rev() {
        let half = 1usize << j;
        let scale = level_scale(j);
        let mut next = Vec::with_capacity(half);
        let mut d = Vec::with_capacity(half);
        for pair in means.chunks_exact(2) {
            next.push((pair[0] + pair[1]) / 2.0);
            d.push(scale * (pair[0] - pair[1]) / 2.0);
        }
        details.push(d);
        means = next;
    }
    details.reverse();
    let scale = level_scale(coarse_level);
    let approx = means.into_iter().map(|m| m * scale).collect();
    CoefficientPyramid::new(coarse_level, approx, details, false)
}

/// Exact inverse of [`haar_dwt`]; returns `ȳ(i/n)`.
pub fn haar_idwt(pyramid: &CoefficientPyramid) -> Result<SignalSamples> {
    let p = pyramid.to_unscaled();
    let inv = |j: u32| (j as f64 / 2.0).exp2();
    let j0 = p.coarse_level();
    let mut means: Vec<f64> = p.approx().iter().map(|c| c * inv(j0)).collect();
    for (j, d) in p.details() {
        let s = inv(j);
        let mut next = Vec::with_capacity(means.len() * 2);
        for (m, dk) in means.iter().zip(d) {
            let delta = dk * s;
            next.push(m + delta);
            next.push(m - delta);
        }
        means = next;
    }
    SignalSamples::new(means)
}

/// Direct block summation of a single Haar coefficient:
/// `c_{j,k} = 2^{-J+j/2} Σ_{i<2^{J-j}} g_{i+1+k2^{J-j}}` and the
/// signed half-block difference for `d_{j,k}`.
///
/// Independent of the pyramid recursion; used as its oracle.
pub fn haar_coeff_closed_form(samples: &SignalSamples, j: u32, k: usize, kind: CoeffKind) -> Result<f64> {
    let level = samples.level();
    if j >= level || k >= (1usize << j) {
        return Err(Error::IndexOutOfRange { j, k });
    }
    let g = samples.values();
    let block = 1usize << (level - j);
    let start = k * block;
    let factor = (-(level as f64) + j as f64 / 2.0).exp2();
    let sum = match kind {
        CoeffKind::Approx => g[start..start + block].iter().sum::<f64>(),
        CoeffKind::Detail => {
            let half = block / 2;
            (0..half).map(|i| g[start + i] - g[start + half + i]).sum::<f64>()
        }
    };
    Ok(factor * sum)
}
