//! Boundary-adapted orthonormal wavelet transform on `[0, 1]`.
//!
//! Every level step maps `2^{j+1}` scaling coordinates to `2^j` scaling and
//! `2^j` wavelet coordinates. Away from the ends the rows are the shifted
//! Daubechies filters `h` and `g`. Near each end the remaining `2N`
//! dimensions (the vectors supported in a window of `3N − 1` coordinates
//! that are orthogonal to every interior row) are split into the part
//! reached by polynomials of degree `< N` (boundary scaling rows) and its
//! complement (boundary wavelet rows). The split keeps every wavelet row
//! orthogonal to sampled polynomials, so the `N` vanishing moments survive
//! at the ends.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use super::cascade::cascade_evaluate;
use super::filters::{scaling_filter, wavelet_filter};
use super::linalg::{dot, extend_basis, norm};
use crate::error::{Error, Result};
use crate::pyramid::CoefficientPyramid;
use crate::samples::{dyadic_level, SignalSamples};
use crate::shrink::{WaveletSystem, WaveletTransform};
use crate::threshold::coarse_level_for_moments;

const RANK_TOL: f64 = 1e-8;
const CHECK_TOL: f64 = 1e-9;

/// A row with contiguous support: `weights[t]` sits at column `start + t`.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportRow {
    pub start: usize,
    pub weights: Vec<f64>,
}

impl SupportRow {
    fn from_window(start: usize, window: Vec<f64>) -> Self {
        let first = window.iter().position(|&w| w != 0.0).unwrap_or(0);
        let last = window.iter().rposition(|&w| w != 0.0).map_or(first, |p| p + 1);
        Self {
            start: start + first,
            weights: window[first..last].to_vec(),
        }
    }

    /// One past the last supported column.
    pub fn end(&self) -> usize {
        self.start + self.weights.len()
    }

    /// Weight at column `i` (zero outside the support).
    pub fn get(&self, i: usize) -> f64 {
        i.checked_sub(self.start)
            .and_then(|t| self.weights.get(t))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn apply(&self, x: &[f64]) -> f64 {
        dot(&self.weights, &x[self.start..self.end()])
    }

    fn add_scaled(&self, c: f64, out: &mut [f64]) {
        out[self.start..self.end()]
            .iter_mut()
            .zip(&self.weights)
            .for_each(|(o, w)| *o += c * w);
    }

    fn scaled(&self, c: f64) -> Self {
        Self {
            start: self.start,
            weights: self.weights.iter().map(|w| w * c).collect(),
        }
    }

    fn dot_row(&self, other: &SupportRow) -> f64 {
        let lo = self.start.max(other.start);
        let hi = self.end().min(other.end());
        (lo..hi)
            .map(|i| self.weights[i - self.start] * other.weights[i - other.start])
            .sum()
    }
}

/// One analysis step at level `j`, acting on `2^{j+1}` coordinates.
#[derive(Debug, Clone)]
struct Stage {
    low: Vec<SupportRow>,
    high: Vec<SupportRow>,
}

/// The orthogonal transform `W` of `n = 2^J` samples down to level `J0`.
#[derive(Debug, Clone)]
pub struct IntervalSystem {
    moments: usize,
    j0: u32,
    level: u32,
    /// `stages[j − J0]`.
    stages: Vec<Stage>,
    /// Rows of the scaling functions at level `j`, in sample coordinates.
    approx_rows: Vec<Vec<SupportRow>>,
    /// Rows of the wavelets at level `j`, in sample coordinates.
    detail_rows: Vec<Vec<SupportRow>>,
    c_phi_estimate: f64,
    function_bound: f64,
}

struct BoundaryBlock {
    low: Vec<Vec<f64>>,
    high: Vec<Vec<f64>>,
}

/// Restriction of a (possibly partially outside) row to `[a, a + w)`.
fn restrict(start: isize, weights: &[f64], a: isize, w: usize) -> Vec<f64> {
    let mut out = vec![0.0; w];
    for (t, &v) in weights.iter().enumerate() {
        let col = start + t as isize - a;
        if (0..w as isize).contains(&col) {
            out[col as usize] = v;
        }
    }
    out
}

/// Splits the window complement of the interior rows into `N` scaling and
/// `N` wavelet vectors.
fn boundary_block(
    interior: &[Vec<f64>],
    poly: &[Vec<f64>],
    seeds: &[Vec<f64>],
    moments: usize,
    side: &str,
    level: u32,
) -> Result<BoundaryBlock> {
    let w = poly.first().map_or(0, Vec::len);
    let mut interior_basis = Vec::new();
    extend_basis(&mut interior_basis, interior.iter().cloned(), RANK_TOL, usize::MAX);
    let units = (0..w).map(|c| {
        let mut e = vec![0.0; w];
        e[c] = 1.0;
        e
    });
    let mut complement = interior_basis.clone();
    let found = extend_basis(&mut complement, units, RANK_TOL, usize::MAX);
    let complement = complement.split_off(interior_basis.len());
    let fail = |what: &str| {
        Error::UnsupportedGeometry(format!(
            "{side} boundary at level {level}: {what} (N={moments}, window {w})"
        ))
    };
    if found != 2 * moments {
        return Err(fail(&format!(
            "complement has dimension {found}, expected {}",
            2 * moments
        )));
    }
    // Work in coordinates of the complement basis so that every result
    // lies in the complement to rounding, however small the remainder that
    // Gram-Schmidt normalizes.
    let coords = |v: &[f64]| complement.iter().map(|c| dot(v, c)).collect::<Vec<f64>>();
    let lift = |x: &[f64]| {
        let mut out = vec![0.0; w];
        for (c, xi) in complement.iter().zip(x) {
            out.iter_mut().zip(c).for_each(|(o, ci)| *o += xi * ci);
        }
        out
    };
    let mut taken = Vec::new();
    let got = extend_basis(&mut taken, poly.iter().map(|q| coords(q)), RANK_TOL, moments);
    if got != moments {
        return Err(fail("polynomials do not reach the boundary complement"));
    }
    let units = (0..2 * moments).map(|c| {
        let mut e = vec![0.0; 2 * moments];
        e[c] = 1.0;
        e
    });
    let candidates = seeds.iter().map(|s| coords(s)).chain(units);
    let got = extend_basis(&mut taken, candidates, RANK_TOL, moments);
    if got != moments {
        return Err(fail("wavelet complement is degenerate"));
    }
    let high = taken.split_off(moments).iter().map(|x| lift(x)).collect();
    let low = taken.iter().map(|x| lift(x)).collect();
    Ok(BoundaryBlock { low, high })
}

/// Sampled monomials of degree `< N`, one family anchored at each end of
/// `[0, 1]` (`t^p` and `(1 − t)^p`). Anchoring keeps the local content of
/// high degrees resolvable inside a short boundary window.
struct PolynomialFamilies {
    left: Vec<Vec<f64>>,
    right: Vec<Vec<f64>>,
}

fn unit(mut v: Vec<f64>) -> Vec<f64> {
    let s = norm(&v);
    v.iter_mut().for_each(|x| *x /= s);
    v
}

impl PolynomialFamilies {
    fn sampled(n: usize, moments: usize) -> Self {
        let nf = n as f64;
        let family = |f: &dyn Fn(f64) -> f64| {
            (0..moments as i32)
                .map(|p| unit((1..=n).map(|i| f(i as f64 / nf).powi(p)).collect()))
                .collect()
        };
        Self {
            left: family(&|t| t),
            right: family(&|t| 1.0 - t),
        }
    }

    /// Coordinates of both families in the scaling basis of the next level.
    fn coarsen(&self, stage: &Stage) -> Self {
        let map = |fam: &[Vec<f64>]| {
            fam.iter()
                .map(|q| unit(stage.low.iter().map(|r| r.apply(q)).collect()))
                .collect()
        };
        Self {
            left: map(&self.left),
            right: map(&self.right),
        }
    }

    fn all(&self) -> impl Iterator<Item = &Vec<f64>> {
        self.left.iter().chain(&self.right)
    }
}

fn build_stage(moments: usize, m: usize, level: u32, poly: &PolynomialFamilies) -> Result<Stage> {
    let h = scaling_filter(moments)?;
    let g = wavelet_filter(moments)?;
    let len = h.len();
    let w = 3 * moments - 1;
    let half = m / 2;
    if m < 6 * moments - 2 || half < 2 * moments {
        return Err(Error::UnsupportedGeometry(format!(
            "level {level} has {m} coordinates, too few for N={moments}"
        )));
    }
    let pairs = half - 2 * moments;
    let first = moments + 1;
    let starts: Vec<usize> = (0..pairs).map(|k| first + 2 * k).collect();

    let left_interior: Vec<Vec<f64>> = starts
        .iter()
        .filter(|&&s| s < w)
        .flat_map(|&s| [restrict(s as isize, h, 0, w), restrict(s as isize, &g, 0, w)])
        .collect();
    let left_poly: Vec<Vec<f64>> = poly.left.iter().map(|q| q[..w].to_vec()).collect();
    let left_seeds: Vec<Vec<f64>> = (1..)
        .map(|i| first as isize - 2 * i)
        .take_while(|&s| s + len as isize > 0)
        .map(|s| restrict(s, &g, 0, w))
        .collect();
    let left = boundary_block(&left_interior, &left_poly, &left_seeds, moments, "left", level)?;

    let a = m - w;
    let last = first as isize + 2 * pairs as isize - 2;
    let right_interior: Vec<Vec<f64>> = starts
        .iter()
        .filter(|&&s| s + len > a)
        .flat_map(|&s| {
            [
                restrict(s as isize, h, a as isize, w),
                restrict(s as isize, &g, a as isize, w),
            ]
        })
        .collect();
    let right_poly: Vec<Vec<f64>> = poly.right.iter().map(|q| q[a..].to_vec()).collect();
    let right_seeds: Vec<Vec<f64>> = (1..)
        .map(|i| last + 2 * i)
        .take_while(|&s| s < m as isize)
        .map(|s| restrict(s, &g, a as isize, w))
        .collect();
    let right = boundary_block(&right_interior, &right_poly, &right_seeds, moments, "right", level)?;

    let assemble = |l: Vec<Vec<f64>>, filter: &[f64], r: Vec<Vec<f64>>| {
        let mut rows: Vec<SupportRow> = l.into_iter().map(|v| SupportRow::from_window(0, v)).collect();
        rows.extend(starts.iter().map(|&s| SupportRow {
            start: s,
            weights: filter.to_vec(),
        }));
        rows.extend(r.into_iter().map(|v| SupportRow::from_window(a, v)));
        rows
    };
    Ok(Stage {
        low: assemble(left.low, h, right.low),
        high: assemble(left.high, &g, right.high),
    })
}

/// Expresses rows given over level-`(j+1)` scaling coordinates in sample
/// coordinates.
fn expand(rows: &[SupportRow], finer: &[SupportRow]) -> Vec<SupportRow> {
    rows.iter()
        .map(|row| {
            let parts = &finer[row.start..row.end()];
            let lo = parts.iter().map(|p| p.start).min().unwrap_or(0);
            let hi = parts.iter().map(SupportRow::end).max().unwrap_or(lo);
            let mut acc = vec![0.0; hi - lo];
            for (c, p) in row.weights.iter().zip(parts) {
                for (t, w) in p.weights.iter().enumerate() {
                    acc[p.start - lo + t] += c * w;
                }
            }
            SupportRow::from_window(lo, acc)
        })
        .collect()
}

fn check_stage(stage: &Stage, poly: &PolynomialFamilies, level: u32) -> Result<()> {
    let rows: Vec<&SupportRow> = stage.low.iter().chain(&stage.high).collect();
    let mut worst: f64 = 0.0;
    for (i, a) in rows.iter().enumerate() {
        for (k, b) in rows.iter().enumerate().skip(i) {
            if a.start < b.end() && b.start < a.end() {
                let want = if i == k { 1.0 } else { 0.0 };
                worst = worst.max((a.dot_row(b) - want).abs());
            }
        }
    }
    let leak = stage
        .high
        .iter()
        .flat_map(|r| poly.all().map(move |q| r.apply(q).abs()))
        .fold(0.0, f64::max);
    if worst > CHECK_TOL || leak > CHECK_TOL {
        return Err(Error::UnsupportedGeometry(format!(
            "level {level} failed verification (orthogonality {worst:e}, moments {leak:e})"
        )));
    }
    Ok(())
}

impl IntervalSystem {
    /// Builds the transform for `n` samples with `moments` vanishing moments
    /// down to coarse level `j0`.
    pub fn build(moments: usize, n: usize, j0: u32) -> Result<Self> {
        scaling_filter(moments)?;
        let level = dyadic_level(n)?;
        let min_j0 = coarse_level_for_moments(moments);
        if j0 < min_j0 {
            return Err(Error::UnsupportedGeometry(format!(
                "N={moments} needs J0 >= {min_j0}, got {j0}"
            )));
        }
        if j0 >= level {
            return Err(Error::UnsupportedGeometry(format!("J0={j0} must be below J={level}")));
        }
        let mut poly = PolynomialFamilies::sampled(n, moments);
        let mut stages = Vec::with_capacity((level - j0) as usize);
        for j in (j0..level).rev() {
            let stage = build_stage(moments, 1 << (j + 1), j, &poly)?;
            check_stage(&stage, &poly, j)?;
            poly = poly.coarsen(&stage);
            stages.push(stage);
        }
        stages.reverse();

        let count = stages.len();
        let mut approx_rows: Vec<Vec<SupportRow>> = vec![Vec::new(); count];
        let mut detail_rows: Vec<Vec<SupportRow>> = vec![Vec::new(); count];
        for idx in (0..count).rev() {
            let stage = &stages[idx];
            if idx + 1 == count {
                approx_rows[idx] = stage.low.clone();
                detail_rows[idx] = stage.high.clone();
            } else {
                approx_rows[idx] = expand(&stage.low, &approx_rows[idx + 1]);
                detail_rows[idx] = expand(&stage.high, &approx_rows[idx + 1]);
            }
        }

        let mut c_phi: f64 = 1.0;
        for (idx, (a, d)) in approx_rows.iter().zip(&detail_rows).enumerate() {
            let factor = ((level - j0 - idx as u32) as f64 / 2.0).exp2();
            for row in a.iter().chain(d) {
                let peak = row.weights.iter().fold(0.0f64, |m, w| m.max(w.abs()));
                c_phi = c_phi.max(peak * factor);
            }
        }
        let function_bound = cascade_evaluate(moments, (level + 4).min(20))?.sup_bound();
        Ok(Self {
            moments,
            j0,
            level,
            stages,
            approx_rows,
            detail_rows,
            c_phi_estimate: c_phi,
            function_bound,
        })
    }

    pub fn moments(&self) -> usize {
        self.moments
    }

    pub fn j0(&self) -> u32 {
        self.j0
    }

    /// `J = log₂ n`.
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn n(&self) -> usize {
        1 << self.level
    }

    /// `max(1, max |α|, max |β|)` over every level of the system.
    pub fn c_phi_estimate(&self) -> f64 {
        self.c_phi_estimate
    }

    /// `max(sup |φ|, sup |ψ|)` for the interior Daubechies pair.
    pub fn function_bound(&self) -> f64 {
        self.function_bound
    }

    fn check_level(&self, j: u32, k: usize) -> Result<usize> {
        if j < self.j0 || j >= self.level || k >= (1usize << j) {
            return Err(Error::IndexOutOfRange { j, k });
        }
        Ok((j - self.j0) as usize)
    }

    /// Row of `W` (up to the factor `2^{(J−j)/2}`) for the scaling function `(j, k)`.
    pub fn approx_row(&self, j: u32, k: usize) -> Result<&SupportRow> {
        let idx = self.check_level(j, k)?;
        Ok(&self.approx_rows[idx][k])
    }

    /// Row of `W` for the wavelet `(j, k)`.
    pub fn detail_row(&self, j: u32, k: usize) -> Result<&SupportRow> {
        let idx = self.check_level(j, k)?;
        Ok(&self.detail_rows[idx][k])
    }

    /// Weights `(α, β)` with
    /// `c_{j,k} = 2^{−J+j/2} Σ_i α_i e_{i+1}` and the same with `β` for `d_{j,k}`.
    ///
    /// Each is returned over its full support (`start` is a 0-based sample
    /// index), which near the ends is wider than `2^{J−j}` samples.
    pub fn extract_weights(&self, j: u32, k: usize) -> Result<(SupportRow, SupportRow)> {
        let factor = ((self.level - j) as f64 / 2.0).exp2();
        Ok((
            self.approx_row(j, k)?.scaled(factor),
            self.detail_row(j, k)?.scaled(factor),
        ))
    }

    /// The dense `n × n` matrix `W`, row-major, rows ordered like
    /// [`CoefficientPyramid::flatten`].
    pub fn matrix(&self) -> Vec<f64> {
        let n = self.n();
        let mut out = vec![0.0; n * n];
        let rows = self.approx_rows[0].iter().chain(self.detail_rows.iter().flatten());
        for (r, row) in rows.enumerate() {
            out[r * n + row.start..r * n + row.end()].copy_from_slice(&row.weights);
        }
        out
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got,
            });
        }
        Ok(())
    }

    /// `W y / √n`, i.e. coefficients in the integral convention.
    pub fn forward(&self, samples: &SignalSamples) -> Result<CoefficientPyramid> {
        self.check_len(samples.len())?;
        let inv = 1.0 / (self.n() as f64).sqrt();
        let mut x: Vec<f64> = samples.values().to_vec();
        let mut details = Vec::with_capacity(self.stages.len());
        for stage in self.stages.iter().rev() {
            details.push(stage.high.iter().map(|r| r.apply(&x) * inv).collect::<Vec<_>>());
            x = stage.low.iter().map(|r| r.apply(&x)).collect();
        }
        details.reverse();
        let approx = x.into_iter().map(|v| v * inv).collect();
        CoefficientPyramid::new(self.j0, approx, details, false)
    }

    /// Inverse of [`forward`](Self::forward).
    pub fn inverse(&self, pyramid: &CoefficientPyramid) -> Result<SignalSamples> {
        self.check_len(pyramid.len())?;
        if pyramid.coarse_level() != self.j0 {
            return Err(Error::MalformedPyramid(format!(
                "pyramid stops at level {}, system at {}",
                pyramid.coarse_level(),
                self.j0
            )));
        }
        let p = pyramid.to_unscaled();
        let s = (self.n() as f64).sqrt();
        let mut x: Vec<f64> = p.approx().iter().map(|v| v * s).collect();
        for (stage, (_, d)) in self.stages.iter().zip(p.details()) {
            let mut next = vec![0.0; 2 * x.len()];
            for (row, c) in stage.low.iter().zip(&x) {
                row.add_scaled(*c, &mut next);
            }
            for (row, c) in stage.high.iter().zip(d) {
                row.add_scaled(c * s, &mut next);
            }
            x = next;
        }
        SignalSamples::new(x)
    }

    /// Cache file name for a system; the layout version is part of the name.
    pub fn cache_file_name(moments: usize, j0: u32, n: usize) -> String {
        format!("interval-v1-N{moments}-J0{j0}-n{n}.bin")
    }

    /// Writes `W` to `dir`: three little-endian `u64` (`N`, `J0`, `n`)
    /// followed by `n²` little-endian `f64`, row-major.
    pub fn save_matrix(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(Self::cache_file_name(self.moments, self.j0, self.n()));
        let mut bytes = Vec::with_capacity(24 + 8 * self.n() * self.n());
        for v in [self.moments as u64, self.j0 as u64, self.n() as u64] {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        for v in self.matrix() {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        let tmp = path.with_extension("bin.tmp");
        fs::File::create(&tmp)?.write_all(&bytes)?;
        fs::rename(&tmp, &path)?;
        Ok(path)
    }

    /// Reads a matrix written by [`save_matrix`](Self::save_matrix),
    /// returning `(N, J0, n, W)`.
    pub fn load_matrix(path: &Path) -> Result<(usize, u32, usize, Vec<f64>)> {
        let mut bytes = Vec::new();
        fs::File::open(path)?.read_to_end(&mut bytes)?;
        let word = |i: usize| -> Result<[u8; 8]> {
            bytes
                .get(8 * i..8 * i + 8)
                .map(|s| s.try_into().expect("slice of length 8"))
                .ok_or_else(|| Error::Parse(format!("{}: truncated header", path.display())))
        };
        let moments = u64::from_le_bytes(word(0)?) as usize;
        let j0 = u64::from_le_bytes(word(1)?) as u32;
        let n = u64::from_le_bytes(word(2)?) as usize;
        let expected = n
            .checked_mul(n)
            .and_then(|nn| nn.checked_mul(8))
            .and_then(|b| b.checked_add(24));
        if expected != Some(bytes.len()) {
            return Err(Error::Parse(format!("{}: size does not match n={n}", path.display())));
        }
        let matrix = bytes[24..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
            .collect();
        Ok((moments, j0, n, matrix))
    }
}

/// `W y / √n` for an interval system.
pub fn interval_dwt(samples: &SignalSamples, system: &IntervalSystem) -> Result<CoefficientPyramid> {
    system.forward(samples)
}

/// Inverse of [`interval_dwt`].
pub fn interval_idwt(pyramid: &CoefficientPyramid, system: &IntervalSystem) -> Result<SignalSamples> {
    system.inverse(pyramid)
}

impl WaveletTransform for IntervalSystem {
    fn forward(&self, samples: &SignalSamples) -> Result<CoefficientPyramid> {
        IntervalSystem::forward(self, samples)
    }

    fn inverse(&self, pyramid: &CoefficientPyramid) -> Result<SignalSamples> {
        IntervalSystem::inverse(self, pyramid)
    }

    fn coarse_level(&self) -> u32 {
        self.j0
    }

    fn sample_count(&self) -> Option<usize> {
        Some(self.n())
    }

    fn c_phi(&self) -> f64 {
        self.c_phi_estimate
    }

    fn system(&self) -> WaveletSystem {
        WaveletSystem::Interval { moments: self.moments }
    }
}
