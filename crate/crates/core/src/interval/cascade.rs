//! Daubechies scaling function and wavelet on a dyadic grid.
//!
//! Values at the integers come from the eigenvector of the refinement
//! operator; every finer dyadic point then follows exactly from
//! `φ(x) = √2 Σ h_k φ(2x − k)`.

use super::filters::{scaling_filter, wavelet_filter};
use super::linalg::solve;
use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 24;

/// `φ` and `ψ` tabulated at `x = i 2^{-depth}`, `0 <= x <= 2N − 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadeTable {
    moments: usize,
    depth: u32,
    phi: Vec<f64>,
    psi: Vec<f64>,
}

/// Tabulates the Daubechies-`N` scaling function and wavelet.
///
/// `N = 1` gives the Haar pair with `φ = 1` on `(0, 1]`.
pub fn cascade_evaluate(moments: usize, depth: u32) -> Result<CascadeTable> {
    let h = scaling_filter(moments)?;
    if depth > MAX_DEPTH {
        return Err(Error::InvalidParameter(format!(
            "cascade depth {depth} exceeds {MAX_DEPTH}"
        )));
    }
    let scale = 1usize << depth;
    let support = 2 * moments - 1;
    let len = support * scale + 1;
    let mut phi = vec![0.0; len];
    if moments == 1 {
        phi[1..].fill(1.0);
    } else {
        for (x, v) in integer_values(h)?.into_iter().enumerate() {
            phi[(x + 1) * scale] = v;
        }
        for r in 1..=depth {
            let stride = scale >> r;
            for idx in (stride..len).step_by(2 * stride) {
                phi[idx] = refine_at(h, &phi, idx, scale);
            }
        }
    }
    let g = wavelet_filter(moments)?;
    let psi = (0..len).map(|idx| refine_at(&g, &phi, idx, scale)).collect();
    Ok(CascadeTable {
        moments,
        depth,
        phi,
        psi,
    })
}

/// `√2 Σ_k f_k φ(2x − k)` at `x = idx / scale`.
fn refine_at(filter: &[f64], phi: &[f64], idx: usize, scale: usize) -> f64 {
    let mut acc = 0.0;
    for (k, fk) in filter.iter().enumerate() {
        if let Some(pos) = (2 * idx).checked_sub(k * scale) {
            if let Some(v) = phi.get(pos) {
                acc += fk * v;
            }
        }
    }
    std::f64::consts::SQRT_2 * acc
}

/// `φ(1), …, φ(2N − 2)`: the eigenvector of `M[x][y] = √2 h_{2x−y}` for
/// eigenvalue 1, normalized to sum 1.
fn integer_values(h: &[f64]) -> Result<Vec<f64>> {
    let k = h.len() - 2;
    let entry = |x: usize, y: usize| {
        let idx = 2 * x as isize - y as isize;
        if (0..h.len() as isize).contains(&idx) {
            std::f64::consts::SQRT_2 * h[idx as usize]
        } else {
            0.0
        }
    };
    // Least squares on [M − I; 1ᵀ] v = [0; 1] through the normal equations.
    let mut rows: Vec<Vec<f64>> = (1..=k)
        .map(|x| (1..=k).map(|y| entry(x, y) - if x == y { 1.0 } else { 0.0 }).collect())
        .collect();
    rows.push(vec![1.0; k]);
    let mut rhs = vec![0.0; k];
    rhs.push(1.0);
    let normal: Vec<Vec<f64>> = (0..k)
        .map(|a| (0..k).map(|b| rows.iter().map(|r| r[a] * r[b]).sum()).collect())
        .collect();
    let target: Vec<f64> = (0..k)
        .map(|a| rows.iter().zip(&rhs).map(|(r, t)| r[a] * t).sum())
        .collect();
    solve(normal, target).ok_or_else(|| Error::InvalidParameter("refinement eigenproblem is singular".into()))
}

impl CascadeTable {
    pub fn moments(&self) -> usize {
        self.moments
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// Grid spacing `2^{-depth}`.
    pub fn step(&self) -> f64 {
        (-(self.depth as f64)).exp2()
    }

    /// Abscissa of grid index `i`.
    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.step()
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn psi(&self) -> &[f64] {
        &self.psi
    }

    /// `Σ_i φ(x_i) 2^{-depth}` over the grid.
    pub fn integral_phi(&self) -> f64 {
        self.phi.iter().sum::<f64>() * self.step()
    }

    /// `Σ_i x_i^p ψ(x_i) 2^{-depth}` over the grid.
    pub fn psi_moment(&self, p: u32) -> f64 {
        self.psi
            .iter()
            .enumerate()
            .map(|(i, v)| self.x(i).powi(p as i32) * v)
            .sum::<f64>()
            * self.step()
    }

    /// `max |φ|` and `max |ψ|` over the grid.
    pub fn sup_bound(&self) -> f64 {
        self.phi.iter().chain(&self.psi).fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest violation of the refinement equation over grid points whose
    /// refinement stays on the grid.
    pub fn refinement_residual(&self) -> f64 {
        let h = scaling_filter(self.moments).expect("table built from a supported filter");
        let scale = 1usize << self.depth;
        (0..self.phi.len())
            .step_by(2)
            .map(|idx| (self.phi[idx] - refine_at(h, &self.phi, idx, scale)).abs())
            .fold(0.0, f64::max)
    }
}
