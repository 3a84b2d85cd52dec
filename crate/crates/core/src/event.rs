//! The good event `A`: every noise block sum stays below its
//! Hoeffding-scale bound, which forces every noise coefficient below
//! `b C_φ √(log₂ n / n)`.

use crate::error::{Error, Result};
use crate::haar::haar_dwt;
use crate::interval::IntervalSystem;
use crate::pyramid::CoefficientPyramid;
use crate::samples::SignalSamples;

/// The wavelet system whose block structure defines `A`.
#[derive(Debug, Clone, Copy)]
pub enum SystemRef<'a> {
    Haar,
    Interval(&'a IntervalSystem),
}

/// Membership in `A` and the block closest to violating it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventAReport {
    pub member: bool,
    /// `(ℓ, k)` of the largest `|block sum| / bound`.
    pub worst_block: Option<(i32, usize)>,
    /// That largest ratio; `member` iff `margin <= 1`.
    pub margin: f64,
}

/// `P(|S_m − E S_m| < t) >= 1 − exp(−2t² / (m (hi − lo)²))` for a sum of `m`
/// independent variables in `[lo, hi]`; returns the right-hand side.
pub fn hoeffding_bound(m: usize, t: f64, lo: f64, hi: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidParameter("Hoeffding bound needs m >= 1".into()));
    }
    if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidParameter(format!("invalid range [{lo}, {hi}]")));
    }
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("t must be > 0, got {t}")));
    }
    let width = hi - lo;
    Ok(-(-2.0 * t * t / (m as f64 * width * width)).exp_m1())
}

/// `(J, log₂ J)` when `J ∈ {4, 8, 16}`.
fn event_geometry(n: usize) -> Result<(u32, u32)> {
    let level = crate::samples::dyadic_level(n)?;
    match level {
        4 | 8 | 16 => Ok((level, level.trailing_zeros())),
        _ => Err(Error::UnsupportedGeometry(format!(
            "the block structure of A needs J in {{4, 8, 16}} (n in {{16, 256, 65536}}), got n={n}"
        ))),
    }
}

fn ratio(sum: f64, bound: f64) -> f64 {
    if bound > 0.0 {
        sum.abs() / bound
    } else if sum == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Decides whether `noise` (range `b`) lies in `A` for the given system.
///
/// For Haar the block `(ℓ, k)` sums the `J 2^{ℓ−1}` samples starting at
/// index `k 2^ℓ J`; for interval systems the `J 2^ℓ` samples of the block are
/// weighted by the scaling (`α`) and wavelet (`β`) weights of level
/// `J − log₂ J − ℓ`, and levels outside `[J0, J)` are skipped. Both use the
/// bound `b J 2^{ℓ/2} √(ln 2 / 2)`.
pub fn in_event_a(noise: &SignalSamples, b: f64, system: SystemRef<'_>) -> Result<EventAReport> {
    let (level, log_level) = event_geometry(noise.len())?;
    if let SystemRef::Interval(sys) = system {
        if sys.n() != noise.len() {
            return Err(Error::DimensionMismatch {
                expected: sys.n(),
                got: noise.len(),
            });
        }
    }
    let e = noise.values();
    let jf = level as f64;
    let top = (level - log_level) as i32;
    let mut report = EventAReport {
        member: true,
        worst_block: None,
        margin: 0.0,
    };
    let mut consider = |r: f64, l: i32, k: usize| {
        if r > report.margin || report.worst_block.is_none() {
            report.margin = report.margin.max(r);
            report.worst_block = Some((l, k));
        }
    };
    for l in -1..=top {
        let bound = b * jf * (l as f64 / 2.0).exp2() * (std::f64::consts::LN_2 / 2.0).sqrt();
        let stride = (level as usize) << (l + 1) >> 1;
        let blocks = 1usize << (top - l);
        match system {
            SystemRef::Haar => {
                let len = stride / 2;
                for k in 0..blocks {
                    let start = k * stride;
                    let sum: f64 = e[start..start + len].iter().sum();
                    consider(ratio(sum, bound), l, k);
                }
            }
            SystemRef::Interval(sys) => {
                let j = (top - l) as u32;
                if j < sys.j0() || j >= level {
                    continue;
                }
                for k in 0..blocks {
                    let (alpha, beta) = sys.extract_weights(j, k)?;
                    let start = k * stride;
                    for row in [&alpha, &beta] {
                        let sum: f64 = (start..start + stride).map(|i| row.get(i) * e[i]).sum();
                        consider(ratio(sum, bound), l, k);
                    }
                }
            }
        }
    }
    report.member = report.margin <= 1.0;
    Ok(report)
}

fn noise_pyramid(noise: &SignalSamples, system: SystemRef<'_>) -> Result<(CoefficientPyramid, f64)> {
    match system {
        SystemRef::Haar => Ok((haar_dwt(noise, 0)?, 1.0)),
        SystemRef::Interval(sys) => Ok((sys.forward(noise)?, sys.c_phi_estimate())),
    }
}

/// Largest `|c|` or `|d|` of the noise divided by `b C_φ √(log₂ n / n)`.
pub fn noise_coeff_ratio(noise: &SignalSamples, b: f64, system: SystemRef<'_>) -> Result<f64> {
    let (p, c_phi) = noise_pyramid(noise, system)?;
    let n = noise.len() as f64;
    let bound = b * c_phi * (noise.level() as f64 / n).sqrt();
    let worst = p.flatten().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(ratio(worst, bound))
}

/// Whether every noise coefficient (details at all levels and the
/// approximation block at `J0`) obeys `|·| <= b C_φ √(log₂ n / n)`.
pub fn noise_coeff_bound_check(noise: &SignalSamples, b: f64, system: SystemRef<'_>) -> Result<bool> {
    Ok(noise_coeff_ratio(noise, b, system)? <= 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hoeffding_values() {
        let p = hoeffding_bound(100, 10.0, -0.5, 0.5).unwrap();
        assert!((p - 0.864_664_716_763_387_3).abs() < 1e-15);
        assert!(hoeffding_bound(100, 1e-9, -0.5, 0.5).unwrap() < 1e-15);
        assert!(hoeffding_bound(0, 1.0, 0.0, 1.0).is_err());
        assert!(hoeffding_bound(5, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn hoeffding_with_block_parameters_gives_one_minus_one_over_n() {
        let b = 1.0;
        for level in [4u32, 8, 16] {
            let jf = level as f64;
            for l in -1..=(level - level.trailing_zeros()) as i32 {
                let m = (level as usize) << (l + 1) >> 1;
                let t = b * (l as f64 / 2.0).exp2() * jf * (std::f64::consts::LN_2 / 2.0).sqrt();
                let p = hoeffding_bound(m, t, -b / 2.0, b / 2.0).unwrap();
                assert!((p - (1.0 - (-jf).exp2())).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_noise_is_a_member() {
        let r = in_event_a(&SignalSamples::zeros(256).unwrap(), 1.0, SystemRef::Haar).unwrap();
        assert!(r.member);
        assert_eq!(r.margin, 0.0);
        assert!(noise_coeff_bound_check(&SignalSamples::zeros(256).unwrap(), 1.0, SystemRef::Haar).unwrap());
    }

    #[test]
    fn constant_noise_is_not_a_member() {
        let e = SignalSamples::new(vec![0.5; 256]).unwrap();
        let r = in_event_a(&e, 1.0, SystemRef::Haar).unwrap();
        assert!(!r.member);
        // Largest block: ℓ = J − log J = 5, 128 terms of 1/2 against 8·2^{5/2}·√(ln2/2).
        let expected = 64.0 / (8.0 * 2f64.powf(2.5) * (std::f64::consts::LN_2 / 2.0).sqrt());
        assert_eq!(r.worst_block, Some((5, 0)));
        assert!((r.margin - expected).abs() < 1e-12);
    }

    #[test]
    fn unsupported_lengths_are_rejected() {
        for n in [8usize, 32, 512, 1024] {
            let e = SignalSamples::zeros(n).unwrap();
            assert!(matches!(
                in_event_a(&e, 1.0, SystemRef::Haar),
                Err(Error::UnsupportedGeometry(_))
            ));
        }
    }

    #[test]
    fn single_moment_interval_blocks_match_haar_detail_blocks() {
        // With N = 1 the detail weights are ±1 over the full block, so the
        // interval variant sees the signed half-block differences.
        let sys = IntervalSystem::build(1, 16, 1).unwrap();
        let e = SignalSamples::new((0..16).map(|i| if i % 3 == 0 { 0.5 } else { -0.25 }).collect()).unwrap();
        let r = in_event_a(&e, 1.0, SystemRef::Interval(&sys)).unwrap();
        assert!(r.margin.is_finite() && r.margin > 0.0);
    }
}
