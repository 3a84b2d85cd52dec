//! Daubechies minimum-phase filters with `N = 1..=5` vanishing moments.
//!
//! Normalized so that `Σ h_k = √2` and `Σ h_k² = 1`.

#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};

const DB1: [f64; 2] = [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2];

const DB2: [f64; 4] = [
    0.482_962_913_144_534_143_37,
    0.836_516_303_737_807_905_58,
    0.224_143_868_042_013_381_03,
    -0.129_409_522_551_260_381_17,
];

const DB3: [f64; 6] = [
    0.332_670_552_950_082_616,
    0.806_891_509_311_092_576_49,
    0.459_877_502_118_491_570_1,
    -0.135_011_020_010_254_588_7,
    -0.085_441_273_882_026_661_693,
    0.035_226_291_885_709_536_603,
];

const DB4: [f64; 8] = [
    0.230_377_813_308_896_500_86,
    0.714_846_570_552_915_647_09,
    0.630_880_767_929_858_907_88,
    -0.027_983_769_416_859_854_211,
    -0.187_034_811_719_093_084_08,
    0.030_841_381_835_560_763_627,
    0.032_883_011_666_885_199_735,
    -0.010_597_401_785_069_032_105,
];

const DB5: [f64; 10] = [
    0.160_102_397_974_192_914_48,
    0.603_829_269_797_189_670_54,
    0.724_308_528_437_772_927_73,
    0.138_428_145_901_320_731_51,
    -0.242_294_887_066_382_031_86,
    -0.032_244_869_584_638_374_648,
    0.077_571_493_840_045_713_523,
    -0.006_241_490_212_798_274_274_2,
    -0.012_580_751_999_081_999_469,
    0.003_335_725_285_473_771_278,
];

/// Low-pass filter `h_0, …, h_{2N−1}`.
pub fn scaling_filter(moments: usize) -> Result<&'static [f64]> {
    match moments {
        1 => Ok(&DB1),
        2 => Ok(&DB2),
        3 => Ok(&DB3),
        4 => Ok(&DB4),
        5 => Ok(&DB5),
        other => Err(Error::UnsupportedMoments(other)),
    }
}

/// High-pass filter `g_k = (−1)^k h_{2N−1−k}`.
pub fn wavelet_filter(moments: usize) -> Result<Vec<f64>> {
    let h = scaling_filter(moments)?;
    let last = h.len() - 1;
    Ok((0..h.len())
        .map(|k| if k % 2 == 0 { h[last - k] } else { -h[last - k] })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filters_are_orthonormal_with_vanishing_moments() {
        for n in 1..=5 {
            let h = scaling_filter(n).unwrap();
            let g = wavelet_filter(n).unwrap();
            assert_eq!(h.len(), 2 * n);
            assert!((h.iter().sum::<f64>() - std::f64::consts::SQRT_2).abs() < 1e-14);
            for shift in (0..h.len()).step_by(2) {
                let auto: f64 = (shift..h.len()).map(|k| h[k] * h[k - shift]).sum();
                let want = if shift == 0 { 1.0 } else { 0.0 };
                assert!((auto - want).abs() < 1e-14, "N={n} shift={shift}");
            }
            for p in 0..n as i32 {
                let moment: f64 = g.iter().enumerate().map(|(k, v)| v * (k as f64).powi(p)).sum();
                assert!(moment.abs() < 1e-10 * 10f64.powi(p), "N={n} p={p} moment={moment}");
            }
        }
        assert!(scaling_filter(6).is_err());
        assert!(scaling_filter(0).is_err());
    }

    #[test]
    fn db2_closed_form() {
        let s3 = 3f64.sqrt();
        let d = 4.0 * 2f64.sqrt();
        let exact = [(1.0 + s3) / d, (3.0 + s3) / d, (3.0 - s3) / d, (1.0 - s3) / d];
        for (a, b) in scaling_filter(2).unwrap().iter().zip(exact) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}
