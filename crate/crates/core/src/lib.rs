//! Wavelet shrinkage for signals observed under bounded, zero-mean,
//! independent noise.
//!
//! The crate covers the whole estimator and the tooling around it:
//!
//! * [`haar`] and [`interval`]: orthogonal wavelet transforms on `[0, 1]`
//!   (a fast Haar pyramid and a boundary-adapted Daubechies system with `N`
//!   vanishing moments, built as an explicit orthogonal matrix).
//! * [`threshold`] and [`shrink`]: soft/hard thresholding, the threshold
//!   `λ = C_φ b (1 + 2√((1+δ) ln 2)) √(log₂ n / n)`, level selection, and the
//!   transform → threshold → inverse pipeline.
//! * [`signals`], [`noise`] and [`event`]: Hölder-class test signals with
//!   membership certificates, bounded noise generators, and the block-sum
//!   event that controls every noise coefficient.
//! * [`experiments`]: a seeded Monte Carlo harness whose trials run in
//!   parallel (feature `parallel`, on by default) and reproduce bit-for-bit.
//!
//! Sample vectors always have length `n = 2^J` and sit on the grid `i/n`,
//! `i = 1..=n`.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod csv_io;
pub mod error;
pub mod event;
pub mod experiments;
pub mod haar;
pub mod interval;
pub mod noise;
pub mod pyramid;
pub mod samples;
pub mod shrink;
pub mod signals;
pub mod threshold;
pub mod verify;

pub use error::{Error, Result};
pub use event::{hoeffding_bound, in_event_a, noise_coeff_bound_check, noise_coeff_ratio, EventAReport, SystemRef};
pub use haar::{haar_coeff_closed_form, haar_dwt, haar_idwt, CoeffKind};
pub use interval::{cascade_evaluate, interval_dwt, interval_idwt, CascadeTable, IntervalSystem, SupportRow};
pub use noise::{sample_noise, NoiseFamily, NoiseSpec};
pub use pyramid::CoefficientPyramid;
pub use samples::SignalSamples;
pub use shrink::{
    shrink, shrink_with, HaarTransform, ShrinkageConfig, ShrinkageParams, WaveletSystem, WaveletTransform,
};
pub use signals::{check_holder, make_signal, HolderCheck, HolderSignal, SignalKind};
pub use threshold::{
    apply_threshold, coarse_level_for_moments, compute_levels, compute_threshold, hard_threshold, min_samples,
    soft_threshold, Levels, MinSamples, ThresholdMode,
};
