//! Daubechies wavelets adapted to `[0, 1]`.

mod cascade;
mod filters;
mod linalg;
mod system;

pub use cascade::{cascade_evaluate, CascadeTable};
pub use filters::{scaling_filter, wavelet_filter};
pub use system::{interval_dwt, interval_idwt, IntervalSystem, SupportRow};
