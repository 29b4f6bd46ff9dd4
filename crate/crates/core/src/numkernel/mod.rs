//! Deterministic numeric primitives: DFT, descriptive statistics, discrete
//! KL divergence, and peak detection with topographic prominence.
//!
//! Everything here is a pure function of its inputs.

mod dft;
mod peaks;
mod series;
mod stats;

pub use dft::{crop_modulus, dft, dft_direct, fft_radix2, idft, Spectrum};
pub use peaks::{find_peaks, peak_prominence, PeakList};
pub use series::RealSeries;
pub use stats::{
    coefficient_of_variation, kl_divergence, mean, normalize_to_distribution, population_std, ProbVector, KL_EPSILON,
};
