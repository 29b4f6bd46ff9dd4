//! Deviation-from-stochasticity (DS) measure for univariate time series and a
//! two-cohort classification harness built on per-ROI DS features.
//!
//! The DS pipeline learns spectral window features with a small autoencoder,
//! turns them into a dissimilarity curve, and combines a multi-scale KL
//! divergence statistic (`cv1`) with a multi-scale peak-prominence statistic
//! (`cv2`) into `ds = cv1 * cv2 / 100`. Values below 1.5 read as stochastic.

pub mod autoenc;
pub mod dsmetric;
pub mod error;
pub mod ingest;
pub mod mlharness;
pub mod numkernel;
pub mod project;
pub mod synthsig;

pub use error::{Error, Result};
