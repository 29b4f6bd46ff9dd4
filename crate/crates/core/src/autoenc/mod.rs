//! Spectral window features, a small tanh autoencoder trained with a
//! reconstruction plus time-invariance loss, and the dissimilarity curve
//! between consecutive learned features.

mod model;
mod train;
mod windows;

pub use model::{init_model, AeConfig, AeModel};
pub use train::{
    dissimilarity_curve, encode, loss, loss_and_gradient, reconstruct, train, DissimilarityCurve, LatentTrace,
    LossParts, TrainLog,
};
pub use windows::{make_spectral_windows, SpectralWindowSet, WindowingConfig};
