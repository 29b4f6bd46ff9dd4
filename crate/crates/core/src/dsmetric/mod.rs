//! Multi-scale deviation-from-stochasticity statistics built on the
//! dissimilarity curve and on the peak-prominence sequence of the input.

mod pipeline;
mod scales;

pub use pipeline::{
    align_input, classify_stochastic, compute_ds, ds_from_curve, standardize_series, DsConfig, DsDiagnostics, DsResult,
    SkippedScale, StochasticityLabel, DEFAULT_THRESHOLD,
};
pub use scales::{
    bias_correct, cv1, cv2, kl_per_scale, prominence_cov, window_bias, BiasCorrectedCurve, KlSeries, ProminenceCov,
    ScaleGrid, ScaleSpan,
};
