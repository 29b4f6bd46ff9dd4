use std::fmt;

use serde::{Deserialize, Serialize};

use super::scales::{bias_correct, cv1, cv2, kl_per_scale, prominence_cov, KlSeries, ProminenceCov, ScaleGrid};
use crate::autoenc::{
    dissimilarity_curve, encode, init_model, loss, make_spectral_windows, train, AeConfig, DissimilarityCurve,
    WindowingConfig,
};
use crate::error::{Error, Result};
use crate::numkernel::{find_peaks, RealSeries};

pub const DEFAULT_THRESHOLD: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StochasticityLabel {
    Stochastic,
    NonStochastic,
}

impl fmt::Display for StochasticityLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Stochastic => "stochastic",
            Self::NonStochastic => "non-stochastic",
        })
    }
}

/// Stochastic iff `ds < threshold`; the boundary itself is non-stochastic.
pub fn classify_stochastic(ds: f64, threshold: f64) -> Result<StochasticityLabel> {
    if !ds.is_finite() {
        return Err(Error::NonFiniteInput { index: 0 });
    }
    Ok(if ds < threshold { StochasticityLabel::Stochastic } else { StochasticityLabel::NonStochastic })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DsConfig {
    pub windowing: WindowingConfig,
    pub ae: AeConfig,
    pub grid: ScaleGrid,
    pub threshold: f64,
}

impl Default for DsConfig {
    fn default() -> Self {
        Self {
            windowing: WindowingConfig::default(),
            ae: AeConfig::default(),
            grid: ScaleGrid::default(),
            threshold: DEFAULT_THRESHOLD,
        }
    }
}

/// A scale that contributed nothing, and why.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedScale {
    pub scale: usize,
    pub stage: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DsDiagnostics {
    pub windows: usize,
    pub peaks: usize,
    pub initial_loss: Option<f64>,
    pub final_loss: Option<f64>,
    pub skipped: Vec<SkippedScale>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DsResult {
    pub cv1: f64,
    pub cv2: f64,
    pub ds: f64,
    pub label: StochasticityLabel,
    pub kl_series: KlSeries,
    pub prominence_cov: ProminenceCov,
    /// Scales that produced a KL value.
    pub scales_used: ScaleGrid,
    pub diagnostics: DsDiagnostics,
    #[serde(skip)]
    pub dissimilarity: Option<DissimilarityCurve>,
}

/// Copy of `x` mapped affinely onto `[0, 1]`. Errors on a constant series.
pub fn standardize_series(x: &[f64]) -> Result<Vec<f64>> {
    let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi - lo >= 1e-12) {
        return Err(Error::ConstantInput);
    }
    Ok(x.iter().map(|v| (v - lo) / (hi - lo)).collect())
}

/// The input samples aligned with the dissimilarity curve: `len(d)` samples
/// starting at offset `window_len - 1`.
pub fn align_input<'a>(x: &'a [f64], d_len: usize, windowing: &WindowingConfig) -> Result<&'a [f64]> {
    let start = windowing.window_len - 1;
    if start + d_len > x.len() {
        return Err(Error::LengthMismatch { left: x.len(), right: start + d_len });
    }
    Ok(&x[start..start + d_len])
}

/// The full DS computation for one series.
///
/// The series is rescaled onto `[0, 1]` first, so the result does not depend
/// on its amplitude or offset, and the window means added to the curve live
/// on the same scale as the curve itself.
pub fn compute_ds(x: &RealSeries, cfg: &DsConfig) -> Result<DsResult> {
    let xs = standardize_series(x)?;
    let windows = make_spectral_windows(&xs, &cfg.windowing)?.standardized();
    let model = init_model(&cfg.ae, windows.dim())?;
    let (model, log) = train(&model, &windows, &cfg.ae)?;
    let final_loss = loss(&model, &windows, cfg.ae.invariance_weight)?.total;
    let d = dissimilarity_curve(&encode(&model, &windows)?)?;

    let mut result = ds_from_curve(&xs, &d, cfg)?;
    result.diagnostics.windows = windows.len();
    result.diagnostics.initial_loss = log.total.first().copied();
    result.diagnostics.final_loss = Some(final_loss);
    result.dissimilarity = Some(d);
    Ok(result)
}

/// DS from an already standardized series and its dissimilarity curve.
pub fn ds_from_curve(xs: &[f64], d: &DissimilarityCurve, cfg: &DsConfig) -> Result<DsResult> {
    let x_aligned = align_input(xs, d.len(), &cfg.windowing)?;
    let mut diagnostics = DsDiagnostics::default();

    let mut kl = KlSeries::default();
    for &w in cfg.grid.sizes() {
        let z = bias_correct(d.values(), x_aligned, w).and_then(|dt| kl_per_scale(x_aligned, &dt));
        match z {
            Ok(z) => {
                kl.0.insert(w, z);
            }
            Err(e @ (Error::CurveShorterThanScale { .. } | Error::ConstantSeries { .. })) => {
                diagnostics.skipped.push(SkippedScale { scale: w, stage: "kl".into(), reason: e.to_string() });
            }
            Err(e) => return Err(e),
        }
    }
    let cv1 = cv1(&kl)?;

    let peaks = find_peaks(xs)?;
    diagnostics.peaks = peaks.len();
    for &w in cfg.grid.sizes() {
        if w > peaks.len() {
            diagnostics.skipped.push(SkippedScale {
                scale: w,
                stage: "prominence".into(),
                reason: format!("only {} peaks", peaks.len()),
            });
        }
    }
    let pc = prominence_cov(&peaks.prominences, &cfg.grid)?;
    let cv2 = cv2(&pc)?;

    let ds = cv1 * cv2 / 100.0;
    let scales_used = ScaleGrid::from_sizes(kl.scales())?;
    Ok(DsResult {
        cv1,
        cv2,
        ds,
        label: classify_stochastic(ds, cfg.threshold)?,
        kl_series: kl,
        prominence_cov: pc,
        scales_used,
        diagnostics,
        dissimilarity: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_convention() {
        assert_eq!(classify_stochastic(1.49, 1.5).unwrap(), StochasticityLabel::Stochastic);
        assert_eq!(classify_stochastic(1.51, 1.5).unwrap(), StochasticityLabel::NonStochastic);
        assert_eq!(classify_stochastic(1.5, 1.5).unwrap(), StochasticityLabel::NonStochastic);
        assert!(classify_stochastic(f64::NAN, 1.5).is_err());
        assert!(classify_stochastic(f64::INFINITY, 1.5).is_err());
    }

    #[test]
    fn constant_input_is_rejected() {
        let x = RealSeries::new(vec![4.2; 200]).unwrap();
        assert!(matches!(compute_ds(&x, &DsConfig::default()), Err(Error::ConstantInput)));
    }

    #[test]
    fn label_serializes_kebab() {
        assert_eq!(serde_json::to_string(&StochasticityLabel::NonStochastic).unwrap(), "\"non-stochastic\"");
    }
}
