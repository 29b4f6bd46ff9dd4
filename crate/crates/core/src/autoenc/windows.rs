use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkernel::{crop_modulus, dft, mean, population_std};

const STD_FLOOR: f64 = 1e-8;

/// How a series is cut into windows before the spectral transform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowingConfig {
    pub window_len: usize,
    pub stride: usize,
    pub crop_len: usize,
}

impl WindowingConfig {
    /// `crop_len` defaults to the non-redundant half spectrum.
    pub fn new(window_len: usize, stride: usize) -> Self {
        Self { window_len, stride, crop_len: window_len / 2 + 1 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.window_len == 0 || self.stride == 0 || self.crop_len == 0 {
            return Err(Error::InvalidConfig("window_len, stride and crop_len must be positive".into()));
        }
        if self.crop_len > self.window_len {
            return Err(Error::InvalidConfig(format!(
                "crop_len {} exceeds window_len {}",
                self.crop_len, self.window_len
            )));
        }
        if self.stride > self.window_len {
            return Err(Error::InvalidConfig(format!("stride {} exceeds window_len {}", self.stride, self.window_len)));
        }
        Ok(())
    }
}

impl Default for WindowingConfig {
    fn default() -> Self {
        Self::new(20, 1)
    }
}

/// Cropped DFT moduli of consecutive windows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralWindowSet {
    pub features: Vec<Vec<f64>>,
    pub source_offsets: Vec<usize>,
}

impl SpectralWindowSet {
    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    /// Feature vector length (0 for an empty set).
    pub fn dim(&self) -> usize {
        self.features.first().map_or(0, Vec::len)
    }

    /// Per-feature z-scoring across windows, population std floored at 1e-8.
    pub fn standardized(&self) -> Self {
        let dim = self.dim();
        let mut features = self.features.clone();
        for j in 0..dim {
            let column: Vec<f64> = self.features.iter().map(|f| f[j]).collect();
            let m = mean(&column);
            let s = population_std(&column).max(STD_FLOOR);
            for f in &mut features {
                f[j] = (f[j] - m) / s;
            }
        }
        Self { features, source_offsets: self.source_offsets.clone() }
    }
}

/// Windows at offsets `0, stride, 2*stride, ...`, each mapped through the DFT
/// and cropped to `crop_len` moduli.
pub fn make_spectral_windows(x: &[f64], cfg: &WindowingConfig) -> Result<SpectralWindowSet> {
    cfg.validate()?;
    let needed = cfg.window_len + cfg.stride;
    if x.len() < needed {
        return Err(Error::SeriesTooShort { len: x.len(), needed });
    }
    let mut features = Vec::new();
    let mut source_offsets = Vec::new();
    let mut offset = 0;
    while offset + cfg.window_len <= x.len() {
        let spectrum = dft(&x[offset..offset + cfg.window_len])?;
        features.push(crop_modulus(&spectrum, cfg.crop_len)?);
        source_offsets.push(offset);
        offset += cfg.stride;
    }
    Ok(SpectralWindowSet { features, source_offsets })
}
