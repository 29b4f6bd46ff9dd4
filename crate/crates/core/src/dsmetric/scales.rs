use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkernel::{coefficient_of_variation, kl_divergence, mean, normalize_to_distribution, KL_EPSILON};

/// Strictly increasing window sizes used for the multi-scale statistics.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct ScaleGrid(Vec<usize>);

impl ScaleGrid {
    /// `min, min + step, ...` up to and including `max` when reachable.
    pub fn new(min: usize, step: usize, max: usize) -> Result<Self> {
        if min < 2 || step < 1 {
            return Err(Error::InvalidConfig(format!(
                "scale grid needs min >= 2 and step >= 1, got min={min} step={step}"
            )));
        }
        if max < min {
            return Err(Error::EmptyGrid);
        }
        Ok(Self((min..=max).step_by(step).collect()))
    }

    pub fn from_sizes(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::EmptyGrid);
        }
        if sizes[0] < 2 {
            return Err(Error::InvalidConfig("scales must be at least 2".into()));
        }
        if sizes.windows(2).any(|p| p[1] <= p[0]) {
            return Err(Error::InvalidConfig("scales must be strictly increasing".into()));
        }
        Ok(Self(sizes))
    }

    pub fn sizes(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min(&self) -> usize {
        self.0[0]
    }
}

impl Default for ScaleGrid {
    /// Odd windows 5 through 49.
    fn default() -> Self {
        Self::new(5, 2, 50).expect("default grid is valid")
    }
}

impl TryFrom<Vec<usize>> for ScaleGrid {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::from_sizes(v)
    }
}

impl From<ScaleGrid> for Vec<usize> {
    fn from(g: ScaleGrid) -> Self {
        g.0
    }
}

/// Mean of `x[t - w + 1 ..= t]`.
pub fn window_bias(x: &[f64], t: usize, w: usize) -> Result<f64> {
    if w == 0 || t + 1 < w || t >= x.len() {
        return Err(Error::WindowOutOfRange { t, w, len: x.len() });
    }
    Ok(mean(&x[t + 1 - w..=t]))
}

/// Dissimilarity curve shifted block-wise by the window mean of the aligned
/// input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasCorrectedCurve {
    pub values: Vec<f64>,
    pub scale: usize,
}

/// Non-overlapping blocks of width `w`; block `b` ends at `t = (b+1)w - 1`
/// and every entry in it gets `window_bias(x_aligned, t, w)` added. A trailing
/// partial block is dropped.
pub fn bias_correct(d: &[f64], x_aligned: &[f64], w: usize) -> Result<BiasCorrectedCurve> {
    if w == 0 || d.len() < w {
        return Err(Error::CurveShorterThanScale { len: d.len(), scale: w });
    }
    if x_aligned.len() != d.len() {
        return Err(Error::LengthMismatch { left: d.len(), right: x_aligned.len() });
    }
    let blocks = d.len() / w;
    let mut values = Vec::with_capacity(blocks * w);
    for b in 0..blocks {
        let t = (b + 1) * w - 1;
        let bias = window_bias(x_aligned, t, w)?;
        values.extend(d[b * w..=t].iter().map(|v| v + bias));
    }
    Ok(BiasCorrectedCurve { values, scale: w })
}

/// KL divergence from the normalised aligned input to the normalised
/// bias-corrected curve; the input is truncated to the curve's length.
pub fn kl_per_scale(x_aligned: &[f64], d_tilde: &BiasCorrectedCurve) -> Result<f64> {
    let n = d_tilde.values.len();
    if x_aligned.len() < n {
        return Err(Error::LengthMismatch { left: x_aligned.len(), right: n });
    }
    let p = normalize_to_distribution(&x_aligned[..n], KL_EPSILON)?;
    let q = normalize_to_distribution(&d_tilde.values, KL_EPSILON)?;
    kl_divergence(&p, &q)
}

/// Per-scale KL values, keyed by window size.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct KlSeries(pub BTreeMap<usize, f64>);

impl KlSeries {
    pub fn values(&self) -> Vec<f64> {
        self.0.values().copied().collect()
    }

    pub fn scales(&self) -> Vec<usize> {
        self.0.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Coefficient of variation of the KL values across scales.
pub fn cv1(zs: &KlSeries) -> Result<f64> {
    if zs.len() < 2 {
        return Err(Error::InsufficientScales { got: zs.len() });
    }
    coefficient_of_variation(&zs.values())
}

/// Which slice of the pooled array came from which scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaleSpan {
    pub scale: usize,
    pub start: usize,
    pub end: usize,
}

/// Windowed prominence CVs pooled across scales.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ProminenceCov {
    pub values: Vec<f64>,
    pub spans: Vec<ScaleSpan>,
}

impl ProminenceCov {
    pub fn for_scale(&self, scale: usize) -> Option<&[f64]> {
        self.spans.iter().find(|s| s.scale == scale).map(|s| &self.values[s.start..s.end])
    }
}

/// For each scale no longer than the prominence sequence: CV of every
/// non-overlapping window of that width, in time order.
pub fn prominence_cov(prominences: &[f64], grid: &ScaleGrid) -> Result<ProminenceCov> {
    let mut out = ProminenceCov::default();
    for &w in grid.sizes() {
        if w > prominences.len() {
            continue;
        }
        let start = out.values.len();
        for chunk in prominences.chunks_exact(w) {
            out.values.push(coefficient_of_variation(chunk)?);
        }
        out.spans.push(ScaleSpan { scale: w, start, end: out.values.len() });
    }
    if out.spans.is_empty() {
        return Err(Error::NoUsableScales { count: prominences.len() });
    }
    Ok(out)
}

impl ProminenceCov {
    /// Mean COV of each scale, in grid order.
    pub fn scale_means(&self) -> Vec<f64> {
        self.spans.iter().filter(|s| s.end > s.start).map(|s| mean(&self.values[s.start..s.end])).collect()
    }
}

/// Coefficient of variation across scales of the per-scale mean COV.
///
/// Each scale contributes one value regardless of how many windows it has,
/// so the many small windows of the finest scales do not swamp the result.
pub fn cv2(pc: &ProminenceCov) -> Result<f64> {
    coefficient_of_variation(&pc.scale_means())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_examples() {
        let g = ScaleGrid::default();
        assert_eq!(g.len(), 23);
        assert_eq!(g.sizes()[0], 5);
        assert_eq!(*g.sizes().last().unwrap(), 49);
        assert!(g.sizes().iter().all(|s| s % 2 == 1));
        assert_eq!(ScaleGrid::new(5, 2, 5).unwrap().sizes(), &[5]);
        assert!(matches!(ScaleGrid::new(6, 2, 5), Err(Error::EmptyGrid)));
        assert!(ScaleGrid::new(1, 2, 5).is_err());
        assert!(ScaleGrid::from_sizes(vec![5, 5]).is_err());
    }

    #[test]
    fn grid_serde_validates() {
        let g: ScaleGrid = serde_json::from_str("[5,7,9]").unwrap();
        assert_eq!(g.sizes(), &[5, 7, 9]);
        assert!(serde_json::from_str::<ScaleGrid>("[9,7]").is_err());
    }

    #[test]
    fn bias_examples() {
        assert_eq!(window_bias(&[1.0, 2.0, 3.0], 2, 3).unwrap(), 2.0);
        assert_eq!(window_bias(&[4.0; 10], 7, 5).unwrap(), 4.0);
        assert!(matches!(window_bias(&[1.0, 2.0], 0, 2), Err(Error::WindowOutOfRange { .. })));
        assert!(window_bias(&[1.0, 2.0], 2, 1).is_err());
    }

    #[test]
    fn bias_correct_examples() {
        let c = bias_correct(&[1.0; 4], &[2.0; 4], 2).unwrap();
        assert_eq!(c.values, vec![3.0; 4]);
        let c = bias_correct(&[1.0, 2.0, 3.0], &[-1.0, 1.0, 5.0], 2).unwrap();
        assert_eq!(c.values, vec![1.0, 2.0]);
        assert!(matches!(
            bias_correct(&[1.0; 3], &[1.0; 3], 4),
            Err(Error::CurveShorterThanScale { len: 3, scale: 4 })
        ));
    }

    #[test]
    fn kl_of_affine_copy_is_zero() {
        let x = [0.3, -1.0, 2.0, 0.5, 1.5, -0.2];
        let d = BiasCorrectedCurve { values: x.iter().map(|v| 3.0 * v + 7.0).collect(), scale: 2 };
        assert!(kl_per_scale(&x, &d).unwrap().abs() < 1e-9);
        let flat = BiasCorrectedCurve { values: vec![1.0; 6], scale: 2 };
        assert!(matches!(kl_per_scale(&x, &flat), Err(Error::ConstantSeries { .. })));
    }

    #[test]
    fn cv1_examples() {
        let same = KlSeries([(5, 0.2), (7, 0.2), (9, 0.2)].into_iter().collect());
        assert!(cv1(&same).unwrap().abs() < 1e-12);
        let two = KlSeries([(5, 1.0), (7, 3.0)].into_iter().collect());
        assert!((cv1(&two).unwrap() - 50.0).abs() < 1e-12);
        let one = KlSeries([(5, 1.0)].into_iter().collect());
        assert!(matches!(cv1(&one), Err(Error::InsufficientScales { got: 1 })));
    }

    #[test]
    fn prominence_cov_examples() {
        let grid = ScaleGrid::new(5, 2, 50).unwrap();
        let pc = prominence_cov(&[2.0; 12], &grid).unwrap();
        assert!(pc.values.iter().all(|&v| v == 0.0));

        let ten: Vec<f64> = (1..=10).map(f64::from).collect();
        let pc = prominence_cov(&ten, &grid).unwrap();
        assert_eq!(pc.for_scale(5).unwrap().len(), 2);
        assert_eq!(pc.for_scale(7).unwrap().len(), 1);
        assert!(pc.for_scale(11).is_none());

        assert!(matches!(prominence_cov(&[1.0; 4], &grid), Err(Error::NoUsableScales { count: 4 })));
    }

    #[test]
    fn cv2_examples() {
        let span = |scale, start, end| ScaleSpan { scale, start, end };
        let pc = ProminenceCov { values: vec![7.0; 4], spans: vec![span(5, 0, 3), span(7, 3, 4)] };
        assert_eq!(cv2(&pc).unwrap(), 0.0);
        let pc = ProminenceCov { values: vec![10.0, 30.0], spans: vec![span(5, 0, 1), span(7, 1, 2)] };
        assert!((cv2(&pc).unwrap() - 50.0).abs() < 1e-12);
        // Three windows at 20 and one at 40 weigh the same as one of each.
        let pc = ProminenceCov { values: vec![20.0, 10.0, 30.0, 40.0], spans: vec![span(5, 0, 3), span(7, 3, 4)] };
        assert!((cv2(&pc).unwrap() - 100.0 / 3.0).abs() < 1e-12);
        let empty = ProminenceCov::default();
        assert!(matches!(cv2(&empty), Err(Error::InsufficientData { .. })));
    }
}
