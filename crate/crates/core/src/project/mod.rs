//! Two-dimensional embeddings of feature matrices for report figures.

mod pca;
mod tsne;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{Label, LabeledPoint};
use crate::mlharness::{FeatureMatrix, LabelVector};

pub use pca::pca_2d;
pub use tsne::{joint_probabilities, tsne_2d, TsneConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum EmbeddingMethod {
    Pca {
        /// Variance captured by each component.
        explained_variance: [f64; 2],
    },
    Tsne {
        perplexity: f64,
        iterations: usize,
        seed: u64,
        /// KL(P || Q) before each iteration, then once more at the end.
        kl_trace: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Embedding2D {
    #[serde(flatten)]
    pub method: EmbeddingMethod,
    pub subject_ids: Vec<String>,
    pub points: Vec<[f64; 2]>,
    pub labels: Option<Vec<u8>>,
}

impl Embedding2D {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn with_labels(mut self, y: &LabelVector) -> Result<Self> {
        if y.len() != self.points.len() {
            return Err(Error::LengthMismatch { left: self.points.len(), right: y.len() });
        }
        self.labels = Some(y.as_slice().to_vec());
        Ok(self)
    }

    /// Rows for CSV emission; needs labels.
    pub fn to_points(&self) -> Result<Vec<LabeledPoint>> {
        let labels = self.labels.as_ref().ok_or_else(|| Error::MissingValue("embedding has no labels".into()))?;
        Ok(zip_points(self.points.iter().map(|p| (p[0], p[1])), labels, &self.subject_ids))
    }
}

fn zip_points(xy: impl Iterator<Item = (f64, f64)>, labels: &[u8], ids: &[String]) -> Vec<LabeledPoint> {
    xy.zip(labels.iter().zip(ids))
        .map(|((x, y), (&c, id))| LabeledPoint {
            x,
            y,
            label: Label::from_class(c).unwrap_or(Label::Ad),
            subject_id: id.clone(),
        })
        .collect()
}

/// Labeled `(x, y)` rows from a two-column matrix such as the `cv1`/`cv2`
/// ablation features.
pub fn scatter_export(x: &FeatureMatrix, y: &LabelVector) -> Result<Vec<LabeledPoint>> {
    if x.n_cols() != 2 {
        return Err(Error::WrongColumnCount(x.n_cols()));
    }
    if x.n_rows() != y.len() {
        return Err(Error::LengthMismatch { left: x.n_rows(), right: y.len() });
    }
    Ok(zip_points(x.rows().iter().map(|r| (r[0], r[1])), y.as_slice(), x.subject_ids()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{parse_points_csv, write_points_csv};
    use crate::mlharness::ablation_features;

    #[test]
    fn scatter_rows_and_round_trip() {
        let rows: Vec<_> =
            (0..100).map(|i| (format!("s{i}"), Some(i as f64 * 0.37), Some(1.0 / (i + 1) as f64))).collect();
        let x = ablation_features(&rows).unwrap();
        let y = LabelVector::new((0..100).map(|i| (i % 2) as u8).collect()).unwrap();
        let pts = scatter_export(&x, &y).unwrap();
        assert_eq!(pts.len(), 100);
        assert!(pts.iter().zip(y.as_slice()).all(|(p, &c)| p.label.as_class() == c));
        assert_eq!(pts[7].x, x.row(7)[0]);

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scatter.csv");
        write_points_csv(&pts, &path).unwrap();
        assert_eq!(parse_points_csv(&path).unwrap(), pts);
    }

    #[test]
    fn scatter_needs_two_columns() {
        let x = FeatureMatrix::from_rows(vec![vec![1.0, 2.0, 3.0]]).unwrap();
        let y = LabelVector::new(vec![0]).unwrap();
        assert!(matches!(scatter_export(&x, &y), Err(Error::WrongColumnCount(3))));
    }
}
