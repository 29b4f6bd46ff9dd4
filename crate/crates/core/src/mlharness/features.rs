use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::dsmetric::DsResult;
use crate::error::{Error, Result};
use crate::ingest::{Label, RoiCatalog};

/// Subjects by named features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    feature_names: Vec<String>,
    subject_ids: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl FeatureMatrix {
    pub fn new(feature_names: Vec<String>, subject_ids: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        if feature_names.is_empty() {
            return Err(Error::InvalidParameter("a feature matrix needs at least one column".into()));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = feature_names.iter().find(|n| !seen.insert(n.as_str())) {
            return Err(Error::DuplicateFeature(dup.clone()));
        }
        if subject_ids.len() != rows.len() {
            return Err(Error::LengthMismatch { left: subject_ids.len(), right: rows.len() });
        }
        for row in &rows {
            if row.len() != feature_names.len() {
                return Err(Error::DimensionMismatch { expected: feature_names.len(), got: row.len() });
            }
            if let Some(i) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFiniteInput { index: i });
            }
        }
        Ok(Self { feature_names, subject_ids, rows })
    }

    /// Unnamed rows, with features `f0, f1, ...` and subjects `s0, s1, ...`.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        let names = (0..d).map(|j| format!("f{j}")).collect();
        let ids = (0..rows.len()).map(|i| format!("s{i}")).collect();
        Self::new(names, ids, rows)
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.feature_names.len()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn subject_ids(&self) -> &[String] {
        &self.subject_ids
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    pub fn select(&self, idx: &[usize]) -> Self {
        Self {
            feature_names: self.feature_names.clone(),
            subject_ids: idx.iter().map(|&i| self.subject_ids[i].clone()).collect(),
            rows: idx.iter().map(|&i| self.rows[i].clone()).collect(),
        }
    }

    /// Copy with column `j` replaced by `values`.
    pub fn with_column(&self, j: usize, values: &[f64]) -> Self {
        let mut out = self.clone();
        for (row, &v) in out.rows.iter_mut().zip(values) {
            row[j] = v;
        }
        out
    }
}

/// Binary labels, `0` for HC and `1` for AD.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct LabelVector(Vec<u8>);

impl LabelVector {
    pub fn new(labels: Vec<u8>) -> Result<Self> {
        if let Some(bad) = labels.iter().find(|&&c| c > 1) {
            return Err(Error::InvalidParameter(format!("label {bad} is not 0 or 1")));
        }
        Ok(Self(labels))
    }

    pub fn from_labels(labels: &[Label]) -> Self {
        Self(labels.iter().map(|l| l.as_class()).collect())
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count(&self, class: u8) -> usize {
        self.0.iter().filter(|&&c| c == class).count()
    }

    pub fn select(&self, idx: &[usize]) -> Self {
        Self(idx.iter().map(|&i| self.0[i]).collect())
    }
}

impl TryFrom<Vec<u8>> for LabelVector {
    type Error = Error;

    fn try_from(v: Vec<u8>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<LabelVector> for Vec<u8> {
    fn from(l: LabelVector) -> Self {
        l.0
    }
}

/// Builds the subjects-by-ROI matrix from per-subject ROI values. Columns
/// follow `roi_order`; every subject must carry exactly the same ROI set.
pub fn build_matrix_from_values(
    subjects: &[(String, BTreeMap<String, f64>)],
    roi_order: &[String],
) -> Result<FeatureMatrix> {
    let Some((first_id, first)) = subjects.first() else {
        return Err(Error::EmptyInput);
    };
    let reference: BTreeSet<&String> = first.keys().collect();
    for (id, rois) in subjects {
        let set: BTreeSet<&String> = rois.keys().collect();
        if set != reference {
            let diff: Vec<_> = set.symmetric_difference(&reference).map(|s| s.as_str()).collect();
            return Err(Error::InconsistentRoiSets(format!(
                "subject {id} differs from {first_id} on {}",
                diff.join(", ")
            )));
        }
    }
    let catalog: HashSet<&String> = roi_order.iter().collect();
    if let Some(extra) = reference.iter().find(|r| !catalog.contains(*r)) {
        return Err(Error::InconsistentRoiSets(format!("ROI {extra} is not in the catalog")));
    }
    if let Some(missing) = roi_order.iter().find(|r| !reference.contains(r)) {
        return Err(Error::MissingDs { subject: first_id.clone(), roi: missing.clone() });
    }
    let rows = subjects.iter().map(|(_, rois)| roi_order.iter().map(|r| rois[r]).collect()).collect();
    let ids = subjects.iter().map(|(id, _)| id.clone()).collect();
    FeatureMatrix::new(roi_order.to_vec(), ids, rows)
}

/// One row per subject, one column per catalog ROI, cell = `ds`.
pub fn build_feature_matrix(
    results: &[(String, BTreeMap<String, DsResult>)],
    catalog: &RoiCatalog,
) -> Result<FeatureMatrix> {
    let values: Vec<(String, BTreeMap<String, f64>)> =
        results.iter().map(|(id, rois)| (id.clone(), rois.iter().map(|(r, d)| (r.clone(), d.ds)).collect())).collect();
    build_matrix_from_values(&values, &catalog.names())
}

/// Per-subject `(id, cv1, cv2)` as a two-column matrix named `cv1`, `cv2`.
pub fn ablation_features(rows: &[(String, Option<f64>, Option<f64>)]) -> Result<FeatureMatrix> {
    let mut ids = Vec::with_capacity(rows.len());
    let mut values = Vec::with_capacity(rows.len());
    for (id, cv1, cv2) in rows {
        let cv1 = cv1.ok_or_else(|| Error::MissingValue(format!("cv1 for subject {id}")))?;
        let cv2 = cv2.ok_or_else(|| Error::MissingValue(format!("cv2 for subject {id}")))?;
        ids.push(id.clone());
        values.push(vec![cv1, cv2]);
    }
    FeatureMatrix::new(vec!["cv1".into(), "cv2".into()], ids, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn subjects(n: usize, rois: &[&str]) -> Vec<(String, BTreeMap<String, f64>)> {
        (0..n)
            .map(|i| {
                let m = rois.iter().enumerate().map(|(j, r)| (r.to_string(), (i * 10 + j) as f64)).collect();
                (format!("sub{i}"), m)
            })
            .collect()
    }

    #[test]
    fn hundred_by_catalog() {
        let cat = RoiCatalog::default_dmn();
        let names = cat.names();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let m = build_matrix_from_values(&subjects(100, &refs), &names).unwrap();
        assert_eq!((m.n_rows(), m.n_cols()), (100, 34));
        assert_eq!(m.row(3)[5], 35.0);
        let one = build_matrix_from_values(&subjects(1, &refs), &names).unwrap();
        assert_eq!(one.n_rows(), 1);
    }

    #[test]
    fn roi_set_guards() {
        let order: Vec<String> = ["a", "b"].iter().map(|s| s.to_string()).collect();
        let mut s = subjects(3, &["a", "b"]);
        s[1].1.remove("b");
        assert!(matches!(build_matrix_from_values(&s, &order), Err(Error::InconsistentRoiSets(_))));
        let s = subjects(2, &["a"]);
        assert!(matches!(build_matrix_from_values(&s, &order), Err(Error::MissingDs { roi, .. }) if roi == "b"));
        let s = subjects(2, &["a", "b", "c"]);
        assert!(matches!(build_matrix_from_values(&s, &order), Err(Error::InconsistentRoiSets(_))));
    }

    #[test]
    fn ablation_shape_and_names() {
        let rows: Vec<_> = (0..100).map(|i| (format!("s{i}"), Some(i as f64), Some(2.0 * i as f64))).collect();
        let m = ablation_features(&rows).unwrap();
        assert_eq!((m.n_rows(), m.n_cols()), (100, 2));
        assert_eq!(m.feature_names(), ["cv1", "cv2"]);
        let bad = vec![("x".to_string(), Some(1.0), None)];
        assert!(matches!(ablation_features(&bad), Err(Error::MissingValue(_))));
    }

    #[test]
    fn matrix_guards() {
        assert!(matches!(
            FeatureMatrix::new(vec!["a".into(), "a".into()], vec![], vec![]),
            Err(Error::DuplicateFeature(_))
        ));
        assert!(FeatureMatrix::from_rows(vec![vec![f64::NAN]]).is_err());
        assert!(FeatureMatrix::from_rows(vec![vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(LabelVector::new(vec![0, 2]).is_err());
    }
}
