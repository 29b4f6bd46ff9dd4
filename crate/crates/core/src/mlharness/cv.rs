use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::eval::{accuracy, evaluate};
use super::features::{FeatureMatrix, LabelVector};
use super::model::{predict_score, train, ModelSpec, TrainedModel};
use crate::error::{Error, Result};
use crate::numkernel::{mean, population_std};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fold {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Shuffles each class with the seed and deals its members round-robin into
/// `k` test folds, continuing the deal across classes so fold sizes differ
/// by at most one.
pub fn stratified_kfold(y: &LabelVector, k: usize, seed: u64) -> Result<Vec<Fold>> {
    if k < 2 {
        return Err(Error::InvalidConfig(format!("k-fold needs k >= 2, got {k}")));
    }
    for class in [0u8, 1] {
        let count = y.count(class);
        if count < k {
            return Err(Error::TooFewPerClass { class, count, k });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tests = vec![Vec::new(); k];
    let mut next = 0;
    for class in [0u8, 1] {
        let mut members: Vec<usize> = (0..y.len()).filter(|&i| y.as_slice()[i] == class).collect();
        members.shuffle(&mut rng);
        for i in members {
            tests[next].push(i);
            next = (next + 1) % k;
        }
    }
    Ok(tests
        .into_iter()
        .map(|mut test| {
            test.sort_unstable();
            let train = (0..y.len()).filter(|i| test.binary_search(i).is_err()).collect();
            Fold { train, test }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub k: usize,
    pub seed: u64,
    pub fold_accuracy: Vec<f64>,
    pub fold_auc: Vec<f64>,
    pub mean_accuracy: f64,
    pub std_accuracy: f64,
    pub mean_auc: f64,
    pub std_auc: f64,
}

/// Stratified k-fold: train on each training split, evaluate on its test
/// split at the model's default threshold.
pub fn cross_validate(spec: &ModelSpec, x: &FeatureMatrix, y: &LabelVector, k: usize, seed: u64) -> Result<CvReport> {
    let folds = stratified_kfold(y, k, seed)?;
    let mut fold_accuracy = Vec::with_capacity(k);
    let mut fold_auc = Vec::with_capacity(k);
    for fold in &folds {
        let model = train(spec, &x.select(&fold.train), &y.select(&fold.train))?;
        let report = evaluate(&model, &x.select(&fold.test), &y.select(&fold.test), model.default_threshold())?;
        fold_accuracy.push(report.accuracy);
        fold_auc.push(report.auc);
    }
    Ok(CvReport {
        k,
        seed,
        mean_accuracy: mean(&fold_accuracy),
        std_accuracy: population_std(&fold_accuracy),
        mean_auc: mean(&fold_auc),
        std_auc: population_std(&fold_auc),
        fold_accuracy,
        fold_auc,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceReport {
    /// Always `"permutation"`: mean accuracy drop when one column is shuffled.
    pub method: String,
    pub feature_names: Vec<String>,
    pub importances: Vec<f64>,
    pub std: Vec<f64>,
    pub baseline_accuracy: f64,
    pub repeats: usize,
    pub seed: u64,
}

impl ImportanceReport {
    /// Feature indices, most important first; ties keep column order.
    pub fn ranking(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.importances.len()).collect();
        idx.sort_by(|&a, &b| self.importances[b].total_cmp(&self.importances[a]));
        idx
    }
}

/// For each column, the mean over `repeats` seeded shuffles of
/// `baseline accuracy - accuracy with that column shuffled`.
pub fn permutation_importance(
    model: &TrainedModel,
    x: &FeatureMatrix,
    y: &LabelVector,
    repeats: usize,
    seed: u64,
) -> Result<ImportanceReport> {
    if repeats == 0 {
        return Err(Error::InvalidConfig("permutation importance needs repeats >= 1".into()));
    }
    if x.n_rows() == 0 {
        return Err(Error::EmptyEvaluation);
    }
    let threshold = model.default_threshold();
    let labels = y.as_slice();
    let baseline = accuracy(&predict_score(model, x)?, labels, threshold);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut importances = Vec::with_capacity(x.n_cols());
    let mut stds = Vec::with_capacity(x.n_cols());
    for j in 0..x.n_cols() {
        let mut col = x.column(j);
        let mut drops = Vec::with_capacity(repeats);
        for _ in 0..repeats {
            col.shuffle(&mut rng);
            let scores = predict_score(model, &x.with_column(j, &col))?;
            drops.push(baseline - accuracy(&scores, labels, threshold));
        }
        importances.push(mean(&drops));
        stds.push(population_std(&drops));
    }
    Ok(ImportanceReport {
        method: "permutation".into(),
        feature_names: x.feature_names().to_vec(),
        importances,
        std: stds,
        baseline_accuracy: baseline,
        repeats,
        seed,
    })
}
