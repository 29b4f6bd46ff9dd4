use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::features::{FeatureMatrix, LabelVector};
use super::linear::{fit_logistic, fit_svm, sigmoid, softplus, LinearParams, Standardizer};
use super::tree::{Grow, Tree};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Logistic,
    LinearSvm,
    RandomForest,
    GradientBoosting,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [Self::Logistic, Self::LinearSvm, Self::RandomForest, Self::GradientBoosting];

    pub fn name(self) -> &'static str {
        match self {
            Self::Logistic => "logistic",
            Self::LinearSvm => "linear_svm",
            Self::RandomForest => "random_forest",
            Self::GradientBoosting => "gradient_boosting",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown model kind {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearSpec {
    pub learning_rate: f64,
    pub epochs: usize,
    pub lambda: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestSpec {
    pub n_trees: usize,
    pub max_depth: usize,
    /// Features tried per split; `None` means `round(sqrt(d))`.
    pub max_features: Option<usize>,
    pub bootstrap: bool,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoostingSpec {
    pub n_trees: usize,
    pub max_depth: usize,
    pub shrinkage: f64,
    pub subsample: f64,
    pub seed: u64,
}

/// Classifier family and its hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    Logistic(LinearSpec),
    LinearSvm(LinearSpec),
    RandomForest(ForestSpec),
    GradientBoosting(BoostingSpec),
}

impl ModelSpec {
    pub fn default_for(kind: ModelKind) -> Self {
        match kind {
            ModelKind::Logistic => Self::Logistic(LinearSpec { learning_rate: 0.1, epochs: 2000, lambda: 1e-3 }),
            ModelKind::LinearSvm => Self::LinearSvm(LinearSpec { learning_rate: 0.05, epochs: 2000, lambda: 1e-3 }),
            ModelKind::RandomForest => Self::RandomForest(ForestSpec {
                n_trees: 200,
                max_depth: 6,
                max_features: None,
                bootstrap: true,
                seed: 0,
            }),
            ModelKind::GradientBoosting => Self::GradientBoosting(BoostingSpec {
                n_trees: 200,
                max_depth: 3,
                shrinkage: 0.1,
                subsample: 0.8,
                seed: 0,
            }),
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            Self::Logistic(_) => ModelKind::Logistic,
            Self::LinearSvm(_) => ModelKind::LinearSvm,
            Self::RandomForest(_) => ModelKind::RandomForest,
            Self::GradientBoosting(_) => ModelKind::GradientBoosting,
        }
    }

    /// Same spec with its random seed replaced; linear models have none.
    pub fn with_seed(mut self, seed: u64) -> Self {
        match &mut self {
            Self::RandomForest(f) => f.seed = seed,
            Self::GradientBoosting(b) => b.seed = seed,
            Self::Logistic(_) | Self::LinearSvm(_) => {}
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        match *self {
            Self::Logistic(l) | Self::LinearSvm(l) => {
                if !(l.learning_rate > 0.0 && l.learning_rate.is_finite()) || l.epochs == 0 {
                    return bad("linear models need learning_rate > 0 and epochs > 0");
                }
                if !(l.lambda >= 0.0 && l.lambda.is_finite()) {
                    return bad("lambda must be finite and >= 0");
                }
            }
            Self::RandomForest(f) => {
                if f.n_trees == 0 || f.max_depth == 0 || f.max_features == Some(0) {
                    return bad("forest needs positive n_trees, max_depth and max_features");
                }
            }
            Self::GradientBoosting(b) => {
                if b.n_trees == 0 || b.max_depth == 0 {
                    return bad("boosting needs positive n_trees and max_depth");
                }
                if !(b.shrinkage > 0.0 && b.shrinkage <= 1.0) || !(b.subsample > 0.0 && b.subsample <= 1.0) {
                    return bad("boosting needs shrinkage and subsample in (0, 1]");
                }
            }
        }
        Ok(())
    }
}

/// Kind-specific fitted parameters. Tree thresholds live in standardized
/// feature space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelParams {
    Logistic(LinearParams),
    LinearSvm(LinearParams),
    RandomForest {
        trees: Vec<Tree>,
    },
    /// Leaf values already include the shrinkage factor.
    GradientBoosting {
        base_score: f64,
        trees: Vec<Tree>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub spec: ModelSpec,
    pub feature_names: Vec<String>,
    pub standardizer: Standardizer,
    pub params: ModelParams,
    /// Training log-loss after each boosting stage; empty for other kinds.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub train_loss: Vec<f64>,
}

impl TrainedModel {
    pub fn kind(&self) -> ModelKind {
        self.spec.kind()
    }

    /// 0 for SVM margins, 0.5 for every probability-like score.
    pub fn default_threshold(&self) -> f64 {
        match self.params {
            ModelParams::LinearSvm(_) => 0.0,
            _ => 0.5,
        }
    }
}

fn logloss(f: f64, y: f64) -> f64 {
    softplus(f) - y * f
}

/// Fits a classifier; features are standardized with training statistics
/// that are stored in the model.
pub fn train(spec: &ModelSpec, x: &FeatureMatrix, y: &LabelVector) -> Result<TrainedModel> {
    spec.validate()?;
    if x.n_rows() != y.len() {
        return Err(Error::LengthMismatch { left: x.n_rows(), right: y.len() });
    }
    if y.count(0) < 2 || y.count(1) < 2 {
        return Err(Error::SingleClassTraining);
    }
    let standardizer = Standardizer::fit(x.rows());
    let xs = standardizer.apply_all(x.rows());
    let labels = y.as_slice();
    let target: Vec<f64> = labels.iter().map(|&c| f64::from(c)).collect();
    let mut train_loss = Vec::new();

    let params = match *spec {
        ModelSpec::Logistic(l) => {
            ModelParams::Logistic(fit_logistic(&xs, labels, l.learning_rate, l.epochs, l.lambda)?)
        }
        ModelSpec::LinearSvm(l) => ModelParams::LinearSvm(fit_svm(&xs, labels, l.learning_rate, l.epochs, l.lambda)?),
        ModelSpec::RandomForest(f) => ModelParams::RandomForest { trees: fit_forest(&xs, &target, &f) },
        ModelSpec::GradientBoosting(b) => {
            let (base_score, trees, log) = fit_boosting(&xs, &target, &b)?;
            train_loss = log;
            ModelParams::GradientBoosting { base_score, trees }
        }
    };
    Ok(TrainedModel { spec: *spec, feature_names: x.feature_names().to_vec(), standardizer, params, train_loss })
}

fn fit_forest(x: &[Vec<f64>], target: &[f64], spec: &ForestSpec) -> Vec<Tree> {
    let n = x.len();
    let d = x[0].len();
    let m = spec.max_features.unwrap_or_else(|| ((d as f64).sqrt().round() as usize).max(1));
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let grow = Grow { x, target, max_depth: spec.max_depth, max_features: Some(m.min(d)) };
    let leaf = |rows: &[usize]| rows.iter().map(|&i| target[i]).sum::<f64>() / rows.len() as f64;
    (0..spec.n_trees)
        .map(|_| {
            let rows: Vec<usize> =
                if spec.bootstrap { (0..n).map(|_| rng.gen_range(0..n)).collect() } else { (0..n).collect() };
            grow.build(rows, &mut rng, &leaf)
        })
        .collect()
}

/// Stagewise regression trees on the logistic-loss residual `y - p`. Leaf
/// values are Newton steps `sum(r) / sum(p(1-p))` over the subsample. Each
/// shrunken leaf step is then halved until it does not raise the loss of
/// the full training rows that reach that leaf (and dropped if no halving
/// helps), so the training loss never increases from one stage to the next.
fn fit_boosting(x: &[Vec<f64>], target: &[f64], spec: &BoostingSpec) -> Result<(f64, Vec<Tree>, Vec<f64>)> {
    let n = x.len();
    let p0 = (target.iter().sum::<f64>() / n as f64).clamp(1e-6, 1.0 - 1e-6);
    let base = (p0 / (1.0 - p0)).ln();
    let mut f = vec![base; n];
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let take = ((spec.subsample * n as f64).round() as usize).clamp(1, n);
    let mut trees = Vec::with_capacity(spec.n_trees);
    let mut log = Vec::with_capacity(spec.n_trees);

    for _ in 0..spec.n_trees {
        let p: Vec<f64> = f.iter().map(|&v| sigmoid(v)).collect();
        let resid: Vec<f64> = target.iter().zip(&p).map(|(y, p)| y - p).collect();
        let hess: Vec<f64> = p.iter().map(|p| (p * (1.0 - p)).max(1e-12)).collect();

        let mut rows = if take == n { (0..n).collect() } else { sample(&mut rng, n, take).into_vec() };
        rows.sort_unstable();
        let leaf = |rows: &[usize]| {
            let r: f64 = rows.iter().map(|&i| resid[i]).sum();
            let h: f64 = rows.iter().map(|&i| hess[i]).sum();
            r / h
        };
        let grow = Grow { x, target: &resid, max_depth: spec.max_depth, max_features: None };
        let mut tree = grow.build(rows, &mut rng, &leaf);

        let mut members: Vec<Vec<usize>> = vec![Vec::new(); tree.nodes.len()];
        for (i, row) in x.iter().enumerate() {
            members[tree.leaf_index(row)].push(i);
        }
        for li in tree.leaves().collect::<Vec<_>>() {
            let mut step = spec.shrinkage * tree.leaf_value(li);
            let before: f64 = members[li].iter().map(|&i| logloss(f[i], target[i])).sum();
            let mut accepted = false;
            for _ in 0..40 {
                let after: f64 = members[li].iter().map(|&i| logloss(f[i] + step, target[i])).sum();
                if after <= before {
                    accepted = true;
                    break;
                }
                step /= 2.0;
            }
            if !accepted || !step.is_finite() {
                step = 0.0;
            }
            tree.set_leaf(li, step);
            for &i in &members[li] {
                f[i] += step;
            }
        }
        let loss = f.iter().zip(target).map(|(&v, &y)| logloss(v, y)).sum::<f64>() / n as f64;
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss);
        }
        log.push(loss);
        trees.push(tree);
    }
    Ok((base, trees, log))
}

/// Logistic and boosting give P(AD), SVM the signed margin, the forest the
/// fraction of trees voting AD.
pub fn predict_score(model: &TrainedModel, x: &FeatureMatrix) -> Result<Vec<f64>> {
    let d = model.standardizer.dim();
    if x.n_cols() != d {
        return Err(Error::DimensionMismatch { expected: d, got: x.n_cols() });
    }
    Ok(x.rows().iter().map(|row| score_row(model, &model.standardizer.apply(row))).collect())
}

fn score_row(model: &TrainedModel, z: &[f64]) -> f64 {
    match &model.params {
        ModelParams::Logistic(p) => sigmoid(p.margin(z)),
        ModelParams::LinearSvm(p) => p.margin(z),
        ModelParams::RandomForest { trees } => {
            let votes = trees.iter().filter(|t| t.predict(z) > 0.5).count();
            votes as f64 / trees.len() as f64
        }
        ModelParams::GradientBoosting { base_score, trees } => {
            sigmoid(base_score + trees.iter().map(|t| t.predict(z)).sum::<f64>())
        }
    }
}
