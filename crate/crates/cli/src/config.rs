//! Effective run configuration.
//!
//! Values are layered: built-in defaults, then a flat `key = value` file
//! (named by `--config` or the `STOCHDS_CONFIG` environment variable), then
//! `--set key=value` flags and the dedicated per-command flags.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use stochds::autoenc::{AeConfig, WindowingConfig};
use stochds::dsmetric::{DsConfig, ScaleGrid, DEFAULT_THRESHOLD};
use stochds::mlharness::{ModelKind, ModelSpec};
use stochds::project::TsneConfig;

use crate::CliError;

pub const CONFIG_ENV: &str = "STOCHDS_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub min: usize,
    pub step: usize,
    pub max: usize,
}

/// Model hyperparameters as given; unset fields keep the family default.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ModelOverrides {
    pub learning_rate: Option<f64>,
    pub epochs: Option<usize>,
    pub lambda: Option<f64>,
    pub n_trees: Option<usize>,
    pub max_depth: Option<usize>,
    pub max_features: Option<usize>,
    pub bootstrap: Option<bool>,
    pub shrinkage: Option<f64>,
    pub subsample: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub windowing: WindowingConfig,
    pub ae: AeConfig,
    pub grid: GridConfig,
    pub threshold: f64,
    pub model: ModelSpec,
    pub cv_k: usize,
    pub importance_repeats: usize,
    pub tsne: TsneConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self::resolve(&Settings::default()).expect("defaults are valid")
    }
}

impl RunConfig {
    /// Builds the effective config from raw settings, deriving every stage
    /// seed from the global one.
    pub fn resolve(s: &Settings) -> Result<Self, CliError> {
        let mut windowing = WindowingConfig::new(s.window_len, s.stride);
        if let Some(c) = s.crop_len {
            windowing.crop_len = c;
        }
        windowing.validate().map_err(CliError::from_config)?;

        let ae = AeConfig {
            hidden_dim: s.hidden_dim,
            latent_dim: s.latent_dim,
            learning_rate: s.ae_learning_rate,
            epochs: s.ae_epochs,
            invariance_weight: s.invariance_weight,
            seed: derive_seed(s.seed, "ae"),
        };
        ae.validate(windowing.crop_len).map_err(CliError::from_config)?;

        let grid = GridConfig { min: s.grid_min, step: s.grid_step, max: s.grid_max };
        ScaleGrid::new(grid.min, grid.step, grid.max).map_err(CliError::from_config)?;

        if !s.threshold.is_finite() {
            return Err(CliError::Config("ds.threshold must be finite".into()));
        }
        let model = build_model(s.model_kind, &s.model)?.with_seed(derive_seed(s.seed, "model"));
        if s.cv_k < 2 {
            return Err(CliError::Config(format!("cv.k must be at least 2, got {}", s.cv_k)));
        }
        if s.importance_repeats == 0 {
            return Err(CliError::Config("importance.repeats must be at least 1".into()));
        }
        let mut tsne = s.tsne;
        tsne.seed = derive_seed(s.seed, "tsne");

        Ok(Self {
            seed: s.seed,
            windowing,
            ae,
            grid,
            threshold: s.threshold,
            model,
            cv_k: s.cv_k,
            importance_repeats: s.importance_repeats,
            tsne,
        })
    }

    pub fn ds_config(&self) -> DsConfig {
        DsConfig {
            windowing: self.windowing,
            ae: self.ae,
            grid: ScaleGrid::new(self.grid.min, self.grid.step, self.grid.max).expect("grid validated in resolve"),
            threshold: self.threshold,
        }
    }

    pub fn cv_seed(&self) -> u64 {
        derive_seed(self.seed, "cv")
    }

    pub fn importance_seed(&self) -> u64 {
        derive_seed(self.seed, "importance")
    }
}

fn build_model(kind: ModelKind, o: &ModelOverrides) -> Result<ModelSpec, CliError> {
    let mut spec = ModelSpec::default_for(kind);
    let reject = |key: &str| Err(CliError::Config(format!("model.{key} does not apply to model {}", kind.name())));
    match &mut spec {
        ModelSpec::Logistic(l) | ModelSpec::LinearSvm(l) => {
            for (set, key) in [
                (o.n_trees.is_some(), "n_trees"),
                (o.max_depth.is_some(), "max_depth"),
                (o.max_features.is_some(), "max_features"),
                (o.bootstrap.is_some(), "bootstrap"),
                (o.shrinkage.is_some(), "shrinkage"),
                (o.subsample.is_some(), "subsample"),
            ] {
                if set {
                    return reject(key);
                }
            }
            l.learning_rate = o.learning_rate.unwrap_or(l.learning_rate);
            l.epochs = o.epochs.unwrap_or(l.epochs);
            l.lambda = o.lambda.unwrap_or(l.lambda);
        }
        ModelSpec::RandomForest(f) => {
            for (set, key) in [
                (o.learning_rate.is_some(), "learning_rate"),
                (o.epochs.is_some(), "epochs"),
                (o.lambda.is_some(), "lambda"),
                (o.shrinkage.is_some(), "shrinkage"),
                (o.subsample.is_some(), "subsample"),
            ] {
                if set {
                    return reject(key);
                }
            }
            f.n_trees = o.n_trees.unwrap_or(f.n_trees);
            f.max_depth = o.max_depth.unwrap_or(f.max_depth);
            f.max_features = o.max_features.or(f.max_features);
            f.bootstrap = o.bootstrap.unwrap_or(f.bootstrap);
        }
        ModelSpec::GradientBoosting(b) => {
            for (set, key) in [
                (o.learning_rate.is_some(), "learning_rate"),
                (o.epochs.is_some(), "epochs"),
                (o.lambda.is_some(), "lambda"),
                (o.max_features.is_some(), "max_features"),
                (o.bootstrap.is_some(), "bootstrap"),
            ] {
                if set {
                    return reject(key);
                }
            }
            b.n_trees = o.n_trees.unwrap_or(b.n_trees);
            b.max_depth = o.max_depth.unwrap_or(b.max_depth);
            b.shrinkage = o.shrinkage.unwrap_or(b.shrinkage);
            b.subsample = o.subsample.unwrap_or(b.subsample);
        }
    }
    spec.validate().map_err(CliError::from_config)?;
    Ok(spec)
}

/// Raw layered values before validation.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub seed: u64,
    pub window_len: usize,
    pub stride: usize,
    pub crop_len: Option<usize>,
    pub hidden_dim: usize,
    pub latent_dim: usize,
    pub ae_learning_rate: f64,
    pub ae_epochs: usize,
    pub invariance_weight: f64,
    pub grid_min: usize,
    pub grid_step: usize,
    pub grid_max: usize,
    pub threshold: f64,
    pub model_kind: ModelKind,
    pub model: ModelOverrides,
    pub cv_k: usize,
    pub importance_repeats: usize,
    pub tsne: TsneConfig,
}

impl Default for Settings {
    fn default() -> Self {
        let w = WindowingConfig::default();
        let ae = AeConfig::default();
        Self {
            seed: 0,
            window_len: w.window_len,
            stride: w.stride,
            crop_len: None,
            hidden_dim: ae.hidden_dim,
            latent_dim: ae.latent_dim,
            ae_learning_rate: ae.learning_rate,
            ae_epochs: ae.epochs,
            invariance_weight: ae.invariance_weight,
            grid_min: 5,
            grid_step: 2,
            grid_max: 50,
            threshold: DEFAULT_THRESHOLD,
            model_kind: ModelKind::RandomForest,
            model: ModelOverrides::default(),
            cv_k: 5,
            importance_repeats: 10,
            tsne: TsneConfig::default(),
        }
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value.parse().map_err(|_| CliError::Config(format!("bad value {value:?} for {key}")))
}

impl Settings {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let v = value.trim();
        match key.trim() {
            "seed" => self.seed = parse_value(key, v)?,
            "windowing.window_len" => self.window_len = parse_value(key, v)?,
            "windowing.stride" => self.stride = parse_value(key, v)?,
            "windowing.crop_len" => self.crop_len = Some(parse_value(key, v)?),
            "ae.hidden_dim" => self.hidden_dim = parse_value(key, v)?,
            "ae.latent_dim" => self.latent_dim = parse_value(key, v)?,
            "ae.learning_rate" => self.ae_learning_rate = parse_value(key, v)?,
            "ae.epochs" => self.ae_epochs = parse_value(key, v)?,
            "ae.invariance_weight" => self.invariance_weight = parse_value(key, v)?,
            "grid.min" => self.grid_min = parse_value(key, v)?,
            "grid.step" => self.grid_step = parse_value(key, v)?,
            "grid.max" => self.grid_max = parse_value(key, v)?,
            "ds.threshold" => self.threshold = parse_value(key, v)?,
            "model.kind" => {
                self.model_kind = v.parse().map_err(|_| CliError::Config(format!("bad value {v:?} for model.kind")))?
            }
            "model.learning_rate" => self.model.learning_rate = Some(parse_value(key, v)?),
            "model.epochs" => self.model.epochs = Some(parse_value(key, v)?),
            "model.lambda" => self.model.lambda = Some(parse_value(key, v)?),
            "model.n_trees" => self.model.n_trees = Some(parse_value(key, v)?),
            "model.max_depth" => self.model.max_depth = Some(parse_value(key, v)?),
            "model.max_features" => self.model.max_features = Some(parse_value(key, v)?),
            "model.bootstrap" => self.model.bootstrap = Some(parse_value(key, v)?),
            "model.shrinkage" => self.model.shrinkage = Some(parse_value(key, v)?),
            "model.subsample" => self.model.subsample = Some(parse_value(key, v)?),
            "cv.k" => self.cv_k = parse_value(key, v)?,
            "importance.repeats" => self.importance_repeats = parse_value(key, v)?,
            "tsne.perplexity" => self.tsne.perplexity = parse_value(key, v)?,
            "tsne.iterations" => self.tsne.iterations = parse_value(key, v)?,
            "tsne.learning_rate" => self.tsne.learning_rate = parse_value(key, v)?,
            "tsne.exaggeration" => self.tsne.exaggeration = parse_value(key, v)?,
            "tsne.exaggeration_iters" => self.tsne.exaggeration_iters = parse_value(key, v)?,
            other => return Err(CliError::Config(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines. Blank lines and `#` comments are ignored.
    pub fn apply_text(&mut self, text: &str, origin: &str) -> Result<(), CliError> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(CliError::Config(format!("{origin} line {}: expected key = value", i + 1)));
            };
            self.set(k, v).map_err(|e| CliError::Config(format!("{origin} line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        self.apply_text(&text, &path.display().to_string())
    }

    /// Applies a `key=value` override from the command line.
    pub fn apply_override(&mut self, kv: &str) -> Result<(), CliError> {
        let (k, v) =
            kv.split_once('=').ok_or_else(|| CliError::Config(format!("--set expects key=value, got {kv:?}")))?;
        self.set(k, v)
    }
}

/// A per-stage seed: FNV-1a of the stage name mixed into the global seed
/// with a splitmix64 finalizer.
pub fn derive_seed(global: u64, stage: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in stage.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut z = global ^ h;
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
