use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use stochds::ingest::{write_points_csv, RoiCatalog};
use stochds::mlharness::{
    ablation_features, build_matrix_from_values, cross_validate, evaluate, evaluate_scores, permutation_importance,
    predict_score, stratified_kfold, train, CvReport, EvalReport, FeatureMatrix, ImportanceReport, LabelVector,
    ModelKind, TrainedModel,
};
use stochds::numkernel::mean;
use stochds::project::{pca_2d, scatter_export, tsne_2d, Embedding2D};

use crate::artifact::{read_artifact, read_features, write_features, write_json, Artifact};
use crate::config::RunConfig;
use crate::ds::{DsBatch, RoiOutcome};
use crate::CliError;

pub fn parse_model_kind(s: &str) -> Result<ModelKind, String> {
    s.parse().map_err(|_| {
        let names: Vec<_> = ModelKind::ALL.iter().map(|k| k.name()).collect();
        format!("expected one of {}", names.join(", "))
    })
}

#[derive(Debug, Args)]
pub struct FeaturesArgs {
    /// DS JSON produced by `ds --manifest`
    #[arg(long)]
    pub ds: PathBuf,
    /// ROI catalog CSV fixing the column order
    #[arg(long)]
    pub catalog: Option<PathBuf>,
    /// Two columns, the subject's mean cv1 and cv2 over its ROIs
    #[arg(long)]
    pub ablation: bool,
    #[arg(long)]
    pub out: PathBuf,
}

/// Column order: the explicit catalog, else default catalog order when every
/// ROI present is a default catalog entry, else ROI names sorted.
fn roi_order(catalog: Option<&PathBuf>, present: &[String]) -> Result<Vec<String>, CliError> {
    if let Some(path) = catalog {
        return Ok(RoiCatalog::parse_csv(path)?.names());
    }
    let default = RoiCatalog::default_dmn().names();
    if present.iter().all(|r| default.contains(r)) {
        Ok(default.into_iter().filter(|r| present.contains(r)).collect())
    } else {
        Ok(present.to_vec())
    }
}

pub fn features(args: &FeaturesArgs) -> Result<(), CliError> {
    let batch: Artifact<DsBatch> = read_artifact(&args.ds, "ds")?;
    let mut labels = Vec::new();
    let mut values = Vec::new();
    let mut ablation = Vec::new();
    for r in &batch.body.records {
        let Some(label) = r.cohort_label else {
            return Err(CliError::Usage(format!(
                "subject {} has no cohort label; run ds with --manifest",
                r.subject_id
            )));
        };
        if !r.is_complete() {
            eprintln!("warning: dropping subject {}: DS missing for some ROI", r.subject_id);
            continue;
        }
        let mut row = BTreeMap::new();
        let (mut cv1, mut cv2) = (Vec::new(), Vec::new());
        for (roi, o) in &r.rois {
            if let RoiOutcome::Ok { cv1: a, cv2: b, ds, .. } = o {
                row.insert(roi.clone(), *ds);
                cv1.push(*a);
                cv2.push(*b);
            }
        }
        labels.push(label);
        values.push((r.subject_id.clone(), row));
        ablation.push((r.subject_id.clone(), Some(mean(&cv1)), Some(mean(&cv2))));
    }
    if values.is_empty() {
        return Err(CliError::Runtime("no subject has DS values for every ROI".into()));
    }
    let x = if args.ablation {
        ablation_features(&ablation)?
    } else {
        let present: Vec<String> = values[0].1.keys().cloned().collect();
        build_matrix_from_values(&values, &roi_order(args.catalog.as_ref(), &present)?)?
    };
    write_features(&args.out, &x, &LabelVector::from_labels(&labels))
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub features: PathBuf,
    #[arg(long, value_parser = parse_model_kind)]
    pub model: Option<ModelKind>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelBody {
    pub model: TrainedModel,
}

pub fn train_cmd(args: &TrainArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let (x, y) = read_features(&args.features)?;
    let model = train(&cfg.model, &x, &y)?;
    write_json(&args.out, &Artifact::new("model", cfg, ModelBody { model }))
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub features: PathBuf,
    #[arg(long, value_parser = parse_model_kind)]
    pub model: Option<ModelKind>,
    /// Also score this trained model on the features
    #[arg(long)]
    pub trained: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// ROC of the pooled out-of-fold scores as `fpr,tpr`
    #[arg(long)]
    pub roc: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalBody {
    pub model_kind: ModelKind,
    pub cross_validation: CvReport,
    /// Every subject scored by the fold model that did not see it.
    pub out_of_fold: EvalReport,
    pub trained_model: Option<EvalReport>,
}

fn out_of_fold(cfg: &RunConfig, x: &FeatureMatrix, y: &LabelVector) -> Result<EvalReport, CliError> {
    let folds = stratified_kfold(y, cfg.cv_k, cfg.cv_seed())?;
    let mut scores = vec![0.0; x.n_rows()];
    let mut threshold = 0.5;
    for fold in &folds {
        let model = train(&cfg.model, &x.select(&fold.train), &y.select(&fold.train))?;
        threshold = model.default_threshold();
        for (&i, s) in fold.test.iter().zip(predict_score(&model, &x.select(&fold.test))?) {
            scores[i] = s;
        }
    }
    Ok(evaluate_scores(&scores, y.as_slice(), threshold)?)
}

pub fn eval_cmd(args: &EvalArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let (x, y) = read_features(&args.features)?;
    let cross_validation = cross_validate(&cfg.model, &x, &y, cfg.cv_k, cfg.cv_seed())?;
    let oof = out_of_fold(cfg, &x, &y)?;
    let trained_model = match &args.trained {
        Some(path) => {
            let m: Artifact<ModelBody> = read_artifact(path, "model")?;
            let model = m.body.model;
            Some(evaluate(&model, &x, &y, model.default_threshold())?)
        }
        None => None,
    };
    if let Some(path) = &args.roc {
        let mut s = String::from("fpr,tpr\n");
        for (fpr, tpr) in &oof.roc_points {
            s.push_str(&format!("{fpr},{tpr}\n"));
        }
        std::fs::write(path, s).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
    }
    let body = EvalBody { model_kind: cfg.model.kind(), cross_validation, out_of_fold: oof, trained_model };
    write_json(&args.out, &Artifact::new("eval", cfg, body))
}

#[derive(Debug, Args)]
pub struct ImportanceArgs {
    #[arg(long)]
    pub features: PathBuf,
    /// Trained model to probe; one is trained on the features when absent
    #[arg(long)]
    pub trained: Option<PathBuf>,
    #[arg(long, value_parser = parse_model_kind)]
    pub model: Option<ModelKind>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedFeature {
    pub feature: String,
    pub importance: f64,
    pub std: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ImportanceBody {
    pub report: ImportanceReport,
    /// Most important first.
    pub ranked: Vec<RankedFeature>,
}

pub fn importance_cmd(args: &ImportanceArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let (x, y) = read_features(&args.features)?;
    let model = match &args.trained {
        Some(path) => read_artifact::<ModelBody>(path, "model")?.body.model,
        None => train(&cfg.model, &x, &y)?,
    };
    if model.feature_names != x.feature_names() {
        return Err(CliError::Usage("model was trained on different features".into()));
    }
    let report = permutation_importance(&model, &x, &y, cfg.importance_repeats, cfg.importance_seed())?;
    let ranked = report
        .ranking()
        .into_iter()
        .map(|j| RankedFeature {
            feature: report.feature_names[j].clone(),
            importance: report.importances[j],
            std: report.std[j],
        })
        .collect();
    write_json(&args.out, &Artifact::new("importance", cfg, ImportanceBody { report, ranked }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProjectMethod {
    Pca,
    Tsne,
    /// The two feature columns as they are (ablation features)
    Scatter,
}

#[derive(Debug, Args)]
pub struct ProjectArgs {
    #[arg(long)]
    pub features: PathBuf,
    #[arg(long, value_enum, default_value = "tsne")]
    pub method: ProjectMethod,
    /// Embedding CSV: x,y,label,subject_id
    #[arg(long)]
    pub out: PathBuf,
    /// Embedding JSON with method details
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbeddingBody {
    pub embedding: Embedding2D,
}

pub fn project_cmd(args: &ProjectArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let (x, y) = read_features(&args.features)?;
    let (points, embedding) = match args.method {
        ProjectMethod::Scatter => (scatter_export(&x, &y)?, None),
        ProjectMethod::Pca | ProjectMethod::Tsne => {
            let e = if args.method == ProjectMethod::Pca { pca_2d(&x)? } else { tsne_2d(&x, &cfg.tsne)? };
            let e = e.with_labels(&y)?;
            (e.to_points()?, Some(e))
        }
    };
    write_points_csv(&points, &args.out)?;
    if let Some(path) = &args.json {
        let Some(embedding) = embedding else {
            return Err(CliError::Usage("--json is only available for pca and tsne".into()));
        };
        write_json(path, &Artifact::new("embedding", cfg, EmbeddingBody { embedding }))?;
    }
    Ok(())
}
