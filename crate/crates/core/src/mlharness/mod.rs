//! Subject classification from DS features: four classifiers, ROC/AUC
//! evaluation, stratified cross-validation and permutation importance.

mod cv;
mod eval;
mod features;
mod linear;
mod model;
mod tree;

pub use cv::{cross_validate, permutation_importance, stratified_kfold, CvReport, Fold, ImportanceReport};
pub use eval::{accuracy, evaluate, evaluate_scores, rank_auc, roc_curve, trapezoid_auc, Confusion, EvalReport};
pub use features::{ablation_features, build_feature_matrix, build_matrix_from_values, FeatureMatrix, LabelVector};
pub use linear::{hinge_loss, logistic_loss_and_grad, LinearParams, Standardizer};
pub use model::{
    predict_score, train, BoostingSpec, ForestSpec, LinearSpec, ModelKind, ModelParams, ModelSpec, TrainedModel,
};
pub use tree::{Node, Tree};
