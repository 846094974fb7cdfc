//! Virality prediction from early-stage community features.
//!
//! [`extract_features`] summarises the first tweets of a meme,
//! [`label_viral`] marks memes above a popularity percentile, and
//! [`train_forest`] / [`cross_validate`] fit and score a random forest that
//! is compared against random guessing and a community-blind forest.

mod eval;
mod features;
mod forest;
mod labels;

pub use eval::{
    baseline_community_blind, baseline_random_guess, cross_validate, evaluate, stratified_folds, write_eval_csv,
    CvResult, EvalCell, EvalConfig, EvalReport, FoldResult, MethodScore, PrecisionRecall, RandomGuessReport,
    EVAL_CSV_HEADER,
};
pub use features::{
    extract_all, extract_features, read_features_csv, write_features_csv, FeatureRow, FeatureVector,
    BLIND_FEATURES, FEATURES_CSV_HEADER, FEATURE_NAMES,
};
pub use forest::{train_forest, FeatureSampling, ForestModel, ForestParams, Node, Tree, TrainingMeta, MODEL_FORMAT};
pub use labels::{label_viral, nearest_rank_threshold, LabelMode};
