//! Random forest classification and evaluation.
//!
//! Trees are grown greedily with the Gini criterion on midpoint thresholds.
//! With `bootstrap = false` every tree sees the full training set and
//! diversity comes from per-split feature subsampling alone.

mod baseline;
mod cv;
mod dataset;
mod ensemble;
mod importance;
mod metrics;
mod params;
mod persist;
mod search;
mod tree;

pub use baseline::{baseline_accuracy, or_baseline, MajorityClassifier};
pub use cv::{cross_validate, cross_validate_with, holdout_split, stratified_kfold, EvalReport};
pub use dataset::Dataset;
pub use ensemble::{fit_forest, RandomForestModel};
pub use importance::mdi_importance;
pub use metrics::{accuracy, auroc, binary_auroc, cohens_kappa, confusion_matrix, gini_impurity};
pub use params::{ForestParams, MaxFeatures};
pub use persist::{load_model, save_model, MODEL_FORMAT, MODEL_VERSION};
pub use search::{randomized_search, ParamSpace, SearchResult, SearchRow};
pub use tree::{fit_tree, DecisionTree, Node};
