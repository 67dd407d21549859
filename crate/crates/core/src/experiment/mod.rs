//! Config-driven experiments: cohort synthesis, batch featurization,
//! training, evaluation sweeps and detector scoring.

mod batch;
mod cohort;
mod config;
mod detection;
mod evaluate;

pub use batch::{
    featurize_batch, load_manifest, read_features, write_features, FeatureFiles, FeatureMeta, FeatureTable, Reject,
};
pub use cohort::{synthesize, write_dataset, NamedRecord};
pub use config::{
    CapacitanceSpec, DatasetConfig, Direction, EvaluationConfig, ExperimentConfig, Jitter, LegshakeDatasetConfig,
    PathSpec, PersonSpec, SearchConfig, Task,
};
pub use detection::{score_detection, true_onset, DetectionScore};
pub use evaluate::{
    accuracy_vs_k, build_report, importance_rows, train_and_evaluate, write_report, AccuracyAtK, HoldoutReport,
    ImportanceRow, ReportBundle, TrainOutcome,
};
