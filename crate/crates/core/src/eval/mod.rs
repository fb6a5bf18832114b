//! Evaluation protocol: metrics, folds, baselines, reports, grid search.

pub mod baselines;
pub mod folds;
pub mod grid;
pub mod metrics;
pub mod protocol;
pub mod report;

pub use baselines::{majority_baseline, majority_class, random_baseline};
pub use folds::{stratified_kfold, FoldPlan};
pub use grid::{grid_search, GridChoice, GridRanges};
pub use metrics::{confusion_matrix, f1_scores, mae, F1Scores};
pub use protocol::{evaluate_cv, evaluate_split, CrossValidation, FoldContext, Method, SplitOptions, SplitOutcome};
pub use report::{EvalReport, FoldRecord, MetricBundle, Summary};
