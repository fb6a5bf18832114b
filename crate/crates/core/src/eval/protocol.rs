//! Experimental protocols: k-fold cross-validation on a labeled population
//! and fixed train/dev/test evaluation.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::classify::{classify_binary, classify_ternary, default_epsilon_grid, fit_epsilon_with_score};
use crate::domain::SourceId;
use crate::error::{Error, Result};
use crate::eval::baselines::{majority_class, random_baseline};
use crate::eval::folds::stratified_kfold;
use crate::eval::metrics::{f1_scores, mae};
use crate::eval::report::{EvalReport, FoldRecord, MetricBundle};
use crate::graph::MediaGraph;
use crate::labels::{rewards_from_labels, Label, LabeledDataset, RewardVector};
use crate::propagation::{propagate, PropagationConfig, Strategy};
use crate::scores::ScoreVector;

/// What produces the predictions in a protocol run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Propagation(Strategy),
    Majority,
    Random,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Propagation(s) => write!(f, "{s}"),
            Method::Majority => f.write_str("Majority"),
            Method::Random => f.write_str("Random"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "majority" => Ok(Method::Majority),
            "random" => Ok(Method::Random),
            other => other.parse().map(Method::Propagation),
        }
    }
}

/// What a propagation call inside a protocol run received.
#[derive(Debug)]
pub struct FoldContext<'a> {
    pub fold: usize,
    pub rewards: &'a RewardVector,
    /// Sources whose labels must not reach the rewards.
    pub held_out: &'a BTreeSet<SourceId>,
}

/// k-fold cross-validation in binary mode.
///
/// The evaluated population is the Low/High (or Left/Right) sources; the
/// neutral class never gets a reward and is never scored. Each fold builds
/// rewards from the other folds only, propagates, and classifies by sign.
#[derive(Clone, Debug)]
pub struct CrossValidation {
    pub k: usize,
    pub seed: u64,
    pub propagation: PropagationConfig,
}

impl Default for CrossValidation {
    fn default() -> Self {
        CrossValidation {
            k: 5,
            seed: 0,
            propagation: PropagationConfig::default(),
        }
    }
}

impl CrossValidation {
    pub fn run(&self, g: Option<&MediaGraph>, ds: &LabeledDataset, method: Method) -> Result<EvalReport> {
        self.run_observed(g, ds, method, &|_| {})
    }

    /// Like [`run`](Self::run), calling `observer` before every propagation.
    pub fn run_observed(
        &self,
        g: Option<&MediaGraph>,
        ds: &LabeledDataset,
        method: Method,
        observer: &(dyn Fn(&FoldContext<'_>) + Sync),
    ) -> Result<EvalReport> {
        let task = ds.task();
        let classes = Label::binary_classes(task).to_vec();
        let population = ds.restrict_to(&classes);
        let plan = stratified_kfold(&population, self.k, self.seed)?;
        if matches!(method, Method::Propagation(_)) {
            if g.is_none() {
                return Err(Error::InvalidConfig("propagation needs a graph".into()));
            }
            self.propagation.validate()?;
        }

        let folds: Vec<FoldRecord> = (0..self.k)
            .into_par_iter()
            .map(|fold| {
                let test = plan.test_set(fold);
                let train = plan.train_set(fold);
                let gold: Vec<Label> = test.iter().map(|id| population.get(id).unwrap()).collect();
                let train_gold: Vec<Label> = train.iter().map(|id| population.get(id).unwrap()).collect();

                let (pred, converged) = match method {
                    Method::Majority => (vec![majority_class(&train_gold)?; gold.len()], true),
                    Method::Random => (
                        random_baseline(&gold, &classes, self.seed.wrapping_add(fold as u64))?,
                        true,
                    ),
                    Method::Propagation(strategy) => {
                        let g = g.expect("checked above");
                        let rewards = rewards_from_labels(&population, Some(&train));
                        observer(&FoldContext {
                            fold,
                            rewards: &rewards,
                            held_out: &test,
                        });
                        let scores = match propagate(g, &rewards, strategy, &self.propagation) {
                            Ok(s) => s,
                            Err(e @ Error::Diverged { .. }) => {
                                log::warn!("fold {fold} skipped: {e}");
                                return Ok(FoldRecord {
                                    fold,
                                    metrics: None,
                                    converged: false,
                                    error: Some(e.to_string()),
                                });
                            }
                            Err(e) => return Err(e),
                        };
                        let pred = test
                            .iter()
                            .map(|id| classify_binary(scores.get_or_zero(id), task))
                            .collect();
                        (pred, scores.converged())
                    }
                };
                let scores = f1_scores(&pred, &gold, &classes)?;
                Ok(FoldRecord {
                    fold,
                    metrics: Some(MetricBundle::new(scores, None, gold.len())),
                    converged,
                    error: None,
                })
            })
            .collect::<Result<_>>()?;

        if folds.iter().all(|f| f.metrics.is_none()) {
            return Err(Error::Diverged {
                iterations: self.propagation.max_iterations,
                norm: f64::INFINITY,
            });
        }
        let config = json!({
            "protocol": "cross-validation",
            "mode": "binary",
            "k": self.k,
            "seed": self.seed,
            "population": population.len(),
            "propagation": matches!(method, Method::Propagation(_)).then(|| &self.propagation),
        });
        Ok(EvalReport::from_folds(task, method.to_string(), classes, folds, config))
    }
}

/// Cross-validate a propagation strategy with default fold settings.
pub fn evaluate_cv(
    g: &MediaGraph,
    ds: &LabeledDataset,
    strategy: Strategy,
    cfg: &PropagationConfig,
    k: usize,
    seed: u64,
) -> Result<EvalReport> {
    CrossValidation {
        k,
        seed,
        propagation: cfg.clone(),
    }
    .run(Some(g), ds, Method::Propagation(strategy))
}

#[derive(Clone, Debug)]
pub struct SplitOptions {
    pub epsilon_grid: Vec<f64>,
    /// After fitting epsilon, propagate again with train + dev rewards.
    pub rewards_include_dev: bool,
}

impl Default for SplitOptions {
    fn default() -> Self {
        SplitOptions {
            epsilon_grid: default_epsilon_grid(),
            rewards_include_dev: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SplitOutcome {
    pub report: EvalReport,
    pub epsilon: f64,
    pub dev_macro_f1: f64,
    /// Scores used to classify the test set.
    pub scores: ScoreVector,
}

/// Ternary train/dev/test evaluation: rewards from train, epsilon fitted on
/// dev, macro F1, accuracy and ordinal MAE on test.
pub fn evaluate_split(
    g: &MediaGraph,
    train: &LabeledDataset,
    dev: &LabeledDataset,
    test: &LabeledDataset,
    strategy: Strategy,
    cfg: &PropagationConfig,
    opts: &SplitOptions,
) -> Result<SplitOutcome> {
    let task = train.task();
    if dev.task() != task || test.task() != task {
        return Err(Error::InvalidConfig("splits must share one task".into()));
    }
    if test.is_empty() {
        return Err(Error::Empty);
    }
    let train_rewards = rewards_from_labels(train, None);
    let dev_scores = propagate(g, &train_rewards, strategy, cfg)?.require_converged()?;
    let (epsilon, dev_macro_f1) = fit_epsilon_with_score(&dev_scores, dev, &opts.epsilon_grid)?;

    let scores = if opts.rewards_include_dev {
        let merged = train.merge(dev)?;
        propagate(g, &rewards_from_labels(&merged, None), strategy, cfg)?.require_converged()?
    } else {
        dev_scores
    };

    let classes = Label::ternary_classes(task).to_vec();
    let (pred, gold): (Vec<Label>, Vec<Label>) = test
        .iter()
        .map(|(id, l)| (classify_ternary(scores.get_or_zero(id), epsilon, task), l))
        .unzip();
    let bundle = MetricBundle::new(f1_scores(&pred, &gold, &classes)?, Some(mae(&pred, &gold)?), gold.len());
    let config = json!({
        "protocol": "split",
        "mode": "ternary",
        "epsilon": epsilon,
        "dev_macro_f1": dev_macro_f1,
        "rewards_include_dev": opts.rewards_include_dev,
        "train": train.len(),
        "dev": dev.len(),
        "test": test.len(),
        "propagation": cfg,
    });
    let report = EvalReport::from_folds(
        task,
        strategy.to_string(),
        classes,
        vec![FoldRecord {
            fold: 0,
            metrics: Some(bundle),
            converged: true,
            error: None,
        }],
        config,
    );
    Ok(SplitOutcome {
        report,
        epsilon,
        dev_macro_f1,
        scores,
    })
}
