//! Score-to-label decision rules and fitting the neutral band on dev data.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::metrics::f1_scores;
use crate::labels::{Label, LabeledDataset, Task};
use crate::scores::ScoreVector;

pub const DEFAULT_EPSILON: f64 = 3e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Binary,
    Ternary,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifierConfig {
    pub mode: Mode,
    pub epsilon: f64,
    pub task: Task,
}

impl ClassifierConfig {
    pub fn binary(task: Task) -> Self {
        ClassifierConfig {
            mode: Mode::Binary,
            epsilon: DEFAULT_EPSILON,
            task,
        }
    }

    pub fn ternary(task: Task, epsilon: f64) -> Self {
        ClassifierConfig {
            mode: Mode::Ternary,
            epsilon,
            task,
        }
    }

    pub fn classify(&self, score: f64) -> Label {
        match self.mode {
            Mode::Binary => classify_binary(score, self.task),
            Mode::Ternary => classify_ternary(score, self.epsilon, self.task),
        }
    }
}

/// Right/High when `score > 0`, Left/Low otherwise (zero included).
pub fn classify_binary(score: f64, task: Task) -> Label {
    if score > 0.0 {
        Label::positive(task)
    } else {
        Label::negative(task)
    }
}

/// Left/Low below `-epsilon`, Right/High above `epsilon`, Center/Mixed on
/// the closed band in between.
pub fn classify_ternary(score: f64, epsilon: f64, task: Task) -> Label {
    if score < -epsilon {
        Label::negative(task)
    } else if score > epsilon {
        Label::positive(task)
    } else {
        Label::neutral(task)
    }
}

/// `epsilon` in `[1e-3, 1e-1]` by `1e-3`.
pub fn default_epsilon_grid() -> Vec<f64> {
    (1..=100).map(|k| k as f64 / 1000.0).collect()
}

/// Grid value of `epsilon` maximizing ternary macro F1 on the dev set.
/// Ties go to the smallest epsilon; dev sources without a score count as 0.
pub fn fit_epsilon(dev_scores: &ScoreVector, dev_labels: &LabeledDataset, grid: &[f64]) -> Result<f64> {
    Ok(fit_epsilon_with_score(dev_scores, dev_labels, grid)?.0)
}

/// [`fit_epsilon`], also returning the winning macro F1.
pub fn fit_epsilon_with_score(
    dev_scores: &ScoreVector,
    dev_labels: &LabeledDataset,
    grid: &[f64],
) -> Result<(f64, f64)> {
    if dev_labels.is_empty() {
        return Err(Error::EmptyDevSet);
    }
    if grid.is_empty() || grid.iter().any(|e| !(*e >= 0.0)) {
        return Err(Error::InvalidConfig("epsilon grid must be non-empty and non-negative".into()));
    }
    let task = dev_labels.task();
    let classes = Label::ternary_classes(task);
    let (scores, gold): (Vec<f64>, Vec<Label>) = dev_labels
        .iter()
        .map(|(id, l)| (dev_scores.get_or_zero(id), l))
        .unzip();

    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut best: Option<(f64, f64)> = None;
    for eps in sorted {
        let pred: Vec<Label> = scores.iter().map(|&s| classify_ternary(s, eps, task)).collect();
        let macro_f1 = f1_scores(&pred, &gold, &classes)?.macro_f1;
        if best.is_none_or(|(_, b)| macro_f1 > b) {
            best = Some((eps, macro_f1));
        }
    }
    Ok(best.expect("grid is non-empty"))
}
