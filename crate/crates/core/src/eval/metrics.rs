//! Classification metrics: one-vs-rest F1, accuracy, ordinal MAE.

use crate::error::{Error, Result};
use crate::labels::Label;

#[derive(Clone, Debug, PartialEq)]
pub struct F1Scores {
    /// F1 of each requested class, in the order given.
    pub per_class: Vec<(Label, f64)>,
    /// Unweighted mean of `per_class`.
    pub macro_f1: f64,
    pub accuracy: f64,
}

impl F1Scores {
    pub fn f1(&self, class: Label) -> Option<f64> {
        self.per_class.iter().find(|(l, _)| *l == class).map(|&(_, f)| f)
    }
}

fn check(pred: &[Label], gold: &[Label]) -> Result<()> {
    if pred.len() != gold.len() {
        return Err(Error::LengthMismatch {
            pred: pred.len(),
            gold: gold.len(),
        });
    }
    if gold.is_empty() {
        return Err(Error::Empty);
    }
    Ok(())
}

/// `matrix[i][j]` counts items with gold `classes[i]` predicted as `classes[j]`.
pub fn confusion_matrix(pred: &[Label], gold: &[Label], classes: &[Label]) -> Result<Vec<Vec<usize>>> {
    check(pred, gold)?;
    let mut m = vec![vec![0; classes.len()]; classes.len()];
    for (p, g) in pred.iter().zip(gold) {
        if let (Some(i), Some(j)) = (
            classes.iter().position(|c| c == g),
            classes.iter().position(|c| c == p),
        ) {
            m[i][j] += 1;
        }
    }
    Ok(m)
}

/// Per-class F1 is `2 tp / (2 tp + fp + fn)`, and 0 when the class appears
/// in neither `pred` nor `gold`.
pub fn f1_scores(pred: &[Label], gold: &[Label], classes: &[Label]) -> Result<F1Scores> {
    check(pred, gold)?;
    let per_class: Vec<(Label, f64)> = classes
        .iter()
        .map(|&c| {
            let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
            for (&p, &g) in pred.iter().zip(gold) {
                match (p == c, g == c) {
                    (true, true) => tp += 1,
                    (true, false) => fp += 1,
                    (false, true) => fn_ += 1,
                    _ => {}
                }
            }
            let denom = 2 * tp + fp + fn_;
            let f1 = if denom == 0 { 0.0 } else { (2 * tp) as f64 / denom as f64 };
            (c, f1)
        })
        .collect();
    let macro_f1 = if per_class.is_empty() {
        0.0
    } else {
        per_class.iter().map(|&(_, f)| f).sum::<f64>() / per_class.len() as f64
    };
    let correct = pred.iter().zip(gold).filter(|(p, g)| p == g).count();
    Ok(F1Scores {
        per_class,
        macro_f1,
        accuracy: correct as f64 / gold.len() as f64,
    })
}

/// Mean absolute difference of ordinal codes (Left/Low 0, Center/Mixed 1,
/// Right/High 2).
pub fn mae(pred: &[Label], gold: &[Label]) -> Result<f64> {
    check(pred, gold)?;
    let total: u64 = pred
        .iter()
        .zip(gold)
        .map(|(p, g)| u64::from(p.ordinal().abs_diff(g.ordinal())))
        .sum();
    Ok(total as f64 / gold.len() as f64)
}
