//! Evaluation reports: per-fold metric bundles, mean/deviation summaries,
//! JSON and plain-text renderings.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::eval::metrics::F1Scores;
use crate::labels::{Label, Task};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricBundle {
    pub per_class_f1: Vec<(Label, f64)>,
    pub macro_f1: f64,
    pub accuracy: f64,
    pub mae: Option<f64>,
    pub support: usize,
}

impl MetricBundle {
    pub fn new(scores: F1Scores, mae: Option<f64>, support: usize) -> Self {
        MetricBundle {
            per_class_f1: scores.per_class,
            macro_f1: scores.macro_f1,
            accuracy: scores.accuracy,
            mae,
            support,
        }
    }

    fn to_json(&self) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("macro_f1".into(), json!(self.macro_f1));
        for (l, f) in &self.per_class_f1 {
            m.insert(format!("f1_{}", l.name()), json!(f));
        }
        m.insert("accuracy".into(), json!(self.accuracy));
        if let Some(e) = self.mae {
            m.insert("mae".into(), json!(e));
        }
        m.insert("support".into(), json!(self.support));
        m
    }
}

/// Mean and sample standard deviation over folds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Summary {
        let n = values.len();
        if n == 0 {
            return Summary { mean: 0.0, std: 0.0 };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n < 2 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        };
        Summary { mean, std }
    }

    fn percent(&self) -> String {
        format!("{:.2} ± {:.2}", 100.0 * self.mean, 100.0 * self.std)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FoldRecord {
    pub fold: usize,
    pub metrics: Option<MetricBundle>,
    pub converged: bool,
    /// Set when the fold was skipped.
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub task: Task,
    pub method: String,
    pub classes: Vec<Label>,
    pub per_class_f1: Vec<(Label, Summary)>,
    pub macro_f1: Summary,
    pub accuracy: Summary,
    pub mae: Option<Summary>,
    pub per_fold: Vec<FoldRecord>,
    pub config: Value,
}

impl EvalReport {
    pub fn from_folds(task: Task, method: String, classes: Vec<Label>, per_fold: Vec<FoldRecord>, config: Value) -> Self {
        let bundles: Vec<&MetricBundle> = per_fold.iter().filter_map(|f| f.metrics.as_ref()).collect();
        let collect = |f: &dyn Fn(&MetricBundle) -> f64| Summary::of(&bundles.iter().map(|b| f(b)).collect::<Vec<_>>());
        let per_class_f1 = classes
            .iter()
            .map(|&c| {
                let s = collect(&|b: &MetricBundle| {
                    b.per_class_f1.iter().find(|(l, _)| *l == c).map_or(0.0, |&(_, f)| f)
                });
                (c, s)
            })
            .collect();
        let has_mae = !bundles.is_empty() && bundles.iter().all(|b| b.mae.is_some());
        EvalReport {
            task,
            method,
            per_class_f1,
            macro_f1: collect(&|b: &MetricBundle| b.macro_f1),
            accuracy: collect(&|b: &MetricBundle| b.accuracy),
            mae: has_mae.then(|| collect(&|b: &MetricBundle| b.mae.unwrap())),
            classes,
            per_fold,
            config,
        }
    }

    pub fn f1(&self, class: Label) -> Option<Summary> {
        self.per_class_f1.iter().find(|(l, _)| *l == class).map(|&(_, s)| s)
    }

    pub fn evaluated_folds(&self) -> usize {
        self.per_fold.iter().filter(|f| f.metrics.is_some()).count()
    }

    /// Machine-readable form with fixed field names (`macro_f1`,
    /// `f1_<class>`, `accuracy`, `mae`) and the raw per-fold values.
    pub fn to_json(&self, provenance: Option<Value>) -> Value {
        let summary = |s: &Summary| json!({ "mean": s.mean, "std": s.std });
        let mut metrics = Map::new();
        metrics.insert("macro_f1".into(), summary(&self.macro_f1));
        for (l, s) in &self.per_class_f1 {
            metrics.insert(format!("f1_{}", l.name()), summary(s));
        }
        metrics.insert("accuracy".into(), summary(&self.accuracy));
        if let Some(m) = &self.mae {
            metrics.insert("mae".into(), summary(m));
        }
        let folds: Vec<Value> = self
            .per_fold
            .iter()
            .map(|f| {
                let mut m = f.metrics.as_ref().map(MetricBundle::to_json).unwrap_or_default();
                m.insert("fold".into(), json!(f.fold));
                m.insert("converged".into(), json!(f.converged));
                if let Some(e) = &f.error {
                    m.insert("error".into(), json!(e));
                }
                Value::Object(m)
            })
            .collect();
        let mut root = Map::new();
        if let Some(p) = provenance {
            root.insert("provenance".into(), p);
        }
        root.insert("task".into(), json!(self.task));
        root.insert("method".into(), json!(self.method));
        root.insert("metrics".into(), Value::Object(metrics));
        root.insert("per_fold".into(), Value::Array(folds));
        root.insert("config".into(), self.config.clone());
        Value::Object(root)
    }

    /// Human-readable table in percent, `mean ± std`.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let mut head = format!("{:<12} {:<18}", "Task", "Method");
        let mut row = format!("{:<12} {:<18}", self.task.to_string(), self.method);
        let mut col = |name: String, value: String| {
            let w = value.chars().count().max(name.chars().count()) + 2;
            let _ = write!(head, "{name:>w$}");
            let _ = write!(row, "{value:>w$}");
        };
        col("Macro avg.".into(), self.macro_f1.percent());
        for (l, s) in self.per_class_f1.iter().rev() {
            col(format!("F1 {}", l.name()), s.percent());
        }
        col("Accuracy".into(), self.accuracy.percent());
        if let Some(m) = &self.mae {
            col("MAE".into(), format!("{:.3} ± {:.3}", m.mean, m.std));
        }
        let _ = writeln!(out, "{head}");
        let _ = writeln!(out, "{row}");
        for f in self.per_fold.iter().filter(|f| f.error.is_some()) {
            let _ = writeln!(out, "fold {} skipped: {}", f.fold, f.error.as_deref().unwrap_or(""));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_standard_deviation() {
        let s = Summary::of(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        assert!((s.std - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(Summary::of(&[0.7]).std, 0.0);
    }
}
