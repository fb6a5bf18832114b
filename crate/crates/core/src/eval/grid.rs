//! Exhaustive hyperparameter search on a dev split.

use rayon::prelude::*;
use serde::Serialize;

use crate::classify::{default_epsilon_grid, fit_epsilon_with_score, ClassifierConfig};
use crate::error::{Error, Result};
use crate::graph::MediaGraph;
use crate::labels::{rewards_from_labels, LabeledDataset};
use crate::propagation::{propagate, PropagationConfig, Strategy};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridRanges {
    pub gammas: Vec<f64>,
    pub ns: Vec<usize>,
    pub epsilons: Vec<f64>,
}

impl Default for GridRanges {
    /// gamma in [0.05, 0.95] by 0.05, n in 1..=10, epsilon in [1e-3, 1e-1] by 1e-3.
    fn default() -> Self {
        GridRanges {
            gammas: (1..=19).map(|k| k as f64 / 20.0).collect(),
            ns: (1..=10).collect(),
            epsilons: default_epsilon_grid(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridChoice {
    pub propagation: PropagationConfig,
    pub classifier: ClassifierConfig,
    pub dev_macro_f1: f64,
    pub cells_evaluated: usize,
}

/// Pick the configuration with the best ternary dev macro F1.
///
/// Gamma is searched for F, P and FP; n for I (the other parameter stays at
/// `base`). Ties go to the smallest gamma, then n, then epsilon. Cells whose
/// solver diverges or fails to converge are skipped.
pub fn grid_search(
    g: &MediaGraph,
    train: &LabeledDataset,
    dev: &LabeledDataset,
    strategy: Strategy,
    base: &PropagationConfig,
    ranges: &GridRanges,
) -> Result<GridChoice> {
    if dev.is_empty() {
        return Err(Error::EmptyDevSet);
    }
    let mut cells: Vec<(f64, usize)> = if strategy.uses_gamma() {
        ranges.gammas.iter().map(|&gm| (gm, base.n)).collect()
    } else {
        ranges.ns.iter().map(|&n| (base.gamma, n)).collect()
    };
    cells.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    cells.dedup();
    if cells.is_empty() || ranges.epsilons.is_empty() {
        return Err(Error::InvalidConfig("empty search grid".into()));
    }

    let rewards = rewards_from_labels(train, None);
    let results: Vec<Option<(PropagationConfig, f64, f64)>> = cells
        .par_iter()
        .map(|&(gamma, n)| {
            let cfg = PropagationConfig { gamma, n, ..base.clone() };
            let scores = match propagate(g, &rewards, strategy, &cfg).and_then(|s| s.require_converged()) {
                Ok(s) => s,
                Err(e) if e.is_solver_failure() => {
                    log::warn!("grid cell gamma={gamma} n={n} skipped: {e}");
                    return Ok(None);
                }
                Err(e) => return Err(e),
            };
            let (eps, f1) = fit_epsilon_with_score(&scores, dev, &ranges.epsilons)?;
            Ok(Some((cfg, eps, f1)))
        })
        .collect::<Result<_>>()?;

    let evaluated = results.iter().flatten().count();
    let mut best: Option<(PropagationConfig, f64, f64)> = None;
    for r in results.into_iter().flatten() {
        if best.as_ref().is_none_or(|b| r.2 > b.2) {
            best = Some(r);
        }
    }
    let (propagation, epsilon, dev_macro_f1) = best.ok_or(Error::Diverged {
        iterations: base.max_iterations,
        norm: f64::INFINITY,
    })?;
    Ok(GridChoice {
        propagation,
        classifier: ClassifierConfig::ternary(dev.task(), epsilon),
        dev_macro_f1,
        cells_evaluated: evaluated,
    })
}
