//! Seeded, stratified k-fold assignment.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::domain::SourceId;
use crate::error::{Error, Result};
use crate::labels::{Label, LabeledDataset};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FoldPlan {
    pub k: usize,
    pub seed: u64,
    pub assignments: BTreeMap<SourceId, usize>,
}

impl FoldPlan {
    /// Members of fold `fold` in canonical order.
    pub fn test_set(&self, fold: usize) -> BTreeSet<SourceId> {
        self.assignments
            .iter()
            .filter(|&(_, &f)| f == fold)
            .map(|(id, _)| id.clone())
            .collect()
    }

    pub fn train_set(&self, fold: usize) -> BTreeSet<SourceId> {
        self.assignments
            .iter()
            .filter(|&(_, &f)| f != fold)
            .map(|(id, _)| id.clone())
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in self.assignments.values() {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Every class needs at least `k - 1` members, so at most one fold lacks it.
///
/// Shuffle each class with a seeded generator and deal its members
/// round-robin, continuing the deal position from one class to the next so
/// that overall fold sizes also differ by at most one.
pub fn stratified_kfold(ds: &LabeledDataset, k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::InvalidConfig(format!("k must be at least 2, got {k}")));
    }
    let mut by_class: BTreeMap<Label, Vec<SourceId>> = BTreeMap::new();
    for (id, l) in ds.iter() {
        by_class.entry(l).or_default().push(id.clone());
    }
    if let Some((class, members)) = by_class.iter().find(|(_, m)| m.len() + 1 < k) {
        return Err(Error::TooFewSamples {
            class: class.to_string(),
            count: members.len(),
            k,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignments = BTreeMap::new();
    let mut position = 0usize;
    for members in by_class.values_mut() {
        members.shuffle(&mut rng);
        for id in members.drain(..) {
            assignments.insert(id, position % k);
            position += 1;
        }
    }
    Ok(FoldPlan { k, seed, assignments })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::normalize_domain;
    use crate::labels::{FactualLabel, Task};
    use proptest::prelude::*;

    fn dataset(counts: &[usize]) -> LabeledDataset {
        let entries = counts.iter().enumerate().flat_map(|(code, &n)| {
            (0..n).map(move |i| {
                (
                    normalize_domain(&format!("c{code}-{i}.org")).unwrap(),
                    Label::from_ordinal(Task::Factual, code as u8).unwrap(),
                )
            })
        });
        LabeledDataset::from_labels(Task::Factual, entries).unwrap()
    }

    #[test]
    fn ten_sources_five_folds() {
        let ds = dataset(&[4, 0, 6]);
        let plan = stratified_kfold(&ds, 5, 0).unwrap();
        assert_eq!(plan.fold_sizes(), vec![2; 5]);
        for f in 0..5 {
            let high = plan
                .test_set(f)
                .iter()
                .filter(|id| ds.get(id) == Some(Label::Factual(FactualLabel::High)))
                .count();
            assert!((1..=2).contains(&high));
        }
        assert_eq!(plan, stratified_kfold(&ds, 5, 0).unwrap());
    }

    #[test]
    fn too_few_samples() {
        let err = stratified_kfold(&dataset(&[3, 0, 10]), 5, 0).unwrap_err();
        assert!(matches!(err, Error::TooFewSamples { count: 3, k: 5, .. }));
        assert!(stratified_kfold(&dataset(&[5, 5]), 1, 0).is_err());
    }

    proptest! {
        #[test]
        fn folds_are_balanced(counts in prop::collection::vec(5usize..40, 1..4), k in 2usize..6, seed in any::<u64>()) {
            let ds = dataset(&counts);
            let plan = stratified_kfold(&ds, k, seed).unwrap();
            let sizes = plan.fold_sizes();
            prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
            for (l, _) in ds.class_counts().into_iter().filter(|&(_, c)| c > 0) {
                let per_fold: Vec<usize> = (0..k)
                    .map(|f| plan.test_set(f).iter().filter(|id| ds.get(id) == Some(l)).count())
                    .collect();
                prop_assert!(per_fold.iter().max().unwrap() - per_fold.iter().min().unwrap() <= 1);
            }
            prop_assert_eq!(plan.assignments.len(), ds.len());
        }
    }
}
