//! Majority-class and uniform-random reference predictors.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::labels::Label;

/// Most frequent training label; ties go to the lower ordinal.
pub fn majority_class(train_gold: &[Label]) -> Result<Label> {
    let mut counts: Vec<(Label, usize)> = Vec::new();
    for &l in train_gold {
        match counts.iter_mut().find(|(c, _)| *c == l) {
            Some((_, n)) => *n += 1,
            None => counts.push((l, 1)),
        }
    }
    counts
        .into_iter()
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
        .map(|(l, _)| l)
        .ok_or(Error::Empty)
}

/// Predict the training majority for each of `count` items.
pub fn majority_baseline(train_gold: &[Label], count: usize) -> Result<Vec<Label>> {
    Ok(vec![majority_class(train_gold)?; count])
}

/// One uniform draw from `classes` per gold item.
pub fn random_baseline(gold: &[Label], classes: &[Label], seed: u64) -> Result<Vec<Label>> {
    if gold.is_empty() || classes.is_empty() {
        return Err(Error::Empty);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(gold
        .iter()
        .map(|_| *classes.choose(&mut rng).expect("non-empty"))
        .collect())
}
