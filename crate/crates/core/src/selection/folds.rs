use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{HmrError, Result};

/// Assignment of whole cultures to `k` folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    k: usize,
    seed: u64,
    assignments: BTreeMap<String, usize>,
}

impl FoldPlan {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn fold_of(&self, culture: &str) -> Option<usize> {
        self.assignments.get(culture).copied()
    }

    pub fn assignments(&self) -> &BTreeMap<String, usize> {
        &self.assignments
    }

    pub fn test_cultures(&self, fold: usize) -> BTreeSet<String> {
        self.assignments
            .iter()
            .filter(|(_, f)| **f == fold)
            .map(|(c, _)| c.clone())
            .collect()
    }

    pub fn train_cultures(&self, fold: usize) -> BTreeSet<String> {
        self.assignments
            .iter()
            .filter(|(_, f)| **f != fold)
            .map(|(c, _)| c.clone())
            .collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for f in self.assignments.values() {
            sizes[*f] += 1;
        }
        sizes
    }
}

/// Shuffles the distinct culture ids with `seed` and deals them round-robin
/// into `k` folds. The plan does not depend on the order of `culture_ids`.
pub fn plan_folds<S: AsRef<str>>(culture_ids: &[S], k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(HmrError::invalid(format!("need at least 2 folds, got {k}")));
    }
    let unique: BTreeSet<&str> = culture_ids.iter().map(AsRef::as_ref).collect();
    if unique.len() < k {
        return Err(HmrError::invalid(format!(
            "{} culture(s) cannot fill {k} folds",
            unique.len()
        )));
    }
    let mut ids: Vec<&str> = unique.into_iter().collect();
    ids.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let assignments = ids
        .into_iter()
        .enumerate()
        .map(|(i, c)| (c.to_owned(), i % k))
        .collect();
    Ok(FoldPlan {
        k,
        seed,
        assignments,
    })
}
