use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::manifest::{DatasetManifest, Split, SplitCounts};

/// How a corpus is divided into train/val/test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SplitRule {
    /// Train and val are `round(fraction * n)`; test takes the remainder.
    Fractions { train: f64, val: f64, test: f64 },
    /// Absolute counts; a missing test count takes the remainder.
    Counts { train: usize, val: usize, test: Option<usize> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitPolicy {
    pub rule: SplitRule,
    /// Seed of the shuffle that precedes the split.
    pub seed: u64,
}

impl SplitPolicy {
    /// 60 / 15 / 25 percent.
    pub fn simulated(seed: u64) -> Self {
        SplitPolicy { rule: SplitRule::Fractions { train: 0.60, val: 0.15, test: 0.25 }, seed }
    }

    pub fn counts(train: usize, val: usize, test: Option<usize>, seed: u64) -> Self {
        SplitPolicy { rule: SplitRule::Counts { train, val, test }, seed }
    }

    pub fn split_counts(&self, n: usize) -> Result<SplitCounts> {
        match self.rule {
            SplitRule::Fractions { train, val, test } => {
                let fr = [train, val, test];
                if fr.iter().any(|f| !(*f >= 0.0) || !f.is_finite()) {
                    return Err(Error::config("split fractions must be >= 0"));
                }
                if ((train + val + test) - 1.0).abs() > 1e-9 {
                    return Err(Error::config("split fractions must sum to 1"));
                }
                let tr = (train * n as f64).round() as usize;
                let va = (val * n as f64).round() as usize;
                if tr + va > n {
                    return Err(Error::config(format!("fractions over-allocate {n} items")));
                }
                Ok(SplitCounts { train: tr, val: va, test: n - tr - va })
            }
            SplitRule::Counts { train, val, test } => {
                let test = match test {
                    Some(t) => t,
                    None => n.checked_sub(train + val).ok_or_else(|| {
                        Error::config(format!("train {train} + val {val} exceeds corpus size {n}"))
                    })?,
                };
                if train + val + test != n {
                    return Err(Error::config(format!(
                        "split counts {train}/{val}/{test} do not sum to corpus size {n}"
                    )));
                }
                Ok(SplitCounts { train, val, test })
            }
        }
    }

    /// Split label for each of `n` items: a seeded shuffle dealt in train, val, test order.
    pub fn assign(&self, n: usize) -> Result<Vec<Split>> {
        let counts = self.split_counts(n)?;
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(self.seed));
        let mut labels = vec![Split::Test; n];
        for (rank, &item) in order.iter().enumerate() {
            labels[item] = if rank < counts.train {
                Split::Train
            } else if rank < counts.train + counts.val {
                Split::Val
            } else {
                Split::Test
            };
        }
        Ok(labels)
    }
}

/// K-fold partition of the train+val pool.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub seed: u64,
    /// Entry ids per fold; fold `i` is the validation set of run `i`.
    pub folds: Vec<Vec<String>>,
}

impl FoldPlan {
    /// `(training ids, validation ids)` of run `i`. With `k = 1` both are the whole pool.
    pub fn run(&self, i: usize) -> (Vec<String>, Vec<String>) {
        let val = self.folds[i].clone();
        if self.k == 1 {
            return (val.clone(), val);
        }
        let train = self
            .folds
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .flat_map(|(_, f)| f.iter().cloned())
            .collect();
        (train, val)
    }
}

/// Shuffles the train+val pool with `seed` and deals it round-robin into `k` folds.
pub fn make_folds(manifest: &DatasetManifest, k: usize, seed: u64) -> Result<FoldPlan> {
    let mut pool: Vec<String> = manifest
        .entries
        .iter()
        .filter(|e| matches!(e.split, Split::Train | Split::Val))
        .map(|e| e.id.clone())
        .collect();
    if pool.is_empty() {
        return Err(Error::config("train+val pool is empty"));
    }
    if k == 0 {
        return Err(Error::config("k must be >= 1"));
    }
    if k > pool.len() {
        return Err(Error::KTooLarge { k, pool: pool.len() });
    }
    pool.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut folds = vec![Vec::new(); k];
    for (i, id) in pool.into_iter().enumerate() {
        folds[i % k].push(id);
    }
    Ok(FoldPlan { k, seed, folds })
}

/// Keeps `n` training entries drawn without replacement; val and test are untouched.
pub fn subsample(manifest: &DatasetManifest, n: usize, seed: u64) -> Result<DatasetManifest> {
    let train_idx: Vec<usize> = manifest
        .entries
        .iter()
        .enumerate()
        .filter(|(_, e)| e.split == Split::Train)
        .map(|(i, _)| i)
        .collect();
    if n > train_idx.len() {
        return Err(Error::NTooLarge { n, available: train_idx.len() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut keep: Vec<usize> = index::sample(&mut rng, train_idx.len(), n)
        .into_iter()
        .map(|i| train_idx[i])
        .collect();
    keep.sort_unstable();
    let entries = manifest
        .entries
        .iter()
        .enumerate()
        .filter(|(i, e)| e.split != Split::Train || keep.binary_search(i).is_ok())
        .map(|(_, e)| e.clone())
        .collect();
    let mut out = DatasetManifest { entries, ..manifest.clone() };
    out.subsample = Some(super::manifest::SubsampleRecord { train: n, seed });
    out.refresh_counts();
    Ok(out)
}
