use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitVec;
use crate::error::{Error, Result};

/// Derives an independent seed for sub-stream `stream` of `base` (splitmix64).
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut z = base ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn shuffled(n: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng(seed));
    order
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub n_folds: usize,
    pub assignments: Vec<usize>,
    pub seed: u64,
}

impl FoldPlan {
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] == fold)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] != fold)
            .collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.n_folds];
        for &f in &self.assignments {
            sizes[f] += 1;
        }
        sizes
    }
}

fn check_folds(n_instances: usize, n_folds: usize) -> Result<()> {
    if n_folds < 2 {
        return Err(Error::invalid(format!("need at least 2 folds, got {n_folds}")));
    }
    if n_instances < n_folds {
        return Err(Error::invalid(format!(
            "{n_instances} instances cannot fill {n_folds} folds"
        )));
    }
    Ok(())
}

/// Seeded shuffle, then round-robin assignment to folds.
pub fn make_folds(n_instances: usize, n_folds: usize, seed: u64) -> Result<FoldPlan> {
    check_folds(n_instances, n_folds)?;
    let mut assignments = vec![0; n_instances];
    for (pos, idx) in shuffled(n_instances, seed).into_iter().enumerate() {
        assignments[idx] = pos % n_folds;
    }
    Ok(FoldPlan {
        n_folds,
        assignments,
        seed,
    })
}

/// Like [`make_folds`], but deals each class separately so every fold gets
/// a near-equal share of both labels. The round-robin counter carries over
/// between classes, so fold sizes still differ by at most one.
pub fn make_stratified_folds(labels: &BitVec, n_folds: usize, seed: u64) -> Result<FoldPlan> {
    let n = labels.len();
    check_folds(n, n_folds)?;
    let mut assignments = vec![0; n];
    let order = shuffled(n, seed);
    let mut pos = 0;
    for class in [true, false] {
        for &idx in &order {
            if labels.get(idx) == class {
                assignments[idx] = pos % n_folds;
                pos += 1;
            }
        }
    }
    Ok(FoldPlan {
        n_folds,
        assignments,
        seed,
    })
}

/// Seeded shuffle, then the first `round(fraction · n)` indices go to the
/// test side. Both sides come back sorted.
pub fn holdout_split(n_instances: usize, fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::invalid(format!("holdout fraction must lie in (0, 1), got {fraction}")));
    }
    let n_test = (fraction * n_instances as f64).round() as usize;
    if n_test == 0 || n_test == n_instances {
        return Err(Error::invalid(format!(
            "holdout fraction {fraction} of {n_instances} instances leaves an empty side"
        )));
    }
    let order = shuffled(n_instances, seed);
    let mut test = order[..n_test].to_vec();
    let mut train = order[n_test..].to_vec();
    test.sort_unstable();
    train.sort_unstable();
    Ok((train, test))
}

/// One shuffled pass over the training indices, cut into consecutive slices.
#[derive(Debug, Clone)]
pub struct MiniBatches {
    order: Vec<usize>,
    batch_size: usize,
}

impl MiniBatches {
    pub fn iter(&self) -> std::slice::Chunks<'_, usize> {
        self.order.chunks(self.batch_size)
    }

    pub fn len(&self) -> usize {
        self.order.len().div_ceil(self.batch_size)
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn batch_size(&self) -> usize {
        self.batch_size
    }
}

pub fn minibatches(n_instances: usize, batch_size: usize, seed: u64) -> Result<MiniBatches> {
    if batch_size == 0 || batch_size > n_instances {
        return Err(Error::invalid(format!(
            "batch size {batch_size} outside 1..={n_instances}"
        )));
    }
    Ok(MiniBatches {
        order: shuffled(n_instances, seed),
        batch_size,
    })
}

/// `round(sqrt(n))`, at least 1.
pub fn default_batch_size(n_instances: usize) -> usize {
    ((n_instances as f64).sqrt().round() as usize).max(1)
}
