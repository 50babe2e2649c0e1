use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::seed;

/// A stratified train/test partition of record indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitSpec {
    /// Sorted ascending.
    pub train: Vec<usize>,
    /// Sorted ascending.
    pub test: Vec<usize>,
    /// `[non-jammed, jammed]`
    pub train_counts: [usize; 2],
    /// `[non-jammed, jammed]`
    pub test_counts: [usize; 2],
}

/// Stratified split with exact per-class training counts; every remaining
/// record goes to the test set.
pub fn train_test_split(
    labels: &[bool],
    train_jammed: usize,
    train_nonjammed: usize,
    seed: u64,
) -> Result<SplitSpec> {
    let mut neg: Vec<usize> = (0..labels.len()).filter(|&i| !labels[i]).collect();
    let mut pos: Vec<usize> = (0..labels.len()).filter(|&i| labels[i]).collect();
    if train_nonjammed > neg.len() || train_jammed > pos.len() {
        return Err(Error::input(alloc::format!(
            "requested {train_nonjammed}/{train_jammed} training records but only {}/{} available",
            neg.len(),
            pos.len()
        )));
    }
    let mut rng = seed::rng(seed);
    neg.shuffle(&mut rng);
    pos.shuffle(&mut rng);

    let mut train: Vec<usize> = neg[..train_nonjammed]
        .iter()
        .chain(&pos[..train_jammed])
        .copied()
        .collect();
    let mut test: Vec<usize> = neg[train_nonjammed..]
        .iter()
        .chain(&pos[train_jammed..])
        .copied()
        .collect();
    train.sort_unstable();
    test.sort_unstable();
    Ok(SplitSpec {
        train,
        test,
        train_counts: [train_nonjammed, train_jammed],
        test_counts: [neg.len() - train_nonjammed, pos.len() - train_jammed],
    })
}
