//! Random forest of Gini-split binary decision trees.
//!
//! Conventions:
//!
//! * each tree trains on a bootstrap sample of the same size as the input;
//! * each node draws `⌈√d⌉` distinct candidate features;
//! * thresholds are midpoints between consecutive distinct sorted values and
//!   a row goes left when `x[feature] <= threshold`;
//! * the split with the lowest weighted Gini impurity wins, earlier
//!   candidates winning ties;
//! * a node becomes a leaf at `max_depth`, when pure, when it has fewer than
//!   `min_samples_split` rows, or when no candidate feature varies;
//! * a leaf votes for its majority class, ties going to the parent's
//!   majority (non-jammed at the root);
//! * the forest score is the fraction of trees voting jammed and the forest
//!   predicts jammed iff the score is strictly above 0.5.

// float math in no_std builds; unused when std is linked for tests
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};
use crate::seed;

/// Gini impurity `1 − Σ p²` of a `[negative, positive]` count pair.
pub fn gini(counts: [usize; 2]) -> f64 {
    let n = (counts[0] + counts[1]) as f64;
    if n == 0.0 {
        return 0.0;
    }
    let p0 = counts[0] as f64 / n;
    let p1 = counts[1] as f64 / n;
    1.0 - p0 * p0 - p1 * p1
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_samples_split: usize,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            max_depth: 10,
            min_samples_split: 2,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        /// `[non-jammed, jammed]` training rows reaching the leaf.
        counts: [usize; 2],
        class: bool,
    },
}

/// A binary tree stored as a node arena; node 0 is the root.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn predict(&self, x: &[f64]) -> bool {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[feature] <= threshold { left } else { right },
                Node::Leaf { class, .. } => return class,
            }
        }
    }

    /// Longest root-to-leaf path, in edges.
    pub fn depth(&self) -> usize {
        fn walk(t: &Tree, i: usize) -> usize {
            match t.nodes[i] {
                Node::Split { left, right, .. } => 1 + walk(t, left).max(walk(t, right)),
                Node::Leaf { .. } => 0,
            }
        }
        walk(self, 0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Forest {
    pub trees: Vec<Tree>,
    pub n_features: usize,
    pub params: ForestParams,
    /// Set when the training labels held a single class.
    pub degenerate: bool,
}

struct Builder<'a, R: Rng> {
    x: &'a [Vec<f64>],
    y: &'a [bool],
    params: &'a ForestParams,
    n_candidates: usize,
    rng: R,
    nodes: Vec<Node>,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    impurity: f64,
}

impl<R: Rng> Builder<'_, R> {
    fn counts(&self, rows: &[usize]) -> [usize; 2] {
        let pos = rows.iter().filter(|&&i| self.y[i]).count();
        [rows.len() - pos, pos]
    }

    fn build(&mut self, rows: Vec<usize>, depth: usize, parent_class: bool) -> usize {
        let counts = self.counts(&rows);
        let class = match counts[1].cmp(&counts[0]) {
            core::cmp::Ordering::Greater => true,
            core::cmp::Ordering::Less => false,
            core::cmp::Ordering::Equal => parent_class,
        };
        let slot = self.nodes.len();
        self.nodes.push(Node::Leaf { counts, class });

        let pure = counts[0] == 0 || counts[1] == 0;
        if depth >= self.params.max_depth || pure || rows.len() < self.params.min_samples_split {
            return slot;
        }
        let Some(best) = self.best_split(&rows) else {
            return slot;
        };
        let (left, right): (Vec<usize>, Vec<usize>) = rows
            .iter()
            .partition(|&&i| self.x[i][best.feature] <= best.threshold);
        let l = self.build(left, depth + 1, class);
        let r = self.build(right, depth + 1, class);
        self.nodes[slot] = Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left: l,
            right: r,
        };
        slot
    }

    fn best_split(&mut self, rows: &[usize]) -> Option<BestSplit> {
        let d = self.x[0].len();
        let candidates = index::sample(&mut self.rng, d, self.n_candidates);
        let n = rows.len() as f64;
        let total = self.counts(rows);
        let mut best: Option<BestSplit> = None;
        let mut pairs: Vec<(f64, bool)> = Vec::with_capacity(rows.len());
        for feature in candidates.iter() {
            pairs.clear();
            pairs.extend(rows.iter().map(|&i| (self.x[i][feature], self.y[i])));
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut left = [0usize; 2];
            for k in 0..pairs.len() - 1 {
                left[pairs[k].1 as usize] += 1;
                let (a, b) = (pairs[k].0, pairs[k + 1].0);
                if a == b {
                    continue;
                }
                let right = [total[0] - left[0], total[1] - left[1]];
                let nl = (k + 1) as f64;
                let impurity = (nl * gini(left) + (n - nl) * gini(right)) / n;
                if best.as_ref().is_none_or(|b| impurity < b.impurity) {
                    let mid = 0.5 * (a + b);
                    let threshold = if mid < b { mid } else { a };
                    best = Some(BestSplit {
                        feature,
                        threshold,
                        impurity,
                    });
                }
            }
        }
        best
    }
}

impl Forest {
    /// Trains `params.n_trees` trees on bootstrap samples of `(x, y)`.
    ///
    /// Tree `t` uses the generator seeded with `mix_seed(params.seed, t)`, so
    /// trees can be trained independently with identical results.
    pub fn fit(x: &[Vec<f64>], y: &[bool], params: &ForestParams) -> Result<Self> {
        if x.len() != y.len() || x.len() < 2 {
            return Err(Error::input("need at least two rows and one label per row"));
        }
        let d = x[0].len();
        if d == 0 || x.iter().any(|r| r.len() != d) {
            return Err(Error::input("rows must be non-empty and of equal length"));
        }
        if params.n_trees == 0 {
            return Err(Error::config("n_trees must be positive"));
        }
        let positives = y.iter().filter(|v| **v).count();
        if positives == 0 || positives == y.len() {
            let class = positives > 0;
            let counts = [y.len() - positives, positives];
            let leaf = Tree {
                nodes: vec![Node::Leaf { counts, class }],
            };
            return Ok(Forest {
                trees: vec![leaf; params.n_trees],
                n_features: d,
                params: *params,
                degenerate: true,
            });
        }
        let trees = (0..params.n_trees)
            .map(|t| Self::fit_tree(x, y, params, t))
            .collect();
        Ok(Forest {
            trees,
            n_features: d,
            params: *params,
            degenerate: false,
        })
    }

    /// Trains tree number `t` of the forest.
    pub fn fit_tree(x: &[Vec<f64>], y: &[bool], params: &ForestParams, t: usize) -> Tree {
        let d = x[0].len();
        let mut rng = seed::rng(seed::mix_seed(params.seed, t as u64));
        let n = x.len();
        let rows: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
        let n_candidates = ceil_sqrt(d).clamp(1, d);
        let mut b = Builder {
            x,
            y,
            params,
            n_candidates,
            rng,
            nodes: Vec::new(),
        };
        b.build(rows, 0, false);
        Tree { nodes: b.nodes }
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n_features {
            return Err(Error::input(alloc::format!(
                "forest expects {} features, got {}",
                self.n_features,
                x.len()
            )));
        }
        Ok(())
    }

    /// Fraction of trees voting jammed, in [0, 1].
    pub fn score(&self, x: &[f64]) -> Result<f64> {
        self.check(x)?;
        let votes = self.trees.iter().filter(|t| t.predict(x)).count();
        Ok(votes as f64 / self.trees.len() as f64)
    }

    /// Majority vote; an exact tie predicts non-jammed.
    pub fn predict(&self, x: &[f64]) -> Result<bool> {
        Ok(self.score(x)? > 0.5)
    }
}

/// `⌈√d⌉` computed exactly on integers.
fn ceil_sqrt(d: usize) -> usize {
    let mut k = 0usize;
    while k * k < d {
        k += 1;
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gini_definition() {
        assert_eq!(gini([10, 10]), 0.5);
        assert_eq!(gini([20, 0]), 0.0);
        assert_eq!(gini([0, 0]), 0.0);
    }

    #[test]
    fn integer_ceil_sqrt() {
        assert_eq!(ceil_sqrt(1), 1);
        assert_eq!(ceil_sqrt(4), 2);
        assert_eq!(ceil_sqrt(6), 3);
    }

    fn separable() -> (Vec<Vec<f64>>, Vec<bool>) {
        let x: Vec<Vec<f64>> = (-50..50).map(|i| vec![i as f64 + 0.5]).collect();
        let y = x.iter().map(|r| r[0] > 0.0).collect();
        (x, y)
    }

    #[test]
    fn separable_data_fits_perfectly() {
        let (x, y) = separable();
        let f = Forest::fit(
            &x,
            &y,
            &ForestParams {
                seed: 3,
                ..Default::default()
            },
        )
        .unwrap();
        for (r, l) in x.iter().zip(&y) {
            assert_eq!(f.predict(r).unwrap(), *l);
        }
        assert!(!f.degenerate);
    }

    #[test]
    fn same_seed_same_forest() {
        let (x, y) = separable();
        let p = ForestParams {
            n_trees: 10,
            seed: 8,
            ..Default::default()
        };
        assert_eq!(
            Forest::fit(&x, &y, &p).unwrap(),
            Forest::fit(&x, &y, &p).unwrap()
        );
    }

    #[test]
    fn depth_limit_respected() {
        let x: Vec<Vec<f64>> = (0..400)
            .map(|i| vec![(i * 37 % 101) as f64, (i % 7) as f64])
            .collect();
        let y: Vec<bool> = (0..400).map(|i| (i * 13) % 5 < 2).collect();
        let p = ForestParams {
            n_trees: 5,
            max_depth: 3,
            seed: 1,
            ..Default::default()
        };
        let f = Forest::fit(&x, &y, &p).unwrap();
        for t in &f.trees {
            assert!(t.depth() <= 3);
            for n in &t.nodes {
                if let Node::Leaf { counts, .. } = n {
                    assert!(counts[0] + counts[1] > 0);
                }
            }
        }
    }

    #[test]
    fn single_class_is_degenerate() {
        let x = vec![vec![1.0], vec![2.0], vec![3.0]];
        let f = Forest::fit(&x, &[true, true, true], &ForestParams::default()).unwrap();
        assert!(f.degenerate);
        assert_eq!(f.score(&[0.0]).unwrap(), 1.0);
    }

    #[test]
    fn tie_predicts_non_jammed() {
        let yes = Tree {
            nodes: vec![Node::Leaf {
                counts: [0, 1],
                class: true,
            }],
        };
        let no = Tree {
            nodes: vec![Node::Leaf {
                counts: [1, 0],
                class: false,
            }],
        };
        let f = Forest {
            trees: vec![yes, no],
            n_features: 1,
            params: ForestParams {
                n_trees: 2,
                ..Default::default()
            },
            degenerate: false,
        };
        assert_eq!(f.score(&[0.0]).unwrap(), 0.5);
        assert!(!f.predict(&[0.0]).unwrap());
        assert!(f.score(&[0.0, 1.0]).is_err());
    }

    #[test]
    fn input_checks() {
        assert!(Forest::fit(&[vec![1.0]], &[true], &ForestParams::default()).is_err());
        assert!(Forest::fit(&[vec![1.0], vec![2.0]], &[true], &ForestParams::default()).is_err());
    }
}
