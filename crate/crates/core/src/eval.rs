//! Classification metrics, ROC analysis and per-trajectory aggregation.
//!
//! The positive class is "jammed" throughout. Metrics whose denominator is
//! zero are reported as `None` rather than NaN.

// float math in no_std builds; unused when std is linked for tests
use alloc::vec::Vec;
use core::ops::Add;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::stationary::StationaryModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub tn: u64,
}

impl Add for ConfusionMatrix {
    type Output = ConfusionMatrix;

    fn add(self, o: Self) -> Self {
        ConfusionMatrix {
            tp: self.tp + o.tp,
            fp: self.fp + o.fp,
            fn_: self.fn_ + o.fn_,
            tn: self.tn + o.tn,
        }
    }
}

impl ConfusionMatrix {
    pub fn new(tp: u64, fp: u64, fn_: u64, tn: u64) -> Self {
        ConfusionMatrix { tp, fp, fn_, tn }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    /// `None` when empty.
    pub fn accuracy(&self) -> Option<f64> {
        ratio(self.tp + self.tn, self.total())
    }

    /// The same counts with the roles of the two classes exchanged.
    pub fn swapped(&self) -> Self {
        ConfusionMatrix {
            tp: self.tn,
            fp: self.fn_,
            fn_: self.fp,
            tn: self.tp,
        }
    }
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Tallies predictions against ground truth.
pub fn confusion(y_true: &[bool], y_pred: &[bool]) -> Result<ConfusionMatrix> {
    if y_true.len() != y_pred.len() {
        return Err(Error::input(
            "label and prediction vectors differ in length",
        ));
    }
    let mut cm = ConfusionMatrix::default();
    for (&t, &p) in y_true.iter().zip(y_pred) {
        match (t, p) {
            (true, true) => cm.tp += 1,
            (false, true) => cm.fp += 1,
            (true, false) => cm.fn_ += 1,
            (false, false) => cm.tn += 1,
        }
    }
    Ok(cm)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ClassMetrics {
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
}

impl ClassMetrics {
    /// Metrics of the positive class of `cm`.
    pub fn positive(cm: &ConfusionMatrix) -> Self {
        let precision = ratio(cm.tp, cm.tp + cm.fp);
        let recall = ratio(cm.tp, cm.tp + cm.fn_);
        let f1 = match (precision, recall) {
            (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
            (Some(_), Some(_)) => Some(0.0),
            _ => None,
        };
        ClassMetrics {
            precision,
            recall,
            f1,
        }
    }
}

/// Per-class metrics and overall accuracy.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BinaryReport {
    pub jammed: ClassMetrics,
    pub non_jammed: ClassMetrics,
    pub accuracy: Option<f64>,
    pub support: [u64; 2],
}

impl BinaryReport {
    pub fn class(&self, jammed: bool) -> &ClassMetrics {
        if jammed {
            &self.jammed
        } else {
            &self.non_jammed
        }
    }
}

pub fn class_metrics(cm: &ConfusionMatrix) -> BinaryReport {
    BinaryReport {
        jammed: ClassMetrics::positive(cm),
        non_jammed: ClassMetrics::positive(&cm.swapped()),
        accuracy: cm.accuracy(),
        support: [cm.tn + cm.fp, cm.tp + cm.fn_],
    }
}

/// Receiver operating characteristic of a score (higher = more jammed).
#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    /// `(fpr, tpr, threshold)`, from `(0, 0, +∞)` to `(1, 1, min score)`.
    pub points: Vec<(f64, f64, f64)>,
    pub auc: f64,
}

/// Sweeps a threshold over every distinct score; a row is predicted jammed
/// when its score is at least the threshold. Tied scores move together, so
/// the curve is independent of input order.
pub fn roc(y_true: &[bool], scores: &[f64]) -> Result<RocCurve> {
    if y_true.len() != scores.len() {
        return Err(Error::input("label and score vectors differ in length"));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::input("scores must be finite"));
    }
    let p = y_true.iter().filter(|t| **t).count();
    let n = y_true.len() - p;
    if p == 0 || n == 0 {
        return Err(Error::input("ROC needs both classes"));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut points = Vec::new();
    points.push((0.0, 0.0, f64::INFINITY));
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut auc = 0.0;
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        while i < order.len() && scores[order[i]] == s {
            if y_true[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        let (fpr, tpr) = (fp as f64 / n as f64, tp as f64 / p as f64);
        let (px, py, _) = *points.last().unwrap();
        auc += (fpr - px) * (tpr + py) * 0.5;
        points.push((fpr, tpr, s));
    }
    Ok(RocCurve { points, auc })
}

/// Mean and population standard deviation over the defined values.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub n_used: usize,
    pub n_excluded: usize,
}

/// Unweighted mean and population std of `values`, skipping `None`.
pub fn summarize(values: &[Option<f64>]) -> Result<Summary> {
    let used: Vec<f64> = values.iter().flatten().copied().collect();
    if used.is_empty() {
        return Err(Error::input("no defined values to aggregate"));
    }
    let (mean, std) = crate::adaptive::mean_std(&used);
    Ok(Summary {
        mean,
        std,
        n_used: used.len(),
        n_excluded: values.len() - used.len(),
    })
}

/// Metrics of one trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryMetrics {
    pub id: usize,
    pub confusion: ConfusionMatrix,
    pub report: BinaryReport,
}

/// Across-trajectory statistics of per-trajectory metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySummary {
    pub per_trajectory: Vec<TrajectoryMetrics>,
    pub accuracy: Summary,
    /// Jammed-class F1.
    pub f1_jammed: Summary,
    pub f1_non_jammed: Summary,
    /// Counts pooled over all trajectories.
    pub pooled: ConfusionMatrix,
}

/// Aggregates per-trajectory confusion matrices `(id, cm)`. Empty
/// trajectories are excluded from every statistic.
pub fn aggregate_trajectories(items: &[(usize, ConfusionMatrix)]) -> Result<TrajectorySummary> {
    let per_trajectory: Vec<TrajectoryMetrics> = items
        .iter()
        .map(|&(id, confusion)| TrajectoryMetrics {
            id,
            confusion,
            report: class_metrics(&confusion),
        })
        .collect();
    let acc: Vec<Option<f64>> = per_trajectory.iter().map(|t| t.report.accuracy).collect();
    let f1_j: Vec<Option<f64>> = per_trajectory.iter().map(|t| t.report.jammed.f1).collect();
    let f1_n: Vec<Option<f64>> = per_trajectory
        .iter()
        .map(|t| t.report.non_jammed.f1)
        .collect();
    let pooled = items
        .iter()
        .fold(ConfusionMatrix::default(), |a, (_, cm)| a + *cm);
    let fallback = |v: &[Option<f64>]| {
        summarize(v).unwrap_or(Summary {
            mean: 0.0,
            std: 0.0,
            n_used: 0,
            n_excluded: v.len(),
        })
    };
    Ok(TrajectorySummary {
        accuracy: summarize(&acc)?,
        f1_jammed: fallback(&f1_j),
        f1_non_jammed: fallback(&f1_n),
        per_trajectory,
        pooled,
    })
}

/// Model inputs and labels of one trajectory.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrajectoryFeatures {
    pub id: usize,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<bool>,
}

/// Applies a model trained on stationary data to each trajectory.
pub fn cross_domain_eval(
    model: &StationaryModel,
    trajectories: &[TrajectoryFeatures],
) -> Result<TrajectorySummary> {
    if trajectories.is_empty() {
        return Err(Error::input("no trajectories to evaluate"));
    }
    let mut items = Vec::with_capacity(trajectories.len());
    for t in trajectories {
        if t.rows.len() != t.labels.len() {
            return Err(Error::input("trajectory rows and labels differ in length"));
        }
        if let Some(r) = t.rows.first() {
            model.check_inputs(r.len())?;
        }
        let pred = t
            .rows
            .iter()
            .map(|r| model.predict(r))
            .collect::<Result<Vec<_>>>()?;
        items.push((t.id, confusion(&t.labels, &pred)?));
    }
    aggregate_trajectories(&items)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn stationary_reference_counts() {
        let cm = ConfusionMatrix::new(24_961, 717, 1_433, 25_173);
        let r = class_metrics(&cm);
        assert!(close(r.accuracy.unwrap(), 0.9589, 0.0002));
        assert!(close(r.jammed.precision.unwrap(), 0.9720, 0.0002));
    }

    #[test]
    fn adaptive_reference_counts() {
        let cm = ConfusionMatrix::new(411, 28, 42, 519);
        assert_eq!(cm.accuracy(), Some(0.93));
    }

    #[test]
    fn undefined_metrics() {
        let r = class_metrics(&ConfusionMatrix::new(0, 0, 5, 5));
        assert_eq!(r.jammed.precision, None);
        assert_eq!(r.jammed.recall, Some(0.0));
        assert_eq!(r.jammed.f1, None);
        let r = class_metrics(&ConfusionMatrix::new(0, 3, 5, 5));
        assert_eq!(r.jammed.f1, Some(0.0));
        assert_eq!(ConfusionMatrix::default().accuracy(), None);
    }

    #[test]
    fn confusion_tally() {
        let cm = confusion(
            &[true, true, false, false, true],
            &[true, false, true, false, true],
        )
        .unwrap();
        assert_eq!(cm, ConfusionMatrix::new(2, 1, 1, 1));
        assert!(confusion(&[true], &[]).is_err());
    }

    #[test]
    fn roc_perfect_and_inverted() {
        let y = [false, false, true, true];
        let r = roc(&y, &[0.1, 0.2, 0.8, 0.9]).unwrap();
        assert_eq!(r.auc, 1.0);
        assert_eq!(r.points.first().map(|p| (p.0, p.1)), Some((0.0, 0.0)));
        assert_eq!(r.points.last().map(|p| (p.0, p.1)), Some((1.0, 1.0)));
        let r = roc(&y, &[0.9, 0.8, 0.2, 0.1]).unwrap();
        assert_eq!(r.auc, 0.0);
        let r = roc(&y, &[0.5; 4]).unwrap();
        assert_eq!(r.auc, 0.5);
        assert!(roc(&[true, true], &[0.1, 0.2]).is_err());
    }

    #[test]
    fn roc_matches_pair_count() {
        // AUC equals P(score_pos > score_neg) + ½ P(tie)
        let y = [true, false, true, false, true, false, false];
        let s = [0.9, 0.9, 0.4, 0.3, 0.3, 0.1, 0.6];
        let mut wins = 0.0;
        let mut pairs = 0.0;
        for i in 0..y.len() {
            for j in 0..y.len() {
                if y[i] && !y[j] {
                    pairs += 1.0;
                    wins += if s[i] > s[j] {
                        1.0
                    } else if s[i] == s[j] {
                        0.5
                    } else {
                        0.0
                    };
                }
            }
        }
        assert!(close(roc(&y, &s).unwrap().auc, wins / pairs, 1e-12));
    }

    #[test]
    fn summary_excludes_undefined() {
        let s = summarize(&[Some(1.0), None, Some(0.5)]).unwrap();
        assert_eq!((s.mean, s.std, s.n_used, s.n_excluded), (0.75, 0.25, 2, 1));
        assert!(summarize(&[None]).is_err());
    }

    #[test]
    fn aggregation_of_two_trajectories() {
        let a = ConfusionMatrix::new(5, 0, 0, 5);
        let b = ConfusionMatrix::new(0, 0, 0, 10);
        let s = aggregate_trajectories(&[(0, a), (1, b)]).unwrap();
        assert_eq!(s.accuracy.mean, 1.0);
        assert_eq!(s.f1_jammed.n_used, 1);
        assert_eq!(s.f1_jammed.n_excluded, 1);
        assert_eq!(s.pooled, a + b);
    }

    #[test]
    fn empty_cross_domain_rejected() {
        let x = vec![
            vec![0.0, 1.0],
            vec![1.0, 0.0],
            vec![0.1, 0.9],
            vec![0.9, 0.1],
        ];
        let y = vec![false, true, false, true];
        let m = StationaryModel::fit(&x, &y, None, &Default::default()).unwrap();
        assert!(cross_domain_eval(&m, &[]).is_err());
        let t = TrajectoryFeatures {
            id: 3,
            rows: x,
            labels: y,
        };
        let s = cross_domain_eval(&m, &[t]).unwrap();
        assert_eq!(s.per_trajectory[0].id, 3);
        assert_eq!(s.accuracy.mean, 1.0);
        let bad = TrajectoryFeatures {
            id: 0,
            rows: vec![vec![1.0]],
            labels: vec![true],
        };
        assert!(cross_domain_eval(&m, &[bad]).is_err());
    }
}
