//! Time-variant jamming detection with adaptive thresholds.
//!
//! For every epoch `k` the detector looks at the trailing window of up to
//! `W` samples strictly before `k` and flags jamming when
//!
//! ```text
//! SJNR(k) < μ_SJNR − α·σ_SJNR      or   RSS(k) > μ_RSS + α·σ_RSS
//! |SJNR(k) − SJNR(k−1)| > β        or   |RSS(k) − RSS(k−1)| > β_RSS
//! ```
//!
//! Both series are in dB. σ is the population standard deviation of the
//! window. Epochs with fewer than `min_warmup` (and at least one) prior
//! samples are never flagged.

// float math in no_std builds; unused when std is linked for tests
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::eval::{self, ConfusionMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveConfig {
    /// Trailing window length W, epochs.
    pub window: usize,
    /// Threshold multiplier α.
    pub alpha: f64,
    /// Rate-of-change threshold β for SJNR, dB.
    pub beta: f64,
    /// Rate-of-change threshold for RSS, dB; `None` reuses `beta`.
    pub beta_rss: Option<f64>,
    pub min_warmup: usize,
}

/// Defaults are the result of `calibrate` on the default time-variant
/// dataset with the default grid.
impl Default for AdaptiveConfig {
    fn default() -> Self {
        AdaptiveConfig {
            window: 40,
            alpha: 0.5,
            beta: 50.0,
            beta_rss: None,
            min_warmup: 5,
        }
    }
}

impl AdaptiveConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window < 2 {
            return Err(Error::config("window must be at least 2 epochs"));
        }
        if !(self.alpha >= 0.0) {
            return Err(Error::config("alpha must be non-negative"));
        }
        if !(self.beta >= 0.0) || self.beta_rss.is_some_and(|b| !(b >= 0.0)) {
            return Err(Error::config("beta must be non-negative"));
        }
        Ok(())
    }

    pub fn beta_rss(&self) -> f64 {
        self.beta_rss.unwrap_or(self.beta)
    }
}

/// Mean and population standard deviation of `series[max(0, k−W) .. k]`.
pub fn moving_stats(series: &[f64], k: usize, window: usize) -> Result<(f64, f64)> {
    if k == 0 || k > series.len() || window == 0 {
        return Err(Error::input("moving window needs 1 <= k <= len and W >= 1"));
    }
    Ok(mean_std(&series[k.saturating_sub(window)..k]))
}

/// Two-pass mean and population standard deviation of a non-empty slice.
/// A constant slice gives exactly `(x, 0)`.
pub(crate) fn mean_std(w: &[f64]) -> (f64, f64) {
    if w.iter().all(|x| *x == w[0]) {
        return (w[0], 0.0);
    }
    let n = w.len() as f64;
    let mean = w.iter().sum::<f64>() / n;
    let var = w.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Adaptive thresholds `(μ_s − α·σ_s, μ_r + α·σ_r)`.
pub fn thresholds(mean_s: f64, std_s: f64, mean_r: f64, std_r: f64, alpha: f64) -> (f64, f64) {
    (mean_s - alpha * std_s, mean_r + alpha * std_r)
}

/// `|x(k) − x(k−1)|`.
pub fn delta(series: &[f64], k: usize) -> Result<f64> {
    if k == 0 || k >= series.len() {
        return Err(Error::input("delta needs 1 <= k < len"));
    }
    Ok((series[k] - series[k - 1]).abs())
}

/// Window statistics `(μ, σ)` for every epoch `k ≥ 1`, at index `k − 1`.
///
/// Each window is summed afresh. Running sums drift away from the exact
/// values once the level jumps and the window variance gets small, which
/// shows up as a flag flip right at the threshold.
pub fn window_stats(series: &[f64], window: usize) -> Result<Vec<(f64, f64)>> {
    (1..=series.len().saturating_sub(1))
        .map(|k| moving_stats(series, k, window))
        .collect()
}

/// Per-epoch detector state.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DetectionTrace {
    /// `None` at epoch 0 (no window).
    pub threshold_sjnr: Vec<Option<f64>>,
    pub threshold_rss: Vec<Option<f64>>,
    pub delta_sjnr: Vec<Option<f64>>,
    pub delta_rss: Vec<Option<f64>>,
    pub flag_threshold: Vec<bool>,
    pub flag_rate: Vec<bool>,
    /// `flag_threshold || flag_rate`
    pub predicted: Vec<bool>,
}

impl DetectionTrace {
    pub fn len(&self) -> usize {
        self.predicted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predicted.is_empty()
    }
}

/// Runs the detector over one trajectory.
pub fn detect(sjnr: &[f64], rss_db: &[f64], config: &AdaptiveConfig) -> Result<DetectionTrace> {
    config.validate()?;
    if sjnr.len() != rss_db.len() {
        return Err(Error::input("SJNR and RSS series differ in length"));
    }
    let stats_s = window_stats(sjnr, config.window)?;
    let stats_r = window_stats(rss_db, config.window)?;
    Ok(detect_with_stats(sjnr, rss_db, &stats_s, &stats_r, config))
}

/// Detector pass over precomputed [`window_stats`] of both series.
fn detect_with_stats(
    sjnr: &[f64],
    rss_db: &[f64],
    stats_s: &[(f64, f64)],
    stats_r: &[(f64, f64)],
    config: &AdaptiveConfig,
) -> DetectionTrace {
    let n = sjnr.len();
    let mut trace = DetectionTrace {
        threshold_sjnr: Vec::with_capacity(n),
        threshold_rss: Vec::with_capacity(n),
        delta_sjnr: Vec::with_capacity(n),
        delta_rss: Vec::with_capacity(n),
        flag_threshold: Vec::with_capacity(n),
        flag_rate: Vec::with_capacity(n),
        predicted: Vec::with_capacity(n),
    };
    if n == 0 {
        return trace;
    }
    let beta_rss = config.beta_rss();

    trace.threshold_sjnr.push(None);
    trace.threshold_rss.push(None);
    trace.delta_sjnr.push(None);
    trace.delta_rss.push(None);
    trace.flag_threshold.push(false);
    trace.flag_rate.push(false);
    trace.predicted.push(false);

    for k in 1..n {
        let (ms, ss) = stats_s[k - 1];
        let (mr, sr) = stats_r[k - 1];
        let (thr_s, thr_r) = thresholds(ms, ss, mr, sr, config.alpha);
        let ds = (sjnr[k] - sjnr[k - 1]).abs();
        let dr = (rss_db[k] - rss_db[k - 1]).abs();
        let armed = k >= config.min_warmup;
        let flag_t = armed && (sjnr[k] < thr_s || rss_db[k] > thr_r);
        let flag_r = armed && (ds > config.beta || dr > beta_rss);
        trace.threshold_sjnr.push(Some(thr_s));
        trace.threshold_rss.push(Some(thr_r));
        trace.delta_sjnr.push(Some(ds));
        trace.delta_rss.push(Some(dr));
        trace.flag_threshold.push(flag_t);
        trace.flag_rate.push(flag_r);
        trace.predicted.push(flag_t || flag_r);
    }
    trace
}

/// Detector inputs and ground truth of one trajectory.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LabeledSeries {
    pub sjnr: Vec<f64>,
    pub rss_db: Vec<f64>,
    pub labels: Vec<bool>,
}

/// Axes of a calibration grid; each is searched in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationGrid {
    pub windows: Vec<usize>,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub min_warmup: usize,
}

impl Default for CalibrationGrid {
    fn default() -> Self {
        CalibrationGrid {
            windows: alloc::vec![10, 20, 30, 40, 60],
            alphas: alloc::vec![0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0],
            betas: alloc::vec![1.0, 3.0, 5.0, 10.0, 20.0, 50.0],
            min_warmup: 5,
        }
    }
}

impl CalibrationGrid {
    /// Every grid point in lexicographic `(W, α, β)` order.
    pub fn points(&self) -> Vec<AdaptiveConfig> {
        let mut w = self.windows.clone();
        let mut a = self.alphas.clone();
        let mut b = self.betas.clone();
        w.sort_unstable();
        w.dedup();
        a.sort_by(f64::total_cmp);
        a.dedup();
        b.sort_by(f64::total_cmp);
        b.dedup();
        let mut out = Vec::with_capacity(w.len() * a.len() * b.len());
        for &window in &w {
            for &alpha in &a {
                for &beta in &b {
                    out.push(AdaptiveConfig {
                        window,
                        alpha,
                        beta,
                        beta_rss: None,
                        min_warmup: self.min_warmup,
                    });
                }
            }
        }
        out
    }
}

/// Score of one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridScore {
    pub config: AdaptiveConfig,
    /// Mean jammed-class F1 over trajectories where it is defined.
    pub mean_f1: f64,
    /// Trajectories contributing to `mean_f1`.
    pub n_scored: usize,
    /// Confusion matrix pooled over all trajectories.
    pub pooled: ConfusionMatrix,
}

/// Evaluates `config` on every trajectory.
pub fn score_config(data: &[LabeledSeries], config: &AdaptiveConfig) -> Result<GridScore> {
    Ok(score_window(data, core::slice::from_ref(config))?.remove(0))
}

/// Evaluates grid points sharing one window length, reusing the window
/// statistics across them. Rows come back in input order.
pub fn score_window(data: &[LabeledSeries], configs: &[AdaptiveConfig]) -> Result<Vec<GridScore>> {
    let Some(first) = configs.first() else {
        return Ok(Vec::new());
    };
    if configs.iter().any(|c| c.window != first.window) {
        return Err(Error::input("score_window needs a single window length"));
    }
    for c in configs {
        c.validate()?;
    }
    let mut acc: Vec<(f64, usize, ConfusionMatrix)> =
        alloc::vec![(0.0, 0, ConfusionMatrix::default()); configs.len()];
    for s in data {
        if s.labels.is_empty() {
            continue;
        }
        if s.sjnr.len() != s.rss_db.len() {
            return Err(Error::input("SJNR and RSS series differ in length"));
        }
        let stats_s = window_stats(&s.sjnr, first.window)?;
        let stats_r = window_stats(&s.rss_db, first.window)?;
        for (c, (f1_sum, n_scored, pooled)) in configs.iter().zip(acc.iter_mut()) {
            let trace = detect_with_stats(&s.sjnr, &s.rss_db, &stats_s, &stats_r, c);
            let cm = eval::confusion(&s.labels, &trace.predicted)?;
            *pooled = *pooled + cm;
            if let Some(f1) = eval::class_metrics(&cm).jammed.f1 {
                *f1_sum += f1;
                *n_scored += 1;
            }
        }
    }
    Ok(configs
        .iter()
        .zip(acc)
        .map(|(c, (f1_sum, n_scored, pooled))| GridScore {
            config: *c,
            mean_f1: if n_scored > 0 {
                f1_sum / n_scored as f64
            } else {
                0.0
            },
            n_scored,
            pooled,
        })
        .collect())
}

/// Grid points split into runs of equal window length, in grid order.
pub fn window_groups(points: &[AdaptiveConfig]) -> Vec<&[AdaptiveConfig]> {
    points.chunk_by(|a, b| a.window == b.window).collect()
}

/// Index of the best row: highest mean F1, earliest row on ties.
pub fn select_best(table: &[GridScore]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, row) in table.iter().enumerate() {
        if best.is_none_or(|b| row.mean_f1 > table[b].mean_f1) {
            best = Some(i);
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub best: AdaptiveConfig,
    pub best_score: GridScore,
    /// One row per grid point, in grid order.
    pub table: Vec<GridScore>,
}

/// Exhaustive grid search maximizing mean per-trajectory F1.
pub fn calibrate(data: &[LabeledSeries], grid: &CalibrationGrid) -> Result<Calibration> {
    if data.iter().all(|s| s.labels.is_empty()) {
        return Err(Error::input("calibration needs labeled data"));
    }
    let points = grid.points();
    let mut table = Vec::with_capacity(points.len());
    for group in window_groups(&points) {
        table.extend(score_window(data, group)?);
    }
    finish_calibration(table)
}

/// Picks the winner of an already scored grid.
pub fn finish_calibration(table: Vec<GridScore>) -> Result<Calibration> {
    let i = select_best(&table).ok_or_else(|| Error::input("calibration grid is empty"))?;
    Ok(Calibration {
        best: table[i].config,
        best_score: table[i],
        table,
    })
}
