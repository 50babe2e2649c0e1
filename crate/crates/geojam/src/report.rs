//! Text reports laid out like the classic result tables, plus
//! machine-readable metric and ROC CSVs.
//!
//! Percentages carry two decimals; undefined metrics print as `undefined`.

use std::fmt::Write as _;
use std::path::Path;

use geojam_core::adaptive::Calibration;
use geojam_core::eval::{self, BinaryReport, RocCurve, Summary, TrajectorySummary};

use crate::csv_io::{num, CsvOut};
use crate::error::Result;
use crate::pipeline::{AdaptiveRun, CrossRun, ModelEval, StationaryExperiment};

pub const UNDEFINED: &str = "undefined";

/// Fraction as a percentage with two decimals.
pub fn pct(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{:.2}", 100.0 * x),
        None => UNDEFINED.to_string(),
    }
}

fn pm(s: &Summary) -> String {
    if s.n_used == 0 {
        return UNDEFINED.to_string();
    }
    format!("{:.2} ± {:.2}", 100.0 * s.mean, 100.0 * s.std)
}

struct Table {
    out: String,
}

const LABEL_W: usize = 26;
const COL_W: usize = 14;

impl Table {
    fn new(title: &str) -> Self {
        let mut out = String::new();
        let _ = writeln!(out, "{title}");
        let _ = writeln!(out, "{}", "-".repeat(LABEL_W + 2 * COL_W));
        let _ = writeln!(
            out,
            "{:<LABEL_W$}{:>COL_W$}{:>COL_W$}",
            "Class", "Non-jammed", "Jammed"
        );
        Table { out }
    }

    fn row(&mut self, label: &str, a: impl std::fmt::Display, b: impl std::fmt::Display) {
        let _ = writeln!(self.out, "{label:<LABEL_W$}{a:>COL_W$}{b:>COL_W$}");
    }

    fn span(&mut self, label: &str, v: impl std::fmt::Display) {
        let w = 2 * COL_W;
        let line = format!("{label:<LABEL_W$}{v:^w$}");
        let _ = writeln!(self.out, "{}", line.trim_end());
    }

    fn metrics(&mut self, r: &BinaryReport) {
        self.row(
            "Precision (%)",
            pct(r.non_jammed.precision),
            pct(r.jammed.precision),
        );
        self.row("Recall (%)", pct(r.non_jammed.recall), pct(r.jammed.recall));
        self.row("F1 score (%)", pct(r.non_jammed.f1), pct(r.jammed.f1));
        self.span("Accuracy (%)", pct(r.accuracy));
    }

    fn finish(self) -> String {
        self.out
    }
}

fn classifier_table(title: &str, e: &ModelEval, exp: &StationaryExperiment) -> String {
    let mut t = Table::new(title);
    t.row(
        "Training set size",
        exp.split.train_counts[0],
        exp.split.train_counts[1],
    );
    t.row(
        "Testing set size",
        exp.split.test_counts[0],
        exp.split.test_counts[1],
    );
    t.metrics(&e.report);
    let mut s = t.finish();
    let c = &e.confusion;
    let _ = writeln!(s, "AUC: {:.4}", e.roc.auc);
    let _ = writeln!(
        s,
        "Confusion (TP, FP, FN, TN): {}, {}, {}, {}",
        c.tp, c.fp, c.fn_, c.tn
    );
    s
}

pub fn stationary_report(exp: &StationaryExperiment, seed: u64, n_components: usize) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "Stationary jamming detection (seed {seed})");
    let _ = writeln!(s);
    s += &classifier_table("Random forest without PCA", &exp.without_pca, exp);
    let _ = writeln!(s);
    s += &classifier_table(
        &format!(
            "Random forest with PCA ({n_components} component{})",
            if n_components == 1 { "" } else { "s" }
        ),
        &exp.with_pca,
        exp,
    );
    let _ = writeln!(s);
    let _ = writeln!(
        s,
        "PCA accuracy gap (with minus without): {:+.2} pp",
        exp.pca_gap_pp()
    );
    let _ = writeln!(
        s,
        "Saved model: {}",
        if exp.pca_selected {
            "with PCA"
        } else {
            "without PCA"
        }
    );
    s
}

/// `(metric, fraction)` pairs of a stationary run.
pub fn stationary_metrics(exp: &StationaryExperiment) -> Vec<(String, Option<f64>)> {
    let mut v = Vec::new();
    for (tag, e) in [("pca", &exp.with_pca), ("no_pca", &exp.without_pca)] {
        push_report(&mut v, tag, &e.report);
        v.push((format!("{tag}.auc"), Some(e.roc.auc)));
    }
    v.push(("pca_gap".into(), Some(exp.pca_gap_pp() / 100.0)));
    v
}

fn push_report(v: &mut Vec<(String, Option<f64>)>, tag: &str, r: &BinaryReport) {
    v.push((format!("{tag}.accuracy"), r.accuracy));
    for (class, m) in [("non_jammed", &r.non_jammed), ("jammed", &r.jammed)] {
        v.push((format!("{tag}.{class}.precision"), m.precision));
        v.push((format!("{tag}.{class}.recall"), m.recall));
        v.push((format!("{tag}.{class}.f1"), m.f1));
    }
}

pub fn adaptive_report(run: &AdaptiveRun) -> String {
    let c = &run.config;
    let mut t = Table::new("Adaptive threshold detection, time-variant scenario");
    let r = &run.report;
    t.row("Total prediction points", r.support[0], r.support[1]);
    t.metrics(r);
    let mut s = t.finish();
    let _ = writeln!(
        s,
        "Detector: W = {}, alpha = {}, beta = {} dB{}, warm-up = {}",
        c.window,
        c.alpha,
        c.beta,
        c.beta_rss
            .map(|b| format!(" (RSS {b} dB)"))
            .unwrap_or_default(),
        c.min_warmup
    );
    let _ = writeln!(
        s,
        "Trajectories: {} with data, {} empty; {} prediction points",
        run.summary.per_trajectory.len(),
        run.n_empty,
        run.n_points
    );
    let _ = writeln!(
        s,
        "Per-trajectory accuracy (%): {}",
        pm(&run.summary.accuracy)
    );
    let _ = writeln!(
        s,
        "Per-trajectory F1, jammed (%): {}",
        pm(&run.summary.f1_jammed)
    );
    s
}

pub fn adaptive_metrics(run: &AdaptiveRun) -> Vec<(String, Option<f64>)> {
    let mut v = Vec::new();
    push_report(&mut v, "adaptive", &run.report);
    push_summary(&mut v, "adaptive.trajectory", &run.summary);
    v.push(("adaptive.points".into(), Some(run.n_points as f64)));
    v
}

fn push_summary(v: &mut Vec<(String, Option<f64>)>, tag: &str, s: &TrajectorySummary) {
    for (name, m) in [
        ("accuracy", &s.accuracy),
        ("f1_jammed", &s.f1_jammed),
        ("f1_non_jammed", &s.f1_non_jammed),
    ] {
        let defined = m.n_used > 0;
        v.push((format!("{tag}.{name}.mean"), defined.then_some(m.mean)));
        v.push((format!("{tag}.{name}.std"), defined.then_some(m.std)));
        v.push((format!("{tag}.{name}.n_used"), Some(m.n_used as f64)));
    }
}

/// Mean ± std of a per-trajectory metric, skipping undefined values.
fn per_trajectory(s: &TrajectorySummary, f: impl Fn(&BinaryReport) -> Option<f64>) -> Summary {
    let v: Vec<Option<f64>> = s.per_trajectory.iter().map(|t| f(&t.report)).collect();
    eval::summarize(&v).unwrap_or(Summary {
        n_excluded: v.len(),
        ..Summary::default()
    })
}

pub fn cross_report(run: &CrossRun) -> String {
    let s = &run.summary;
    let mut out = String::new();
    let _ = writeln!(out, "Stationary-trained model on time-variant trajectories");
    let _ = writeln!(out, "{}", "-".repeat(LABEL_W + 2 * COL_W));
    let w = 2 * COL_W;
    let _ = writeln!(
        out,
        "{:<LABEL_W$}{:>w$}",
        "Metric", "Value (± Standard Deviation)"
    );
    let mut line = |label: &str, m: &Summary| {
        let _ = writeln!(
            out,
            "{label:<LABEL_W$}{:>w$}",
            format!("{} [{}/{}]", pm(m), m.n_used, m.n_used + m.n_excluded)
        );
    };
    line("Accuracy (%)", &s.accuracy);
    line("F1 score (%)", &s.f1_jammed);
    line("Precision (%)", &per_trajectory(s, |r| r.jammed.precision));
    line("Recall (%)", &per_trajectory(s, |r| r.jammed.recall));
    line("F1 non-jammed (%)", &s.f1_non_jammed);
    let _ = writeln!(
        out,
        "[defined/total] counts trajectories where the metric is defined; F1, precision and recall refer to the jammed class unless noted."
    );
    let _ = writeln!(
        out,
        "Trajectories: {} with data, {} empty; {} prediction points",
        s.per_trajectory.len(),
        run.n_empty,
        run.n_points
    );
    let _ = writeln!(out, "Pooled accuracy (%): {}", pct(s.pooled.accuracy()));
    out
}

pub fn cross_metrics(run: &CrossRun) -> Vec<(String, Option<f64>)> {
    let mut v = Vec::new();
    push_summary(&mut v, "cross.trajectory", &run.summary);
    push_report(
        &mut v,
        "cross.pooled",
        &eval::class_metrics(&run.summary.pooled),
    );
    v.push(("cross.points".into(), Some(run.n_points as f64)));
    v
}

pub fn calibration_report(c: &Calibration) -> String {
    let mut s = String::new();
    let b = &c.best;
    let _ = writeln!(s, "Adaptive detector calibration");
    let _ = writeln!(s, "Grid points: {}", c.table.len());
    let _ = writeln!(
        s,
        "Best: W = {}, alpha = {}, beta = {} dB, warm-up = {}",
        b.window, b.alpha, b.beta, b.min_warmup
    );
    let _ = writeln!(
        s,
        "Mean per-trajectory F1, jammed (%): {} over {} trajectories",
        pct(Some(c.best_score.mean_f1)),
        c.best_score.n_scored
    );
    let _ = writeln!(
        s,
        "Pooled accuracy (%): {}",
        pct(c.best_score.pooled.accuracy())
    );
    s
}

pub fn calibration_metrics(c: &Calibration) -> Vec<(String, Option<f64>)> {
    let b = &c.best;
    vec![
        ("calibration.window".into(), Some(b.window as f64)),
        ("calibration.alpha".into(), Some(b.alpha)),
        ("calibration.beta".into(), Some(b.beta)),
        ("calibration.mean_f1".into(), Some(c.best_score.mean_f1)),
        (
            "calibration.accuracy".into(),
            c.best_score.pooled.accuracy(),
        ),
        ("calibration.grid_points".into(), Some(c.table.len() as f64)),
    ]
}

pub fn write_calibration_table(path: &Path, c: &Calibration) -> Result<()> {
    let mut out = CsvOut::create(
        path,
        &[
            "window",
            "alpha",
            "beta",
            "min_warmup",
            "mean_f1",
            "n_scored",
            "accuracy",
        ],
    )?;
    for r in &c.table {
        out.row([
            r.config.window.to_string(),
            num(r.config.alpha),
            num(r.config.beta),
            r.config.min_warmup.to_string(),
            num(r.mean_f1),
            r.n_scored.to_string(),
            r.pooled.accuracy().map(num).unwrap_or_default(),
        ])?;
    }
    out.finish()
}

pub fn write_metrics(path: &Path, rows: &[(String, Option<f64>)]) -> Result<()> {
    let mut out = CsvOut::create(path, &["metric", "value"])?;
    for (k, v) in rows {
        out.row([
            k.clone(),
            v.map(num).unwrap_or_else(|| UNDEFINED.to_string()),
        ])?;
    }
    out.finish()
}

pub fn write_roc(path: &Path, roc: &RocCurve) -> Result<()> {
    let mut out = CsvOut::create(path, &["fpr", "tpr", "threshold"])?;
    for (fpr, tpr, thr) in &roc.points {
        out.row([num(*fpr), num(*tpr), num(*thr)])?;
    }
    out.finish()
}
