//! Experiment drivers shared by the CLI and the acceptance suite.
//!
//! Parallel stages use rayon with per-item seeds and index-ordered
//! collection, so results do not depend on the thread count.

use rayon::prelude::*;

use geojam_core::adaptive::{
    self, AdaptiveConfig, Calibration, CalibrationGrid, DetectionTrace, LabeledSeries,
};
use geojam_core::eval::{
    self, BinaryReport, ConfusionMatrix, RocCurve, TrajectoryFeatures, TrajectorySummary,
};
use geojam_core::scenario::{
    self, EpochRecord, StationaryConfig, StationaryGenerator, StationaryRecord, TimeVariantConfig,
    Trajectory,
};
use geojam_core::signal;
use geojam_core::stationary::{train_test_split, ForestParams, SplitSpec, StationaryModel};

use crate::config::RunConfig;
use crate::csv_io::LoadedTrajectory;
use crate::error::{Error, Result};

pub fn generate_stationary(config: &StationaryConfig) -> Result<Vec<StationaryRecord>> {
    let g = StationaryGenerator::new(*config)?;
    let records = (0..g.len())
        .into_par_iter()
        .map(|i| g.record(i))
        .collect::<geojam_core::Result<Vec<_>>>()?;
    Ok(records)
}

pub fn generate_timevariant(config: &TimeVariantConfig) -> Result<Vec<Trajectory>> {
    config.validate()?;
    let trajectories = (0..config.n_trajectories)
        .into_par_iter()
        .map(|i| scenario::gen_trajectory(config, i))
        .collect::<geojam_core::Result<Vec<_>>>()?;
    Ok(trajectories)
}

/// Model input rows of a set of records.
pub fn feature_rows(records: &[StationaryRecord]) -> Vec<Vec<f64>> {
    records
        .iter()
        .map(|r| r.features.model_vector().to_vec())
        .collect()
}

/// A trained model and its held-out evaluation.
#[derive(Debug, Clone)]
pub struct ModelEval {
    pub model: StationaryModel,
    pub scores: Vec<f64>,
    pub confusion: ConfusionMatrix,
    pub report: BinaryReport,
    pub roc: RocCurve,
}

/// Both stationary pipelines on one split.
#[derive(Debug, Clone)]
pub struct StationaryExperiment {
    pub split: SplitSpec,
    pub with_pca: ModelEval,
    pub without_pca: ModelEval,
    /// Which of the two is the configured pipeline.
    pub pca_selected: bool,
}

impl StationaryExperiment {
    pub fn selected(&self) -> &ModelEval {
        if self.pca_selected {
            &self.with_pca
        } else {
            &self.without_pca
        }
    }

    /// With-PCA minus without-PCA accuracy, percentage points.
    pub fn pca_gap_pp(&self) -> f64 {
        let a = self.with_pca.report.accuracy.unwrap_or(0.0);
        let b = self.without_pca.report.accuracy.unwrap_or(0.0);
        100.0 * (a - b)
    }
}

fn fit_and_eval(
    x_train: &[Vec<f64>],
    y_train: &[bool],
    x_test: &[Vec<f64>],
    y_test: &[bool],
    n_components: Option<usize>,
    params: &ForestParams,
) -> Result<ModelEval> {
    let model = StationaryModel::fit(x_train, y_train, n_components, params)?;
    let scores = model.scores(x_test)?;
    let pred: Vec<bool> = scores.iter().map(|s| *s > 0.5).collect();
    let confusion = eval::confusion(y_test, &pred)?;
    Ok(ModelEval {
        report: eval::class_metrics(&confusion),
        roc: eval::roc(y_test, &scores)?,
        model,
        scores,
        confusion,
    })
}

/// Splits the records, then trains and evaluates the pipelines with and
/// without PCA on the same split.
pub fn train_stationary(
    records: &[StationaryRecord],
    run: &RunConfig,
) -> Result<StationaryExperiment> {
    let labels: Vec<bool> = records.iter().map(|r| r.is_jammed).collect();
    let (tj, tn) = run.train_counts();
    let split = train_test_split(&labels, tj, tn, run.split_seed())?;
    if split.test_counts.contains(&0) {
        return Err(Error::Data("held-out set must contain both classes".into()));
    }
    let x = feature_rows(records);
    let pick = |idx: &[usize]| -> (Vec<Vec<f64>>, Vec<bool>) {
        (
            idx.iter().map(|&i| x[i].clone()).collect(),
            idx.iter().map(|&i| labels[i]).collect(),
        )
    };
    let (xtr, ytr) = pick(&split.train);
    let (xte, yte) = pick(&split.test);
    let (with_pca, without_pca) = rayon::join(
        || fit_and_eval(&xtr, &ytr, &xte, &yte, Some(run.n_components), &run.forest),
        || fit_and_eval(&xtr, &ytr, &xte, &yte, None, &run.forest),
    );
    Ok(StationaryExperiment {
        split,
        with_pca: with_pca?,
        without_pca: without_pca?,
        pca_selected: run.pca,
    })
}

pub fn labeled_series(records: &[EpochRecord]) -> LabeledSeries {
    LabeledSeries {
        sjnr: records.iter().map(|r| r.features.sjnr_at_target).collect(),
        rss_db: records
            .iter()
            .map(|r| signal::linear_to_db(r.features.rss))
            .collect(),
        labels: records.iter().map(|r| r.is_jammed).collect(),
    }
}

pub fn trajectory_features(t: &LoadedTrajectory) -> TrajectoryFeatures {
    TrajectoryFeatures {
        id: t.id,
        rows: t
            .records
            .iter()
            .map(|r| r.features.model_vector().to_vec())
            .collect(),
        labels: t.records.iter().map(|r| r.is_jammed).collect(),
    }
}

/// Adaptive detection over a set of trajectories.
#[derive(Debug, Clone)]
pub struct AdaptiveRun {
    pub config: AdaptiveConfig,
    pub traces: Vec<DetectionTrace>,
    pub summary: TrajectorySummary,
    /// Pooled per-class metrics.
    pub report: BinaryReport,
    pub n_points: usize,
    pub n_empty: usize,
}

pub fn detect_all(
    trajectories: &[LoadedTrajectory],
    config: &AdaptiveConfig,
) -> Result<AdaptiveRun> {
    config.validate()?;
    if trajectories.is_empty() {
        return Err(Error::Data("no trajectories to process".into()));
    }
    let traces = trajectories
        .par_iter()
        .map(|t| {
            let s = labeled_series(&t.records);
            adaptive::detect(&s.sjnr, &s.rss_db, config)
        })
        .collect::<geojam_core::Result<Vec<_>>>()?;
    let mut items = Vec::new();
    for (t, tr) in trajectories.iter().zip(&traces) {
        if !t.records.is_empty() {
            let labels: Vec<bool> = t.records.iter().map(|r| r.is_jammed).collect();
            items.push((t.id, eval::confusion(&labels, &tr.predicted)?));
        }
    }
    if items.is_empty() {
        return Err(Error::Data("every trajectory is empty".into()));
    }
    let summary = eval::aggregate_trajectories(&items)?;
    Ok(AdaptiveRun {
        config: *config,
        report: eval::class_metrics(&summary.pooled),
        n_points: trajectories.iter().map(|t| t.records.len()).sum(),
        n_empty: trajectories.len() - items.len(),
        traces,
        summary,
    })
}

/// Grid search scored in parallel; selection as in
/// [`adaptive::calibrate`].
pub fn calibrate(trajectories: &[LoadedTrajectory], grid: &CalibrationGrid) -> Result<Calibration> {
    let data: Vec<LabeledSeries> = trajectories
        .iter()
        .map(|t| labeled_series(&t.records))
        .collect();
    if data.iter().all(|s| s.labels.is_empty()) {
        return Err(Error::Data(
            "calibration needs at least one non-empty trajectory".into(),
        ));
    }
    let points = grid.points();
    let table: Vec<_> = adaptive::window_groups(&points)
        .par_iter()
        .map(|g| adaptive::score_window(&data, g))
        .collect::<geojam_core::Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(adaptive::finish_calibration(table)?)
}

/// Stationary model applied to time-variant trajectories.
#[derive(Debug, Clone)]
pub struct CrossRun {
    pub summary: TrajectorySummary,
    pub n_points: usize,
    pub n_empty: usize,
}

pub fn cross_domain(
    model: &StationaryModel,
    trajectories: &[LoadedTrajectory],
) -> Result<CrossRun> {
    let nonempty: Vec<TrajectoryFeatures> = trajectories
        .iter()
        .filter(|t| !t.records.is_empty())
        .map(trajectory_features)
        .collect();
    if nonempty.is_empty() {
        return Err(Error::Data("no non-empty trajectories to evaluate".into()));
    }
    Ok(CrossRun {
        summary: eval::cross_domain_eval(model, &nonempty)?,
        n_points: nonempty.iter().map(|t| t.rows.len()).sum(),
        n_empty: trajectories.len() - nonempty.len(),
    })
}
