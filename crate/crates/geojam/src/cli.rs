//! The `geojam` command line.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::{RunConfig, ENV_CONFIG, ENV_OUT};
use crate::csv_io::{self, CsvOut, LoadedTrajectory};
use crate::error::{Error, Result};
use crate::{model_io, pipeline, report};

#[derive(Debug, Parser)]
#[command(
    name = "geojam",
    version,
    about = "GEO uplink jamming simulation and detection"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Settings shared by every pipeline command. Flags override the
/// configuration file.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// `key = value` configuration file (default: $GEOJAM_CONFIG).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Global seed; every random stage derives its seed from it.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory (default: $GEOJAM_OUT/<command> or geojam-out/<command>).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Reduce features with PCA before the forest (default).
    #[arg(long, overrides_with = "no_pca")]
    pub pca: bool,
    /// Train the forest on standardized features without PCA.
    #[arg(long)]
    pub no_pca: bool,
    #[arg(long)]
    pub trees: Option<usize>,
    #[arg(long)]
    pub max_depth: Option<usize>,
    /// Adaptive detector window W, epochs.
    #[arg(long)]
    pub window: Option<usize>,
    /// Adaptive threshold multiplier.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Rate-of-change threshold, dB.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Number of time-variant trajectories.
    #[arg(long)]
    pub trajectories: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate the stationary dataset.
    GenStationary(Common),
    /// Generate the time-variant trajectories.
    GenTimevariant(Common),
    /// Train and evaluate the stationary classifier.
    TrainStationary {
        #[command(flatten)]
        common: Common,
        /// Stationary CSV or dataset directory; generated when omitted.
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Run the adaptive threshold detector on time-variant data.
    DetectAdaptive {
        #[command(flatten)]
        common: Common,
        /// Time-variant dataset directory; generated when omitted.
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Apply a stationary model to time-variant data.
    EvalCross {
        #[command(flatten)]
        common: Common,
        /// Model file written by train-stationary.
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Grid-search the adaptive detector parameters.
    Calibrate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Merge the reports of several run directories.
    Report {
        /// Output directory (default: $GEOJAM_OUT/report or geojam-out/report).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run directories, each holding report.txt and metrics.csv.
        #[arg(required = true)]
        runs: Vec<PathBuf>,
    },
}

pub const REPORT_FILE: &str = "report.txt";
pub const METRICS_FILE: &str = "metrics.csv";
pub const MODEL_FILE: &str = "model.txt";

fn default_out(command: &str, configured: Option<&PathBuf>) -> PathBuf {
    if let Some(base) = std::env::var_os(ENV_OUT) {
        return PathBuf::from(base).join(command);
    }
    match configured {
        Some(p) => p.clone(),
        None => PathBuf::from("geojam-out").join(command),
    }
}

/// Builds the validated configuration and the output directory.
pub fn resolve(common: &Common, command: &str) -> Result<(RunConfig, PathBuf)> {
    let mut cfg = RunConfig::default();
    let file = common
        .config
        .clone()
        .or_else(|| std::env::var_os(ENV_CONFIG).map(PathBuf::from));
    if let Some(path) = file {
        cfg.apply_file(&path).map_err(|e| match e {
            Error::Io { path, source } => {
                Error::Config(format!("cannot read {}: {source}", path.display()))
            }
            other => other,
        })?;
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if common.no_pca {
        cfg.pca = false;
    }
    if common.pca {
        cfg.pca = true;
    }
    if let Some(v) = common.trees {
        cfg.forest.n_trees = v;
    }
    if let Some(v) = common.max_depth {
        cfg.forest.max_depth = v;
    }
    if let Some(v) = common.window {
        cfg.adaptive.window = v;
    }
    if let Some(v) = common.alpha {
        cfg.adaptive.alpha = v;
    }
    if let Some(v) = common.beta {
        cfg.adaptive.beta = v;
    }
    if let Some(v) = common.trajectories {
        cfg.timevariant.n_trajectories = v;
    }
    cfg.resolve_seeds();
    cfg.validate()?;
    let out = common
        .out
        .clone()
        .unwrap_or_else(|| default_out(command, cfg.out.as_ref()));
    Ok((cfg, out))
}

fn load_trajectories(data: Option<&Path>, cfg: &RunConfig) -> Result<Vec<LoadedTrajectory>> {
    match data {
        Some(dir) => csv_io::read_timevariant_dir(dir),
        None => Ok(pipeline::generate_timevariant(&cfg.timevariant)?
            .iter()
            .map(LoadedTrajectory::from)
            .collect()),
    }
}

fn write_run(out: &Path, text: &str, metrics: &[(String, Option<f64>)]) -> Result<()> {
    csv_io::write_text(&out.join(REPORT_FILE), text)?;
    report::write_metrics(&out.join(METRICS_FILE), metrics)
}

/// Executes one parsed command; returns the text printed on success.
pub fn execute(cli: Cli) -> Result<String> {
    match cli.command {
        Command::GenStationary(common) => {
            let (cfg, out) = resolve(&common, "gen-stationary")?;
            let records = pipeline::generate_stationary(&cfg.stationary)?;
            csv_io::ensure_dir(&out)?;
            csv_io::write_stationary_dir(&out, cfg.seed, &records)?;
            let jammed = records.iter().filter(|r| r.is_jammed).count();
            Ok(format!(
                "wrote {} records ({jammed} jammed) to {}\n",
                records.len(),
                out.join(csv_io::STATIONARY_FILE).display()
            ))
        }
        Command::GenTimevariant(common) => {
            let (cfg, out) = resolve(&common, "gen-timevariant")?;
            let trajectories = pipeline::generate_timevariant(&cfg.timevariant)?;
            let points: usize = trajectories.iter().map(|t| t.records.len()).sum();
            let jammed: usize = trajectories
                .iter()
                .map(|t| t.records.iter().filter(|r| r.is_jammed).count())
                .sum();
            let empty = trajectories.iter().filter(|t| t.records.is_empty()).count();
            let text = format!(
                "Time-variant dataset (seed {})\nTrajectories: {} ({} with data, {} empty)\nPrediction points: {points}\nJammed fraction (%): {}\n",
                cfg.seed,
                trajectories.len(),
                trajectories.len() - empty,
                empty,
                report::pct((points > 0).then(|| jammed as f64 / points as f64)),
            );
            csv_io::ensure_dir(&out)?;
            csv_io::write_timevariant_dir(&out, &trajectories)?;
            let metrics = vec![
                (
                    "timevariant.trajectories".to_string(),
                    Some(trajectories.len() as f64),
                ),
                ("timevariant.empty".to_string(), Some(empty as f64)),
                ("timevariant.points".to_string(), Some(points as f64)),
            ];
            write_run(&out, &text, &metrics)?;
            Ok(text)
        }
        Command::TrainStationary { common, data } => {
            let (cfg, out) = resolve(&common, "train-stationary")?;
            let records = match &data {
                Some(p) => csv_io::read_stationary_path(p)?,
                None => pipeline::generate_stationary(&cfg.stationary)?,
            };
            let exp = pipeline::train_stationary(&records, &cfg)?;
            let text = report::stationary_report(&exp, cfg.seed, cfg.n_components);
            csv_io::ensure_dir(&out)?;
            model_io::save_model(&out.join(MODEL_FILE), &exp.selected().model)?;
            report::write_roc(&out.join("roc.csv"), &exp.selected().roc)?;
            write_run(&out, &text, &report::stationary_metrics(&exp))?;
            Ok(text)
        }
        Command::DetectAdaptive { common, data } => {
            let (cfg, out) = resolve(&common, "detect-adaptive")?;
            let trajectories = load_trajectories(data.as_deref(), &cfg)?;
            let run = pipeline::detect_all(&trajectories, &cfg.adaptive)?;
            let text = report::adaptive_report(&run);
            csv_io::ensure_dir(&out)?;
            for (t, trace) in trajectories.iter().zip(&run.traces) {
                csv_io::write_detection(
                    &out.join(csv_io::detection_file_name(t.id)),
                    &t.records,
                    trace,
                )?;
            }
            write_run(&out, &text, &report::adaptive_metrics(&run))?;
            Ok(text)
        }
        Command::EvalCross {
            common,
            model,
            data,
        } => {
            let (cfg, out) = resolve(&common, "eval-cross")?;
            let model = model_io::load_model(&model)?;
            let trajectories = load_trajectories(data.as_deref(), &cfg)?;
            let run = pipeline::cross_domain(&model, &trajectories)?;
            let text = report::cross_report(&run);
            csv_io::ensure_dir(&out)?;
            let mut per = CsvOut::create(
                &out.join("cross_trajectories.csv"),
                &[
                    "trajectory_id",
                    "points",
                    "accuracy",
                    "f1_jammed",
                    "f1_non_jammed",
                ],
            )?;
            for t in &run.summary.per_trajectory {
                let opt = |v: Option<f64>| {
                    v.map(csv_io::num)
                        .unwrap_or_else(|| report::UNDEFINED.into())
                };
                per.row([
                    t.id.to_string(),
                    t.confusion.total().to_string(),
                    opt(t.report.accuracy),
                    opt(t.report.jammed.f1),
                    opt(t.report.non_jammed.f1),
                ])?;
            }
            per.finish()?;
            write_run(&out, &text, &report::cross_metrics(&run))?;
            Ok(text)
        }
        Command::Calibrate { common, data } => {
            let (cfg, out) = resolve(&common, "calibrate")?;
            let trajectories = load_trajectories(data.as_deref(), &cfg)?;
            let cal = pipeline::calibrate(&trajectories, &cfg.grid)?;
            let text = report::calibration_report(&cal);
            csv_io::ensure_dir(&out)?;
            report::write_calibration_table(&out.join("calibration.csv"), &cal)?;
            csv_io::write_text(
                &out.join("calibrated.conf"),
                &RunConfig::adaptive_text(&cal.best),
            )?;
            write_run(&out, &text, &report::calibration_metrics(&cal))?;
            Ok(text)
        }
        Command::Report { out, runs } => {
            let out = out.unwrap_or_else(|| default_out("report", None));
            consolidate(&runs, &out)
        }
    }
}

/// Concatenates run reports and metrics in the order given.
pub fn consolidate(runs: &[PathBuf], out: &Path) -> Result<String> {
    let mut text = String::new();
    let mut rows: Vec<[String; 3]> = Vec::new();
    for dir in runs {
        let name = dir.display().to_string();
        let report_path = dir.join(REPORT_FILE);
        let metrics_path = dir.join(METRICS_FILE);
        for p in [&report_path, &metrics_path] {
            if !p.is_file() {
                return Err(Error::Data(format!("missing artifact {}", p.display())));
            }
        }
        let body = std::fs::read_to_string(&report_path).map_err(|e| Error::io(&report_path, e))?;
        text.push_str(&format!("== {name} ==\n{body}\n"));
        csv_io::CsvIn::open(&metrics_path, &["metric", "value"])?.for_each(
            &["metric", "value"],
            |r| {
                rows.push([name.clone(), r.get(0)?, r.get(1)?]);
                Ok(())
            },
        )?;
    }
    csv_io::ensure_dir(out)?;
    csv_io::write_text(&out.join(REPORT_FILE), &text)?;
    let mut m = CsvOut::create(&out.join(METRICS_FILE), &["run", "metric", "value"])?;
    for r in &rows {
        m.row(r)?;
    }
    m.finish()?;
    Ok(text)
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(text) => {
            let _ = std::io::stdout().write_all(text.as_bytes());
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
