//! CSV datasets, manifests and detection traces.
//!
//! Floats are written with Rust's shortest round-trip formatting, so a
//! write/read cycle reproduces every value bit for bit. Booleans are `0`/`1`,
//! undefined values are empty fields, line endings are LF.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use geojam_core::adaptive::DetectionTrace;
use geojam_core::orbital::{KeplerianElements, Vec3};
use geojam_core::scenario::{EpochRecord, StationaryRecord, Trajectory};
use geojam_core::signal::SignalFeatures;

use crate::error::{Error, Result};

pub const STATIONARY_HEADER: [&str; 12] = [
    "position_id",
    "attacker_x",
    "attacker_y",
    "attacker_z",
    "distance_to_target",
    "rss",
    "total_received_power",
    "total_amplitude_mean",
    "total_amplitude_std",
    "total_phase_variance",
    "sjnr_at_target",
    "is_jammed",
];

pub const TRAJECTORY_HEADER: [&str; 12] = [
    "trajectory_id",
    "epoch_s",
    "range_km",
    "distance_to_target",
    "rss",
    "total_received_power",
    "total_amplitude_mean",
    "total_amplitude_std",
    "total_phase_variance",
    "sjnr_at_target",
    "snr_db",
    "is_jammed",
];

pub const MANIFEST_HEADER: [&str; 11] = [
    "file",
    "trajectory_id",
    "seed",
    "points",
    "semi_major_axis",
    "eccentricity",
    "inclination",
    "raan",
    "arg_perigee",
    "mean_anomaly_epoch",
    "epoch",
];

pub const STATIONARY_MANIFEST_HEADER: [&str; 4] = ["file", "seed", "records", "jammed"];

pub const DETECTION_HEADER: [&str; 7] = [
    "epoch_s",
    "threshold_sjnr_db",
    "threshold_rss_db",
    "delta_sjnr_db",
    "delta_rss_db",
    "predicted",
    "is_jammed",
];

pub const MANIFEST_FILE: &str = "manifest.csv";
pub const STATIONARY_FILE: &str = "stationary.csv";

/// Shortest representation that parses back to the same `f64`.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}

fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

pub fn trajectory_file_name(id: usize) -> String {
    format!("trajectory_{id:04}.csv")
}

pub fn detection_file_name(id: usize) -> String {
    format!("detect_{id:04}.csv")
}

pub(crate) struct CsvOut {
    path: PathBuf,
    w: csv::Writer<BufWriter<File>>,
}

impl CsvOut {
    pub(crate) fn create(path: &Path, header: &[&str]) -> Result<Self> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(BufWriter::new(file));
        let mut out = CsvOut {
            path: path.to_path_buf(),
            w,
        };
        out.row(header)?;
        Ok(out)
    }

    pub(crate) fn row<I, T>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[u8]>,
    {
        self.w
            .write_record(fields)
            .map_err(|e| Error::Data(format!("{}: {e}", self.path.display())))
    }

    pub(crate) fn finish(mut self) -> Result<()> {
        self.w.flush().map_err(|e| Error::io(&self.path, e))
    }
}

/// A CSV file opened against a required set of columns.
pub(crate) struct CsvIn {
    path: PathBuf,
    reader: csv::Reader<File>,
    columns: Vec<usize>,
}

/// One data row with its source line, for error messages.
pub(crate) struct Row<'a> {
    path: &'a Path,
    record: csv::StringRecord,
    columns: &'a [usize],
    names: &'a [&'a str],
}

impl CsvIn {
    pub(crate) fn open(path: &Path, required: &[&str]) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut reader = csv::ReaderBuilder::new().flexible(false).from_reader(file);
        let headers = reader
            .headers()
            .map_err(|e| Error::Schema(format!("{}: unreadable header: {e}", path.display())))?
            .clone();
        let index: HashMap<&str, usize> = headers.iter().enumerate().map(|(i, h)| (h, i)).collect();
        let columns = required
            .iter()
            .map(|name| {
                index.get(name).copied().ok_or_else(|| {
                    Error::Schema(format!("{}: missing column `{name}`", path.display()))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CsvIn {
            path: path.to_path_buf(),
            reader,
            columns,
        })
    }

    /// Calls `f` on every data row.
    pub(crate) fn for_each(
        mut self,
        names: &[&str],
        mut f: impl FnMut(&Row<'_>) -> Result<()>,
    ) -> Result<()> {
        for rec in self.reader.records() {
            let record = rec.map_err(|e| {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                Error::Data(format!("{} line {line}: {e}", self.path.display()))
            })?;
            f(&Row {
                path: &self.path,
                record,
                columns: &self.columns,
                names,
            })?;
        }
        Ok(())
    }
}

impl Row<'_> {
    fn line(&self) -> u64 {
        self.record.position().map(|p| p.line()).unwrap_or(0)
    }

    fn bad(&self, i: usize, what: &str) -> Error {
        Error::Data(format!(
            "{} line {}: column `{}`: {what}",
            self.path.display(),
            self.line(),
            self.names[i]
        ))
    }

    fn raw(&self, i: usize) -> &str {
        self.record.get(self.columns[i]).unwrap_or("")
    }

    pub(crate) fn get<T: FromStr>(&self, i: usize) -> Result<T> {
        let s = self.raw(i);
        s.trim()
            .parse()
            .map_err(|_| self.bad(i, &format!("cannot parse `{s}`")))
    }

    pub(crate) fn opt_f64(&self, i: usize) -> Result<Option<f64>> {
        if self.raw(i).trim().is_empty() {
            Ok(None)
        } else {
            self.get(i).map(Some)
        }
    }

    pub(crate) fn flag(&self, i: usize) -> Result<bool> {
        match self.raw(i).trim() {
            "0" => Ok(false),
            "1" => Ok(true),
            s => Err(self.bad(i, &format!("expected 0 or 1, got `{s}`"))),
        }
    }
}

pub fn write_stationary(path: &Path, records: &[StationaryRecord]) -> Result<()> {
    let mut out = CsvOut::create(path, &STATIONARY_HEADER)?;
    for r in records {
        let f = &r.features;
        out.row([
            r.position_id.to_string(),
            num(r.attacker.x),
            num(r.attacker.y),
            num(r.attacker.z),
            num(f.distance_to_target),
            num(f.rss),
            num(f.total_received_power),
            num(f.total_amplitude_mean),
            num(f.total_amplitude_std),
            num(f.total_phase_variance),
            num(f.sjnr_at_target),
            flag(r.is_jammed).to_string(),
        ])?;
    }
    out.finish()
}

pub fn read_stationary(path: &Path) -> Result<Vec<StationaryRecord>> {
    let mut out = Vec::new();
    CsvIn::open(path, &STATIONARY_HEADER)?.for_each(&STATIONARY_HEADER, |r| {
        out.push(StationaryRecord {
            position_id: r.get(0)?,
            attacker: Vec3::new(r.get(1)?, r.get(2)?, r.get(3)?),
            features: SignalFeatures {
                distance_to_target: r.get(4)?,
                rss: r.get(5)?,
                total_received_power: r.get(6)?,
                total_amplitude_mean: r.get(7)?,
                total_amplitude_std: r.get(8)?,
                total_phase_variance: r.get(9)?,
                sjnr_at_target: r.get(10)?,
            },
            is_jammed: r.flag(11)?,
        });
        Ok(())
    })?;
    Ok(out)
}

pub fn write_trajectory(path: &Path, records: &[EpochRecord]) -> Result<()> {
    let mut out = CsvOut::create(path, &TRAJECTORY_HEADER)?;
    for r in records {
        let f = &r.features;
        out.row([
            r.trajectory_id.to_string(),
            num(r.epoch),
            num(r.range_km),
            num(f.distance_to_target),
            num(f.rss),
            num(f.total_received_power),
            num(f.total_amplitude_mean),
            num(f.total_amplitude_std),
            num(f.total_phase_variance),
            num(f.sjnr_at_target),
            num(r.snr_db),
            flag(r.is_jammed).to_string(),
        ])?;
    }
    out.finish()
}

pub fn read_trajectory(path: &Path) -> Result<Vec<EpochRecord>> {
    let mut out = Vec::new();
    CsvIn::open(path, &TRAJECTORY_HEADER)?.for_each(&TRAJECTORY_HEADER, |r| {
        out.push(EpochRecord {
            trajectory_id: r.get(0)?,
            epoch: r.get(1)?,
            range_km: r.get(2)?,
            features: SignalFeatures {
                distance_to_target: r.get(3)?,
                rss: r.get(4)?,
                total_received_power: r.get(5)?,
                total_amplitude_mean: r.get(6)?,
                total_amplitude_std: r.get(7)?,
                total_phase_variance: r.get(8)?,
                sjnr_at_target: r.get(9)?,
            },
            snr_db: r.get(10)?,
            is_jammed: r.flag(11)?,
        });
        Ok(())
    })?;
    Ok(out)
}

/// One manifest line of a time-variant dataset directory.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    pub file: String,
    pub trajectory_id: usize,
    pub seed: u64,
    pub points: usize,
    pub elements: KeplerianElements,
}

impl ManifestEntry {
    pub fn for_trajectory(t: &Trajectory) -> Self {
        ManifestEntry {
            file: trajectory_file_name(t.id),
            trajectory_id: t.id,
            seed: t.seed,
            points: t.records.len(),
            elements: t.elements,
        }
    }
}

pub fn write_manifest(path: &Path, entries: &[ManifestEntry]) -> Result<()> {
    let mut out = CsvOut::create(path, &MANIFEST_HEADER)?;
    for m in entries {
        let e = &m.elements;
        out.row([
            m.file.clone(),
            m.trajectory_id.to_string(),
            m.seed.to_string(),
            m.points.to_string(),
            num(e.semi_major_axis),
            num(e.eccentricity),
            num(e.inclination),
            num(e.raan),
            num(e.arg_perigee),
            num(e.mean_anomaly_epoch),
            num(e.epoch),
        ])?;
    }
    out.finish()
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    let mut out = Vec::new();
    CsvIn::open(path, &MANIFEST_HEADER)?.for_each(&MANIFEST_HEADER, |r| {
        out.push(ManifestEntry {
            file: r.get(0)?,
            trajectory_id: r.get(1)?,
            seed: r.get(2)?,
            points: r.get(3)?,
            elements: KeplerianElements {
                semi_major_axis: r.get(4)?,
                eccentricity: r.get(5)?,
                inclination: r.get(6)?,
                raan: r.get(7)?,
                arg_perigee: r.get(8)?,
                mean_anomaly_epoch: r.get(9)?,
                epoch: r.get(10)?,
            },
        });
        Ok(())
    })?;
    Ok(out)
}

/// Trajectory as loaded from a dataset directory.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedTrajectory {
    pub id: usize,
    pub seed: u64,
    pub records: Vec<EpochRecord>,
}

impl From<&Trajectory> for LoadedTrajectory {
    fn from(t: &Trajectory) -> Self {
        LoadedTrajectory {
            id: t.id,
            seed: t.seed,
            records: t.records.clone(),
        }
    }
}

/// Writes one CSV per trajectory plus the manifest.
pub fn write_timevariant_dir(dir: &Path, trajectories: &[Trajectory]) -> Result<()> {
    for t in trajectories {
        write_trajectory(&dir.join(trajectory_file_name(t.id)), &t.records)?;
    }
    let entries: Vec<ManifestEntry> = trajectories
        .iter()
        .map(ManifestEntry::for_trajectory)
        .collect();
    write_manifest(&dir.join(MANIFEST_FILE), &entries)
}

/// Loads every trajectory listed in `dir/manifest.csv`.
pub fn read_timevariant_dir(dir: &Path) -> Result<Vec<LoadedTrajectory>> {
    let manifest = dir.join(MANIFEST_FILE);
    if !manifest.is_file() {
        return Err(Error::Data(format!(
            "{}: no {MANIFEST_FILE}; not a time-variant dataset directory",
            dir.display()
        )));
    }
    let entries = read_manifest(&manifest)?;
    if entries.is_empty() {
        return Err(Error::Data(format!(
            "{}: manifest lists no trajectories",
            dir.display()
        )));
    }
    entries
        .iter()
        .map(|m| {
            let path = dir.join(&m.file);
            let records = read_trajectory(&path)?;
            if records.len() != m.points
                || records.iter().any(|r| r.trajectory_id != m.trajectory_id)
            {
                return Err(Error::Data(format!(
                    "{}: contents disagree with the manifest",
                    path.display()
                )));
            }
            Ok(LoadedTrajectory {
                id: m.trajectory_id,
                seed: m.seed,
                records,
            })
        })
        .collect()
}

/// Manifest of a stationary dataset directory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StationaryManifest {
    pub seed: u64,
    pub records: usize,
    pub jammed: usize,
}

pub fn write_stationary_dir(dir: &Path, seed: u64, records: &[StationaryRecord]) -> Result<()> {
    write_stationary(&dir.join(STATIONARY_FILE), records)?;
    let mut out = CsvOut::create(&dir.join(MANIFEST_FILE), &STATIONARY_MANIFEST_HEADER)?;
    let jammed = records.iter().filter(|r| r.is_jammed).count();
    out.row([
        STATIONARY_FILE.to_string(),
        seed.to_string(),
        records.len().to_string(),
        jammed.to_string(),
    ])?;
    out.finish()
}

/// Accepts either a stationary CSV file or a directory written by
/// [`write_stationary_dir`].
pub fn read_stationary_path(path: &Path) -> Result<Vec<StationaryRecord>> {
    if path.is_dir() {
        let file = path.join(STATIONARY_FILE);
        if !file.is_file() {
            return Err(Error::Data(format!(
                "{}: no {STATIONARY_FILE}",
                path.display()
            )));
        }
        read_stationary(&file)
    } else {
        read_stationary(path)
    }
}

/// One row of a detection CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionRow {
    pub epoch: f64,
    pub threshold_sjnr: Option<f64>,
    pub threshold_rss: Option<f64>,
    pub delta_sjnr: Option<f64>,
    pub delta_rss: Option<f64>,
    pub predicted: bool,
    pub is_jammed: bool,
}

pub fn write_detection(path: &Path, records: &[EpochRecord], trace: &DetectionTrace) -> Result<()> {
    if records.len() != trace.len() {
        return Err(Error::Data(
            "detection trace and records differ in length".into(),
        ));
    }
    let mut out = CsvOut::create(path, &DETECTION_HEADER)?;
    for (k, r) in records.iter().enumerate() {
        out.row([
            num(r.epoch),
            opt_num(trace.threshold_sjnr[k]),
            opt_num(trace.threshold_rss[k]),
            opt_num(trace.delta_sjnr[k]),
            opt_num(trace.delta_rss[k]),
            flag(trace.predicted[k]).to_string(),
            flag(r.is_jammed).to_string(),
        ])?;
    }
    out.finish()
}

pub fn read_detection(path: &Path) -> Result<Vec<DetectionRow>> {
    let mut out = Vec::new();
    CsvIn::open(path, &DETECTION_HEADER)?.for_each(&DETECTION_HEADER, |r| {
        out.push(DetectionRow {
            epoch: r.get(0)?,
            threshold_sjnr: r.opt_f64(1)?,
            threshold_rss: r.opt_f64(2)?,
            delta_sjnr: r.opt_f64(3)?,
            delta_rss: r.opt_f64(4)?,
            predicted: r.flag(5)?,
            is_jammed: r.flag(6)?,
        });
        Ok(())
    })?;
    Ok(out)
}

/// Creates `dir` and its parents.
pub fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Writes a whole text file.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
    f.write_all(text.as_bytes())
        .and_then(|_| f.flush())
        .map_err(|e| Error::io(path, e))
}
