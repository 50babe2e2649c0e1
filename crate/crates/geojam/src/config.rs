//! Run configuration: defaults, `key = value` files and overrides.
//!
//! File syntax: one `key = value` per line, `#` starts a comment, blank
//! lines are ignored. Unknown keys are rejected. Angles are given in
//! degrees, lists as comma-separated values.

use std::path::{Path, PathBuf};

use geojam_core::adaptive::{AdaptiveConfig, CalibrationGrid};
use geojam_core::scenario::{StationaryConfig, TimeVariantConfig};
use geojam_core::seed::{mix_seed, stage};
use geojam_core::stationary::ForestParams;

use crate::csv_io::num;
use crate::error::{Error, Result};

/// Environment variable naming the default output directory.
pub const ENV_OUT: &str = "GEOJAM_OUT";
/// Environment variable naming a configuration file to load.
pub const ENV_CONFIG: &str = "GEOJAM_CONFIG";

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub stationary: StationaryConfig,
    pub timevariant: TimeVariantConfig,
    pub pca: bool,
    pub n_components: usize,
    pub forest: ForestParams,
    /// Training records per class; `None` derives them from an 80 % split.
    pub train_jammed: Option<usize>,
    pub train_nonjammed: Option<usize>,
    pub adaptive: AdaptiveConfig,
    pub grid: CalibrationGrid,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 42,
            out: None,
            stationary: StationaryConfig::default(),
            timevariant: TimeVariantConfig::default(),
            pca: true,
            n_components: 1,
            forest: ForestParams::default(),
            train_jammed: None,
            train_nonjammed: None,
            adaptive: AdaptiveConfig::default(),
            grid: CalibrationGrid::default(),
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{value}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(Error::Config(format!(
            "`{key}`: expected true or false, got `{value}`"
        ))),
    }
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    let v = value
        .split(',')
        .map(|s| parse(key, s.trim()))
        .collect::<Result<Vec<T>>>()?;
    if v.is_empty() {
        return Err(Error::Config(format!("`{key}` must not be empty")));
    }
    Ok(v)
}

fn list_str<T: ToString>(v: &[T]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

impl RunConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let s = &mut self.stationary;
        let t = &mut self.timevariant;
        match key {
            "seed" => self.seed = parse(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),

            "frequency_hz" => {
                s.link.frequency = parse(key, value)?;
                t.link.frequency = s.link.frequency;
            }
            "bandwidth_hz" => {
                s.link.bandwidth = parse(key, value)?;
                t.link.bandwidth = s.link.bandwidth;
            }
            "tx_power_w" => {
                s.link.tx_power = parse(key, value)?;
                t.link.tx_power = s.link.tx_power;
            }
            "tx_gain_dbi" => {
                s.link.tx_gain = parse(key, value)?;
                t.link.tx_gain = s.link.tx_gain;
            }
            "rx_gain_dbi" => {
                s.link.rx_gain = parse(key, value)?;
                t.link.rx_gain = s.link.rx_gain;
            }
            "noise_temperature_k" => {
                s.link.noise_temperature = parse(key, value)?;
                t.link.noise_temperature = s.link.noise_temperature;
            }
            "jam_power_w" => {
                s.jam_power = parse(key, value)?;
                t.jam_power = s.jam_power;
            }
            "attacker_gain_dbi" => {
                s.attacker_gain = parse(key, value)?;
                t.attacker_gain = s.attacker_gain;
            }
            "target_longitude_deg" => {
                s.target_longitude = parse::<f64>(key, value)?.to_radians();
                t.target_longitude = s.target_longitude;
            }

            "n_positions" => s.n_positions = parse(key, value)?,
            "jammed_count" => s.jammed_count = parse(key, value)?,
            "samples_per_position" => s.samples_per_position = parse(key, value)?,
            "voi_radius_km" => s.voi_radius = parse(key, value)?,

            "trajectories" => t.n_trajectories = parse(key, value)?,
            "duration_s" => t.duration = parse(key, value)?,
            "epoch_step_s" => t.epoch_step = parse(key, value)?,
            "jam_period" => t.jam_period = parse(key, value)?,
            "jam_duty" => t.jam_duty = parse(key, value)?,
            "access_radius_km" => t.voi_radius = parse(key, value)?,
            "samples_per_epoch" => t.samples_per_epoch = parse(key, value)?,
            "sma_half_width_km" => t.bands.semi_major_axis_half_width = parse(key, value)?,
            "max_eccentricity" => t.bands.max_eccentricity = parse(key, value)?,
            "max_inclination_deg" => {
                t.bands.max_inclination = parse::<f64>(key, value)?.to_radians()
            }

            "pca" => self.pca = parse_bool(key, value)?,
            "n_components" => self.n_components = parse(key, value)?,
            "trees" => self.forest.n_trees = parse(key, value)?,
            "max_depth" => self.forest.max_depth = parse(key, value)?,
            "min_samples_split" => self.forest.min_samples_split = parse(key, value)?,
            "train_jammed" => self.train_jammed = Some(parse(key, value)?),
            "train_nonjammed" => self.train_nonjammed = Some(parse(key, value)?),

            "window" => self.adaptive.window = parse(key, value)?,
            "alpha" => self.adaptive.alpha = parse(key, value)?,
            "beta" => self.adaptive.beta = parse(key, value)?,
            "beta_rss" => self.adaptive.beta_rss = Some(parse(key, value)?),
            "min_warmup" => {
                self.adaptive.min_warmup = parse(key, value)?;
                self.grid.min_warmup = self.adaptive.min_warmup;
            }
            "grid_windows" => self.grid.windows = parse_list(key, value)?,
            "grid_alphas" => self.grid.alphas = parse_list(key, value)?,
            "grid_betas" => self.grid.betas = parse_list(key, value)?,
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Applies every setting of a `key = value` text.
    pub fn apply_text(&mut self, text: &str, origin: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("{origin} line {}: expected `key = value`", i + 1))
            })?;
            self.set(key.trim(), value.trim()).map_err(|e| match e {
                Error::Config(m) => Error::Config(format!("{origin} line {}: {m}", i + 1)),
                other => other,
            })?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        self.apply_text(&text, &path.display().to_string())
    }

    /// Pushes the global seed into the scenario configurations.
    pub fn resolve_seeds(&mut self) {
        self.stationary.seed = self.seed;
        self.timevariant.seed = self.seed;
        self.forest.seed = mix_seed(self.seed, stage::FOREST);
    }

    pub fn split_seed(&self) -> u64 {
        mix_seed(self.seed, stage::SPLIT)
    }

    /// `n_components` when PCA is enabled.
    pub fn components(&self) -> Option<usize> {
        self.pca.then_some(self.n_components)
    }

    /// Training counts `(jammed, non-jammed)`: 80 % of all records
    /// (rounded) with the jammed share rounded down.
    pub fn train_counts(&self) -> (usize, usize) {
        let n = self.stationary.n_positions;
        let jammed = self.stationary.jammed_count;
        let total = (n * 4 + 2) / 5;
        let tj = self.train_jammed.unwrap_or(jammed * 4 / 5);
        let tn = self.train_nonjammed.unwrap_or(total.saturating_sub(tj));
        (tj, tn)
    }

    /// Checks everything a command might use.
    pub fn validate(&self) -> Result<()> {
        self.stationary.validate()?;
        self.timevariant.validate()?;
        self.adaptive.validate()?;
        if self.forest.n_trees == 0 || self.forest.max_depth == 0 {
            return Err(Error::Config("trees and max_depth must be positive".into()));
        }
        if self.n_components == 0 || self.n_components > geojam_core::signal::MODEL_FEATURES.len() {
            return Err(Error::Config("n_components must lie in 1..=6".into()));
        }
        let (tj, tn) = self.train_counts();
        let jammed = self.stationary.jammed_count;
        let clean = self.stationary.n_positions - jammed;
        if tj > jammed || tn > clean || tj == 0 || tn == 0 {
            return Err(Error::Config(format!(
                "training split {tn}/{tj} (non-jammed/jammed) does not fit {clean}/{jammed} records"
            )));
        }
        let g = &self.grid;
        if g.windows.is_empty() || g.alphas.is_empty() || g.betas.is_empty() {
            return Err(Error::Config(
                "calibration grid axes must not be empty".into(),
            ));
        }
        for c in g.points() {
            c.validate()?;
        }
        Ok(())
    }

    /// The detector settings as `key = value` lines.
    pub fn adaptive_text(a: &AdaptiveConfig) -> String {
        let mut s = format!(
            "window = {}\nalpha = {}\nbeta = {}\nmin_warmup = {}\n",
            a.window,
            num(a.alpha),
            num(a.beta),
            a.min_warmup
        );
        if let Some(b) = a.beta_rss {
            s.push_str(&format!("beta_rss = {}\n", num(b)));
        }
        s
    }

    /// Every setting as a `key = value` file that reproduces this config.
    pub fn to_text(&self) -> String {
        let s = &self.stationary;
        let t = &self.timevariant;
        let mut out = String::new();
        let mut kv = |k: &str, v: String| out.push_str(&format!("{k} = {v}\n"));
        kv("seed", self.seed.to_string());
        kv("frequency_hz", num(s.link.frequency));
        kv("bandwidth_hz", num(s.link.bandwidth));
        kv("tx_power_w", num(s.link.tx_power));
        kv("tx_gain_dbi", num(s.link.tx_gain));
        kv("rx_gain_dbi", num(s.link.rx_gain));
        kv("noise_temperature_k", num(s.link.noise_temperature));
        kv("jam_power_w", num(s.jam_power));
        kv("attacker_gain_dbi", num(s.attacker_gain));
        kv("target_longitude_deg", num(s.target_longitude.to_degrees()));
        kv("n_positions", s.n_positions.to_string());
        kv("jammed_count", s.jammed_count.to_string());
        kv("samples_per_position", s.samples_per_position.to_string());
        kv("voi_radius_km", num(s.voi_radius));
        kv("trajectories", t.n_trajectories.to_string());
        kv("duration_s", num(t.duration));
        kv("epoch_step_s", num(t.epoch_step));
        kv("jam_period", t.jam_period.to_string());
        kv("jam_duty", num(t.jam_duty));
        kv("access_radius_km", num(t.voi_radius));
        kv("samples_per_epoch", t.samples_per_epoch.to_string());
        kv("sma_half_width_km", num(t.bands.semi_major_axis_half_width));
        kv("max_eccentricity", num(t.bands.max_eccentricity));
        kv(
            "max_inclination_deg",
            num(t.bands.max_inclination.to_degrees()),
        );
        kv("pca", self.pca.to_string());
        kv("n_components", self.n_components.to_string());
        kv("trees", self.forest.n_trees.to_string());
        kv("max_depth", self.forest.max_depth.to_string());
        kv(
            "min_samples_split",
            self.forest.min_samples_split.to_string(),
        );
        if let Some(v) = self.train_jammed {
            kv("train_jammed", v.to_string());
        }
        if let Some(v) = self.train_nonjammed {
            kv("train_nonjammed", v.to_string());
        }
        kv("grid_windows", list_str(&self.grid.windows));
        kv("grid_alphas", list_str(&self.grid.alphas));
        kv("grid_betas", list_str(&self.grid.betas));
        out + &Self::adaptive_text(&self.adaptive)
    }
}
