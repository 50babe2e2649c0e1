//! Labeled dataset generation.
//!
//! Two datasets are produced:
//!
//! * **stationary**: attacker positions drawn uniformly from the volume of
//!   interest (VOI) around the target, one 200-sample burst per position;
//! * **time-variant**: randomized attacker orbits propagated over a horizon,
//!   one burst per access epoch, with periodic jamming.
//!
//! Every item (position, trajectory, epoch) gets its own derived seed, so
//! items may be generated in any order or in parallel and the output is
//! still determined by the global seed alone.

// float math in no_std builds; unused when std is linked for tests
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::orbital::{self, AttackerBands, EpochGrid, GroundStation, KeplerianElements, Vec3};
use crate::seed::{self, mix_seed, stage};
use crate::signal::{self, RfLinkConfig, SignalFeatures};

/// Stationary-dataset parameters. Defaults reproduce the reference run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryConfig {
    pub link: RfLinkConfig,
    /// Jammer transmit power, W.
    pub jam_power: f64,
    /// Jammer antenna gain, dBi.
    pub attacker_gain: f64,
    pub n_positions: usize,
    pub samples_per_position: usize,
    /// km
    pub voi_radius: f64,
    pub jammed_count: usize,
    /// rad
    pub target_longitude: f64,
    pub seed: u64,
}

impl Default for StationaryConfig {
    fn default() -> Self {
        StationaryConfig {
            link: RfLinkConfig::default(),
            jam_power: 100.0,
            attacker_gain: 30.0,
            n_positions: 5_000,
            samples_per_position: 200,
            voi_radius: 5_000.0,
            jammed_count: 2_262,
            target_longitude: 0.0,
            seed: 42,
        }
    }
}

impl StationaryConfig {
    pub fn validate(&self) -> Result<()> {
        self.link.validate()?;
        check_jammer(self.jam_power, self.attacker_gain)?;
        if self.jammed_count > self.n_positions {
            return Err(Error::config("jammed_count exceeds n_positions"));
        }
        if self.samples_per_position < 2 {
            return Err(Error::config("samples_per_position must be at least 2"));
        }
        if !(self.voi_radius >= 0.0 && self.voi_radius.is_finite()) {
            return Err(Error::config(
                "voi_radius must be a finite non-negative distance",
            ));
        }
        if !self.target_longitude.is_finite() {
            return Err(Error::config("target_longitude must be finite"));
        }
        Ok(())
    }
}

fn check_jammer(jam_power: f64, attacker_gain: f64) -> Result<()> {
    if !(jam_power >= 0.0 && jam_power.is_finite()) {
        return Err(Error::config("jam_power must be finite and non-negative"));
    }
    if !attacker_gain.is_finite() {
        return Err(Error::config("attacker_gain must be finite"));
    }
    Ok(())
}

/// One row of the stationary dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryRecord {
    pub position_id: usize,
    /// ECI, km
    pub attacker: Vec3,
    pub features: SignalFeatures,
    pub is_jammed: bool,
}

/// Static uplink quantities shared by every record of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UplinkBudget {
    /// Ground station to target, km.
    pub uplink_distance: f64,
    /// W
    pub signal_rx: f64,
    /// W
    pub noise: f64,
}

impl UplinkBudget {
    /// Budget for a target at its GEO slot with the ground station directly
    /// beneath it.
    pub fn beneath_geo_slot(link: &RfLinkConfig, target_longitude: f64) -> Self {
        let target = orbital::geo_slot_state(target_longitude, 0.0).position;
        let gs = orbital::ground_station_eci(&GroundStation::beneath(target_longitude), 0.0);
        let d = orbital::range_km(target, gs);
        UplinkBudget {
            uplink_distance: d,
            signal_rx: link.signal_rx(d),
            noise: link.noise(),
        }
    }

    pub fn snr_db(&self) -> f64 {
        signal::snr_db(self.signal_rx, self.noise)
    }
}

#[derive(Debug, Clone, Copy)]
struct Jammer {
    power: f64,
    gain: f64,
}

/// Synthesizes one burst and its features for an attacker at
/// `attacker_range` km.
fn burst_features(
    link: &RfLinkConfig,
    budget: &UplinkBudget,
    jammer: Jammer,
    attacker_range: f64,
    jammed: bool,
    samples: usize,
    seed: u64,
) -> Result<SignalFeatures> {
    let jam_rx = link.jam_rx(jammer.power, jammer.gain, attacker_range);
    let r = signal::synthesize_received(
        budget.signal_rx,
        jam_rx,
        budget.noise,
        samples,
        jammed,
        seed,
    )?;
    let (sjnr, total) = if jammed {
        (
            signal::sjnr_db(budget.signal_rx, jam_rx, budget.noise),
            budget.signal_rx + budget.noise + jam_rx,
        )
    } else {
        (budget.snr_db(), budget.signal_rx + budget.noise)
    };
    signal::extract_features(&r, attacker_range, sjnr, total)
}

/// Exactly `jammed` of `n` labels set, positions chosen by a seeded shuffle.
pub fn shuffled_labels(n: usize, jammed: usize, seed: u64) -> Vec<bool> {
    let mut labels: Vec<bool> = (0..n).map(|i| i < jammed).collect();
    labels.shuffle(&mut seed::rng(seed));
    labels
}

/// Per-position generator for the stationary dataset.
///
/// Positions and labels are drawn up front; [`StationaryGenerator::record`]
/// is then a pure function of the index.
#[derive(Debug, Clone)]
pub struct StationaryGenerator {
    config: StationaryConfig,
    budget: UplinkBudget,
    target: Vec3,
    positions: Vec<Vec3>,
    labels: Vec<bool>,
}

impl StationaryGenerator {
    pub fn new(config: StationaryConfig) -> Result<Self> {
        config.validate()?;
        let target = orbital::geo_slot_state(config.target_longitude, 0.0).position;
        let positions = orbital::sample_voi(
            target,
            config.voi_radius,
            config.n_positions,
            mix_seed(config.seed, stage::VOI_POSITIONS),
        );
        let labels = shuffled_labels(
            config.n_positions,
            config.jammed_count,
            mix_seed(config.seed, stage::LABELS),
        );
        Ok(StationaryGenerator {
            budget: UplinkBudget::beneath_geo_slot(&config.link, config.target_longitude),
            config,
            target,
            positions,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn budget(&self) -> &UplinkBudget {
        &self.budget
    }

    pub fn record(&self, i: usize) -> Result<StationaryRecord> {
        let c = &self.config;
        let attacker = self.positions[i];
        let jammed = self.labels[i];
        let features = burst_features(
            &c.link,
            &self.budget,
            Jammer {
                power: c.jam_power,
                gain: c.attacker_gain,
            },
            orbital::range_km(attacker, self.target),
            jammed,
            c.samples_per_position,
            mix_seed(mix_seed(c.seed, stage::BURSTS), i as u64),
        )?;
        Ok(StationaryRecord {
            position_id: i,
            attacker,
            features,
            is_jammed: jammed,
        })
    }
}

/// Generates the whole stationary dataset sequentially.
pub fn gen_stationary(config: &StationaryConfig) -> Result<Vec<StationaryRecord>> {
    let generator = StationaryGenerator::new(*config)?;
    (0..generator.len()).map(|i| generator.record(i)).collect()
}

/// Jamming labels for `n_epochs` consecutive epochs: epoch `k` is jammed iff
/// `k mod period < round(duty·period)`.
pub fn schedule_periodic_jamming(n_epochs: usize, period: usize, duty: f64) -> Result<Vec<bool>> {
    if period == 0 {
        return Err(Error::config("jamming period must be at least one epoch"));
    }
    if !(0.0..=1.0).contains(&duty) {
        return Err(Error::config("jamming duty must lie in [0, 1]"));
    }
    let on = (duty * period as f64).round() as usize;
    Ok((0..n_epochs).map(|k| k % period < on).collect())
}

/// Time-variant dataset parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeVariantConfig {
    pub link: RfLinkConfig,
    pub jam_power: f64,
    pub attacker_gain: f64,
    pub n_trajectories: usize,
    /// s
    pub duration: f64,
    /// s
    pub epoch_step: f64,
    /// epochs
    pub jam_period: usize,
    pub jam_duty: f64,
    /// Access range limit, km. Infinite means geometric line of sight only.
    pub voi_radius: f64,
    pub samples_per_epoch: usize,
    /// rad
    pub target_longitude: f64,
    pub bands: AttackerBands,
    pub seed: u64,
}

impl Default for TimeVariantConfig {
    fn default() -> Self {
        TimeVariantConfig {
            link: RfLinkConfig::default(),
            jam_power: 100.0,
            attacker_gain: 30.0,
            n_trajectories: 100,
            duration: 86_400.0,
            epoch_step: 60.0,
            jam_period: 20,
            jam_duty: 0.5,
            voi_radius: f64::INFINITY,
            samples_per_epoch: 200,
            target_longitude: 0.0,
            bands: AttackerBands::default(),
            seed: 42,
        }
    }
}

impl TimeVariantConfig {
    pub fn validate(&self) -> Result<()> {
        self.link.validate()?;
        check_jammer(self.jam_power, self.attacker_gain)?;
        if !(self.jam_duty > 0.0 && self.jam_duty < 1.0) {
            return Err(Error::config("jam_duty must lie strictly between 0 and 1"));
        }
        if self.jam_period == 0 {
            return Err(Error::config("jam_period must be at least one epoch"));
        }
        if !(self.voi_radius >= 0.0) {
            return Err(Error::config("voi_radius must be non-negative"));
        }
        if self.samples_per_epoch < 2 {
            return Err(Error::config("samples_per_epoch must be at least 2"));
        }
        if !self.target_longitude.is_finite() {
            return Err(Error::config("target_longitude must be finite"));
        }
        let b = &self.bands;
        if !(b.semi_major_axis_half_width >= 0.0
            && orbital::geo_radius_km() - b.semi_major_axis_half_width > orbital::EARTH_RADIUS_KM)
        {
            return Err(Error::config(
                "semi-major-axis band reaches inside the Earth",
            ));
        }
        if !(0.0..1.0).contains(&b.max_eccentricity) || !b.max_inclination.is_finite() {
            return Err(Error::config(
                "invalid attacker eccentricity or inclination band",
            ));
        }
        self.grid().map(|_| ())
    }

    pub fn grid(&self) -> Result<EpochGrid> {
        EpochGrid::new(0.0, self.duration, self.epoch_step)
            .map_err(|_| Error::config("duration and epoch_step must be positive"))
    }

    /// Seed of trajectory `i`.
    pub fn trajectory_seed(&self, i: usize) -> u64 {
        mix_seed(mix_seed(self.seed, stage::TRAJECTORIES), i as u64)
    }
}

/// One row of a time-variant trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    pub trajectory_id: usize,
    /// s
    pub epoch: f64,
    /// km
    pub range_km: f64,
    pub features: SignalFeatures,
    /// Clear-link SNR, dB.
    pub snr_db: f64,
    pub is_jammed: bool,
}

/// All access epochs of one attacker orbit.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub id: usize,
    pub seed: u64,
    pub elements: KeplerianElements,
    pub records: Vec<EpochRecord>,
}

impl Trajectory {
    pub fn labels(&self) -> Vec<bool> {
        self.records.iter().map(|r| r.is_jammed).collect()
    }

    /// SJNR series, dB.
    pub fn sjnr_series(&self) -> Vec<f64> {
        self.records
            .iter()
            .map(|r| r.features.sjnr_at_target)
            .collect()
    }

    /// RSS series, dB(W).
    pub fn rss_db_series(&self) -> Vec<f64> {
        self.records
            .iter()
            .map(|r| signal::linear_to_db(r.features.rss))
            .collect()
    }
}

/// Generates trajectory `i` of the time-variant dataset.
pub fn gen_trajectory(config: &TimeVariantConfig, i: usize) -> Result<Trajectory> {
    let grid = config.grid()?;
    let traj_seed = config.trajectory_seed(i);
    let elements = config.bands.sample(mix_seed(traj_seed, 0));
    let burst_seed = mix_seed(traj_seed, 1);
    let budget = UplinkBudget::beneath_geo_slot(&config.link, config.target_longitude);

    let access =
        orbital::access_epochs(&elements, config.target_longitude, &grid, config.voi_radius)?;
    let labels = schedule_periodic_jamming(access.len(), config.jam_period, config.jam_duty)?;

    let records = access
        .iter()
        .zip(labels)
        .map(|(a, jammed)| {
            let features = burst_features(
                &config.link,
                &budget,
                Jammer {
                    power: config.jam_power,
                    gain: config.attacker_gain,
                },
                a.range_km,
                jammed,
                config.samples_per_epoch,
                mix_seed(burst_seed, a.index as u64),
            )?;
            Ok(EpochRecord {
                trajectory_id: i,
                epoch: a.time,
                range_km: a.range_km,
                features,
                snr_db: budget.snr_db(),
                is_jammed: jammed,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(Trajectory {
        id: i,
        seed: traj_seed,
        elements,
        records,
    })
}

/// Generates every trajectory sequentially.
pub fn gen_timevariant(config: &TimeVariantConfig) -> Result<Vec<Trajectory>> {
    config.validate()?;
    (0..config.n_trajectories)
        .map(|i| gen_trajectory(config, i))
        .collect()
}
