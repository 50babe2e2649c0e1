//! Two-body orbital mechanics around a spherical Earth.
//!
//! Frame conventions:
//!
//! * Positions and velocities are Earth-centered inertial (ECI), in km and
//!   km/s.
//! * The Earth-fixed frame coincides with ECI at `t = 0` and rotates about
//!   +z at the sidereal rate. A point at longitude `λ` on the equator is
//!   therefore at ECI angle `λ + ω⊕·t`.
//! * Longitude 0 lies on the +x axis at `t = 0`.
//!
//! No perturbations (J2, drag, third bodies) are modeled.

// float math in no_std builds; unused when std is linked for tests
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};
use core::ops::{Add, Mul, Neg, Sub};
#[allow(unused_imports)]
use num_traits::Float;

use rand::Rng;

use crate::error::{Error, Result};
use crate::seed;

/// Earth gravitational parameter, km³/s².
pub const MU_EARTH: f64 = 398_600.441_8;
/// Spherical Earth radius, km.
pub const EARTH_RADIUS_KM: f64 = 6_378.137;
/// Sidereal day, s.
pub const SIDEREAL_DAY_S: f64 = 86_164.090_5;
/// Earth rotation rate, rad/s.
pub const EARTH_RATE: f64 = TAU / SIDEREAL_DAY_S;

const KEPLER_TOL: f64 = 1e-12;
const KEPLER_MAX_ITER: usize = 50;

/// Radius of the geostationary orbit from Kepler's third law (≈ 42164.17 km).
pub fn geo_radius_km() -> f64 {
    let t_over_2pi = SIDEREAL_DAY_S / TAU;
    (MU_EARTH * t_over_2pi * t_over_2pi).cbrt()
}

/// A Cartesian 3-vector.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: Vec3) -> Vec3 {
        Vec3::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, k: f64) -> Vec3 {
        Vec3::new(self.x * k, self.y * k, self.z * k)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// Classical orbital elements at `epoch`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeplerianElements {
    /// km
    pub semi_major_axis: f64,
    pub eccentricity: f64,
    /// rad
    pub inclination: f64,
    /// Right ascension of the ascending node, rad.
    pub raan: f64,
    /// Argument of perigee, rad.
    pub arg_perigee: f64,
    /// Mean anomaly at `epoch`, rad.
    pub mean_anomaly_epoch: f64,
    /// s, on the simulation clock.
    pub epoch: f64,
}

impl KeplerianElements {
    /// Validated constructor.
    pub fn new(
        semi_major_axis: f64,
        eccentricity: f64,
        inclination: f64,
        raan: f64,
        arg_perigee: f64,
        mean_anomaly_epoch: f64,
        epoch: f64,
    ) -> Result<Self> {
        let el = KeplerianElements {
            semi_major_axis,
            eccentricity,
            inclination,
            raan,
            arg_perigee,
            mean_anomaly_epoch,
            epoch,
        };
        el.validate()?;
        Ok(el)
    }

    /// Circular equatorial orbit at the GEO radius whose ECI angle at `t = 0`
    /// equals `longitude`.
    pub fn geostationary(longitude: f64) -> Self {
        KeplerianElements {
            semi_major_axis: geo_radius_km(),
            eccentricity: 0.0,
            inclination: 0.0,
            raan: 0.0,
            arg_perigee: 0.0,
            mean_anomaly_epoch: longitude,
            epoch: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.semi_major_axis > EARTH_RADIUS_KM) {
            return Err(Error::input("semi-major axis must exceed the Earth radius"));
        }
        if !(0.0..1.0).contains(&self.eccentricity) {
            return Err(Error::input("eccentricity must lie in [0, 1)"));
        }
        let angles = [
            self.inclination,
            self.raan,
            self.arg_perigee,
            self.mean_anomaly_epoch,
            self.epoch,
        ];
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(Error::input("orbital angles and epoch must be finite"));
        }
        Ok(())
    }

    /// Mean motion, rad/s.
    pub fn mean_motion(&self) -> f64 {
        (MU_EARTH / (self.semi_major_axis * self.semi_major_axis * self.semi_major_axis)).sqrt()
    }

    /// Orbital period, s.
    pub fn period(&self) -> f64 {
        TAU / self.mean_motion()
    }
}

/// Position and velocity in ECI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EciState {
    /// km
    pub position: Vec3,
    /// km/s
    pub velocity: Vec3,
}

impl EciState {
    /// Specific orbital energy v²/2 − μ/r, km²/s².
    pub fn specific_energy(&self) -> f64 {
        let v = self.velocity.norm();
        0.5 * v * v - MU_EARTH / self.position.norm()
    }

    /// Specific angular momentum r × v, km²/s.
    pub fn angular_momentum(&self) -> Vec3 {
        self.position.cross(self.velocity)
    }
}

/// A ground terminal on the spherical Earth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundStation {
    /// rad, geocentric
    pub latitude: f64,
    /// rad, east positive
    pub longitude: f64,
    /// km above the sphere
    pub altitude: f64,
}

impl GroundStation {
    pub fn new(latitude: f64, longitude: f64, altitude: f64) -> Result<Self> {
        if !(latitude.abs() <= PI / 2.0) || !longitude.is_finite() || !altitude.is_finite() {
            return Err(Error::input(
                "ground station latitude must lie in [-pi/2, pi/2]",
            ));
        }
        Ok(GroundStation {
            latitude,
            longitude,
            altitude,
        })
    }

    /// The station on the equator directly beneath a GEO slot.
    pub fn beneath(longitude: f64) -> Self {
        GroundStation {
            latitude: 0.0,
            longitude,
            altitude: 0.0,
        }
    }
}

/// A maximal span `[start, end)` of sampled epochs with access.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccessInterval {
    pub start: f64,
    pub end: f64,
}

impl AccessInterval {
    pub fn duration(&self) -> f64 {
        self.end - self.start
    }
}

/// Solves Kepler's equation `E − e·sin E = M` by Newton iteration.
///
/// The returned anomaly is on the same revolution as `mean_anomaly`.
pub fn solve_kepler(mean_anomaly: f64, eccentricity: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&eccentricity) {
        return Err(Error::input("eccentricity must lie in [0, 1)"));
    }
    if !mean_anomaly.is_finite() {
        return Err(Error::input("mean anomaly must be finite"));
    }
    let revs = (mean_anomaly / TAU).round();
    let m = mean_anomaly - revs * TAU;

    let mut e_anom = if eccentricity > 0.8 {
        PI.copysign(m)
    } else {
        m
    };
    for _ in 0..KEPLER_MAX_ITER {
        let residual = e_anom - eccentricity * e_anom.sin() - m;
        if residual.abs() < KEPLER_TOL {
            return Ok(e_anom + revs * TAU);
        }
        e_anom -= residual / (1.0 - eccentricity * e_anom.cos());
    }
    let residual = e_anom - eccentricity * e_anom.sin() - m;
    if residual.abs() < KEPLER_TOL {
        return Ok(e_anom + revs * TAU);
    }
    Err(Error::NoConvergence {
        what: "Kepler equation",
        iterations: KEPLER_MAX_ITER,
    })
}

/// Two-body propagation of `elements` to simulation time `t`.
pub fn propagate(elements: &KeplerianElements, t: f64) -> Result<EciState> {
    elements.validate()?;
    let a = elements.semi_major_axis;
    let e = elements.eccentricity;
    let n = elements.mean_motion();
    let m = elements.mean_anomaly_epoch + n * (t - elements.epoch);
    let ea = solve_kepler(m, e)?;
    let (sin_e, cos_e) = ea.sin_cos();
    let root = (1.0 - e * e).sqrt();

    // Perifocal frame: x towards periapsis, z along angular momentum.
    let p = Vec3::new(a * (cos_e - e), a * root * sin_e, 0.0);
    let denom = 1.0 - e * cos_e;
    let v = Vec3::new(-a * n * sin_e / denom, a * n * root * cos_e / denom, 0.0);

    let rot = PerifocalRotation::new(elements.raan, elements.inclination, elements.arg_perigee);
    Ok(EciState {
        position: rot.apply(p),
        velocity: rot.apply(v),
    })
}

/// R3(−Ω)·R1(−i)·R3(−ω), perifocal to ECI.
struct PerifocalRotation {
    m: [[f64; 3]; 3],
}

impl PerifocalRotation {
    fn new(raan: f64, inc: f64, argp: f64) -> Self {
        let (so, co) = raan.sin_cos();
        let (si, ci) = inc.sin_cos();
        let (sw, cw) = argp.sin_cos();
        PerifocalRotation {
            m: [
                [co * cw - so * sw * ci, -co * sw - so * cw * ci, so * si],
                [so * cw + co * sw * ci, -so * sw + co * cw * ci, -co * si],
                [sw * si, cw * si, ci],
            ],
        }
    }

    fn apply(&self, v: Vec3) -> Vec3 {
        let m = &self.m;
        Vec3::new(
            m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
        )
    }
}

/// State of a satellite parked at a GEO slot over `longitude`.
pub fn geo_slot_state(longitude: f64, t: f64) -> EciState {
    let r = geo_radius_km();
    let theta = longitude + EARTH_RATE * t;
    let (s, c) = theta.sin_cos();
    EciState {
        position: Vec3::new(r * c, r * s, 0.0),
        velocity: Vec3::new(-r * EARTH_RATE * s, r * EARTH_RATE * c, 0.0),
    }
}

/// ECI position of a ground station at time `t`.
pub fn ground_station_eci(gs: &GroundStation, t: f64) -> Vec3 {
    let r = EARTH_RADIUS_KM + gs.altitude;
    let theta = gs.longitude + EARTH_RATE * t;
    let (slat, clat) = gs.latitude.sin_cos();
    let (s, c) = theta.sin_cos();
    Vec3::new(r * clat * c, r * clat * s, r * slat)
}

/// Euclidean distance between two points, km.
pub fn range_km(p1: Vec3, p2: Vec3) -> f64 {
    (p1 - p2).norm()
}

/// True iff the segment `p1`–`p2` stays strictly outside the Earth sphere.
pub fn line_of_sight(p1: Vec3, p2: Vec3) -> bool {
    let d = p2 - p1;
    let len2 = d.dot(d);
    let closest = if len2 == 0.0 {
        p1
    } else {
        let s = (-p1.dot(d) / len2).clamp(0.0, 1.0);
        p1 + d * s
    };
    closest.norm() > EARTH_RADIUS_KM
}

/// Draws `count` points uniformly from the ball of `radius` km around
/// `target`.
///
/// The radius is drawn by inverse CDF (`r = R·u^{1/3}`) and the direction
/// uniformly on the sphere, so every draw consumes exactly three uniforms.
pub fn sample_voi(target: Vec3, radius: f64, count: usize, seed: u64) -> Vec<Vec3> {
    let mut rng = seed::rng(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        // u in (0, 1]
        let u = 1.0 - rng.random::<f64>();
        let z = 2.0 * rng.random::<f64>() - 1.0;
        let phi = TAU * rng.random::<f64>();
        let rho = (1.0 - z * z).max(0.0).sqrt();
        let (s, c) = phi.sin_cos();
        let dir = Vec3::new(rho * c, rho * s, z);
        let mut r = radius * u.cbrt();
        let mut p = target + dir * r;
        // Rounding can push a boundary draw a few ulps outside the ball.
        while range_km(p, target) > radius {
            r *= 1.0 - 4.0 * f64::EPSILON;
            p = target + dir * r;
        }
        out.push(p);
    }
    out
}

/// Distribution bands of randomized attacker orbits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttackerBands {
    /// Half-width of the semi-major-axis band around the GEO radius, km.
    pub semi_major_axis_half_width: f64,
    pub max_eccentricity: f64,
    /// rad
    pub max_inclination: f64,
}

impl Default for AttackerBands {
    fn default() -> Self {
        AttackerBands {
            semi_major_axis_half_width: 3_000.0,
            max_eccentricity: 0.01,
            max_inclination: 5.0_f64.to_radians(),
        }
    }
}

impl AttackerBands {
    /// Draws one attacker orbit. Angles (RAAN, argument of perigee, mean
    /// anomaly) are uniform on [0, 2π).
    pub fn sample(&self, seed: u64) -> KeplerianElements {
        let mut rng = seed::rng(seed);
        let half = self.semi_major_axis_half_width;
        let a = geo_radius_km() + half * (2.0 * rng.random::<f64>() - 1.0);
        let e = self.max_eccentricity * rng.random::<f64>();
        let i = self.max_inclination * rng.random::<f64>();
        let raan = TAU * rng.random::<f64>();
        let argp = TAU * rng.random::<f64>();
        let m0 = TAU * rng.random::<f64>();
        KeplerianElements {
            semi_major_axis: a,
            eccentricity: e,
            inclination: i,
            raan,
            arg_perigee: argp,
            mean_anomaly_epoch: m0,
            epoch: 0.0,
        }
    }
}

/// Attacker orbit drawn from the default [`AttackerBands`].
pub fn random_attacker_elements(seed: u64) -> KeplerianElements {
    AttackerBands::default().sample(seed)
}

/// Sampling grid of an access computation: epochs `t0 + k·step < t1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochGrid {
    pub t0: f64,
    pub t1: f64,
    pub step: f64,
}

impl EpochGrid {
    pub fn new(t0: f64, t1: f64, step: f64) -> Result<Self> {
        if !(t0 < t1) || !(step > 0.0) || !t1.is_finite() {
            return Err(Error::input("epoch grid needs t0 < t1 and step > 0"));
        }
        Ok(EpochGrid { t0, t1, step })
    }

    pub fn len(&self) -> usize {
        let mut n = ((self.t1 - self.t0) / self.step).ceil() as usize;
        while n > 0 && self.epoch(n - 1) >= self.t1 {
            n -= 1;
        }
        while self.epoch(n) < self.t1 {
            n += 1;
        }
        n
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn epoch(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.step
    }
}

/// One grid epoch at which the attacker has access to the target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccessEpoch {
    pub index: usize,
    pub time: f64,
    pub range_km: f64,
}

/// Grid epochs at which the attacker sees the target (geometric line of
/// sight) within `r_voi` km.
pub fn access_epochs(
    attacker: &KeplerianElements,
    target_longitude: f64,
    grid: &EpochGrid,
    r_voi: f64,
) -> Result<Vec<AccessEpoch>> {
    let mut out = Vec::new();
    for k in 0..grid.len() {
        let t = grid.epoch(k);
        let att = propagate(attacker, t)?.position;
        let tgt = geo_slot_state(target_longitude, t).position;
        let range = range_km(att, tgt);
        if range <= r_voi && line_of_sight(att, tgt) {
            out.push(AccessEpoch {
                index: k,
                time: t,
                range_km: range,
            });
        }
    }
    Ok(out)
}

/// Groups consecutive access epochs into half-open intervals
/// `[first, last + step)`, clipped to the grid end.
pub fn intervals_from_epochs(epochs: &[AccessEpoch], grid: &EpochGrid) -> Vec<AccessInterval> {
    let mut out = Vec::new();
    let mut iter = epochs.iter().peekable();
    while let Some(first) = iter.next() {
        let mut last = first;
        while let Some(next) = iter.peek() {
            if next.index != last.index + 1 {
                break;
            }
            last = iter.next().unwrap();
        }
        out.push(AccessInterval {
            start: first.time,
            end: (grid.epoch(last.index + 1)).min(grid.t1),
        });
    }
    out
}

/// Access intervals between an attacker and the GEO target over
/// `[t0, t1)` sampled every `step` seconds.
pub fn access_intervals(
    attacker: &KeplerianElements,
    target_longitude: f64,
    t0: f64,
    t1: f64,
    step: f64,
    r_voi: f64,
) -> Result<Vec<AccessInterval>> {
    let grid = EpochGrid::new(t0, t1, step)?;
    let epochs = access_epochs(attacker, target_longitude, &grid, r_voi)?;
    Ok(intervals_from_epochs(&epochs, &grid))
}
