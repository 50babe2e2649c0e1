//! Link budgets and complex-baseband synthesis of the jammed uplink.
//!
//! Received samples follow
//!
//! ```text
//! r_k = s_k + n_k + f·j_k
//! ```
//!
//! where `s_k` and `j_k` are independent 4QAM bursts already scaled to their
//! received powers (transmit power × gains / FSPL), `n_k ~ CN(0, σ²)` with
//! `σ²/2` per quadrature, and `f ∈ {0, 1}` is the jamming indicator.

// float math in no_std builds; unused when std is linked for tests
use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};
#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::seed;

/// m/s
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// J/K
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// One complex baseband sample, amplitude in √W.
pub type ComplexSample = Complex64;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Power in W expressed in dBm.
pub fn watts_to_dbm(w: f64) -> f64 {
    linear_to_db(w) + 30.0
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

/// Radio parameters of the legitimate uplink.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RfLinkConfig {
    /// Hz
    pub frequency: f64,
    /// Hz
    pub bandwidth: f64,
    /// Ground-station transmit power, W.
    pub tx_power: f64,
    /// Ground-station antenna gain, dBi.
    pub tx_gain: f64,
    /// Target-satellite receive gain, dBi.
    pub rx_gain: f64,
    /// K
    pub noise_temperature: f64,
}

impl Default for RfLinkConfig {
    fn default() -> Self {
        RfLinkConfig {
            frequency: 14e9,
            bandwidth: 1e6,
            tx_power: 100.0,
            tx_gain: 40.0,
            rx_gain: 30.0,
            noise_temperature: 290.0,
        }
    }
}

impl RfLinkConfig {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("frequency", self.frequency),
            ("bandwidth", self.bandwidth),
            ("tx_power", self.tx_power),
            ("tx_gain", self.tx_gain),
            ("rx_gain", self.rx_gain),
            ("noise_temperature", self.noise_temperature),
        ];
        for (name, v) in fields {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(alloc::format!(
                    "{name} must be positive and finite"
                )));
            }
        }
        Ok(())
    }

    /// Thermal noise power at the target receiver, W.
    pub fn noise(&self) -> f64 {
        noise_power(self.noise_temperature, self.bandwidth)
    }

    /// Received power of the ground-station signal over `distance_km`, W.
    pub fn signal_rx(&self, distance_km: f64) -> f64 {
        received_power(
            self.tx_power,
            self.tx_gain,
            self.rx_gain,
            distance_km * 1e3,
            self.frequency,
        )
    }

    /// Received power of a jammer with its own power and antenna gain at
    /// `distance_km`, W.
    pub fn jam_rx(&self, jam_power: f64, jam_gain: f64, distance_km: f64) -> f64 {
        received_power(
            jam_power,
            jam_gain,
            self.rx_gain,
            distance_km * 1e3,
            self.frequency,
        )
    }
}

/// Free-space path loss `(4π·d·f/c)²` as a linear ratio. `distance` in m.
pub fn fspl_linear(distance: f64, frequency: f64) -> f64 {
    let x = 4.0 * PI * distance * frequency / SPEED_OF_LIGHT;
    x * x
}

/// Thermal noise power `k_B·T·B`, W.
pub fn noise_power(temperature: f64, bandwidth: f64) -> f64 {
    BOLTZMANN * temperature * bandwidth
}

/// Received power `P·g_t·g_r / FSPL`, W. Gains in dBi, distance in m.
pub fn received_power(
    tx_power: f64,
    tx_gain: f64,
    rx_gain: f64,
    distance: f64,
    frequency: f64,
) -> f64 {
    tx_power * db_to_linear(tx_gain) * db_to_linear(rx_gain) / fspl_linear(distance, frequency)
}

/// Signal-to-jamming-and-noise ratio, dB.
pub fn sjnr_db(signal_rx: f64, jam_rx: f64, noise: f64) -> f64 {
    linear_to_db(signal_rx / (noise + jam_rx))
}

/// Signal-to-noise ratio, dB.
pub fn snr_db(signal_rx: f64, noise: f64) -> f64 {
    linear_to_db(signal_rx / noise)
}

/// `count` 4QAM symbols `(±1 ± j)/√2 · √avg_power`, drawn uniformly.
pub fn qam4_burst(count: usize, avg_power: f64, seed: u64) -> Vec<ComplexSample> {
    let mut rng = seed::rng(seed);
    let amp = avg_power.sqrt() * FRAC_1_SQRT_2;
    (0..count)
        .map(|_| {
            let bits: u8 = rng.random_range(0..4);
            let re = if bits & 1 == 0 { amp } else { -amp };
            let im = if bits & 2 == 0 { amp } else { -amp };
            Complex64::new(re, im)
        })
        .collect()
}

/// Circular complex Gaussian noise with total variance `noise`.
pub fn complex_noise(count: usize, noise: f64, seed: u64) -> Vec<ComplexSample> {
    let mut rng = seed::rng(seed);
    let sigma = (noise / 2.0).sqrt();
    (0..count)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(sigma * re, sigma * im)
        })
        .collect()
}

/// Received samples at the target satellite.
///
/// The signal, jammer and noise streams use seeds `mix_seed(seed, 0..3)`, so
/// the signal and noise realizations do not depend on `jammed`.
pub fn synthesize_received(
    signal_rx: f64,
    jam_rx: f64,
    noise: f64,
    count: usize,
    jammed: bool,
    seed: u64,
) -> Result<Vec<ComplexSample>> {
    if count == 0 {
        return Err(Error::input("at least one sample is required"));
    }
    if !(signal_rx >= 0.0 && jam_rx >= 0.0 && noise >= 0.0) {
        return Err(Error::input("powers must be non-negative"));
    }
    let s = qam4_burst(count, signal_rx, seed::mix_seed(seed, 0));
    let n = complex_noise(count, noise, seed::mix_seed(seed, 2));
    let mut r: Vec<ComplexSample> = s.iter().zip(&n).map(|(s, n)| s + n).collect();
    if jammed {
        let j = qam4_burst(count, jam_rx, seed::mix_seed(seed, 1));
        for (r, j) in r.iter_mut().zip(&j) {
            *r += j;
        }
    }
    Ok(r)
}

/// Received signal strength `(1/N)·Σ|r_k|²`, W.
pub fn rss(samples: &[ComplexSample]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::input("RSS of an empty burst"));
    }
    Ok(samples.iter().map(|r| r.norm_sqr()).sum::<f64>() / samples.len() as f64)
}

/// Per-record feature vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalFeatures {
    /// Empirical mean power, W.
    pub rss: f64,
    /// Expected received power (signal + noise + jam when active), W.
    pub total_received_power: f64,
    /// Mean of |r_k|, √W.
    pub total_amplitude_mean: f64,
    /// Population standard deviation of |r_k|, √W.
    pub total_amplitude_std: f64,
    /// Population variance of arg(r_k) wrapped to (−π, π], rad².
    pub total_phase_variance: f64,
    /// km
    pub distance_to_target: f64,
    /// Analytic SJNR, dB.
    pub sjnr_at_target: f64,
}

/// Names of the classifier inputs, in model column order.
pub const MODEL_FEATURES: [&str; 6] = [
    "rss",
    "distance_to_target",
    "total_received_power",
    "total_amplitude_mean",
    "total_amplitude_std",
    "total_phase_variance",
];

impl SignalFeatures {
    /// The six classifier inputs in [`MODEL_FEATURES`] order.
    pub fn model_vector(&self) -> [f64; 6] {
        [
            self.rss,
            self.distance_to_target,
            self.total_received_power,
            self.total_amplitude_mean,
            self.total_amplitude_std,
            self.total_phase_variance,
        ]
    }
}

fn wrapped_phase(z: &ComplexSample) -> f64 {
    let p = z.im.atan2(z.re);
    if p <= -PI {
        p + 2.0 * PI
    } else {
        p
    }
}

fn mean_and_population_var(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = xs.clone().count() as f64;
    let mean = xs.clone().sum::<f64>() / n;
    let var = xs.map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var)
}

/// Computes the feature vector of one burst.
pub fn extract_features(
    samples: &[ComplexSample],
    distance_to_target: f64,
    analytic_sjnr: f64,
    analytic_total_power: f64,
) -> Result<SignalFeatures> {
    if samples.len() < 2 {
        return Err(Error::input(
            "feature extraction needs at least two samples",
        ));
    }
    let (amp_mean, amp_var) = mean_and_population_var(samples.iter().map(|z| z.norm()));
    let (_, phase_var) = mean_and_population_var(samples.iter().map(wrapped_phase));
    Ok(SignalFeatures {
        rss: rss(samples)?,
        total_received_power: analytic_total_power,
        total_amplitude_mean: amp_mean,
        total_amplitude_std: amp_var.sqrt(),
        total_phase_variance: phase_var,
        distance_to_target,
        sjnr_at_target: analytic_sjnr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn fspl_examples() {
        // 20·log10(4π·d·f/c) evaluated by hand: 206.4446 dB and 175.3703 dB.
        assert!(close(
            linear_to_db(fspl_linear(35_786e3, 14e9)),
            206.45,
            0.01
        ));
        assert!(close(
            linear_to_db(fspl_linear(1_000e3, 14e9)),
            175.37,
            0.01
        ));
        let step =
            linear_to_db(fspl_linear(2_000.0, 1e9)) - linear_to_db(fspl_linear(1_000.0, 1e9));
        assert!(close(step, 20.0 * 2f64.log10(), 1e-12));
        assert!(close(step, 6.0206, 1e-4));
        assert_eq!(fspl_linear(2.0, 3.0) / fspl_linear(1.0, 3.0), 4.0);
    }

    #[test]
    fn noise_examples() {
        let n = noise_power(290.0, 1e6);
        assert!((n - 4.004e-15).abs() / 4.004e-15 < 1e-3);
        assert!(close(watts_to_dbm(n), -113.97, 0.01));
        assert_eq!(noise_power(290.0, 2e6), 2.0 * n);
        assert_eq!(noise_power(580.0, 1e6), 2.0 * n);
    }

    #[test]
    fn received_power_examples() {
        let s = received_power(100.0, 40.0, 30.0, 35_786e3, 14e9);
        assert!(close(watts_to_dbm(s), -86.45, 0.01));
        let j = received_power(100.0, 30.0, 30.0, 1_000e3, 14e9);
        assert!(close(watts_to_dbm(j), -65.37, 0.01));
        let plain = received_power(3.0, 0.0, 0.0, 100.0, 1e9);
        assert!(close(plain, 3.0 / fspl_linear(100.0, 1e9), 1e-18));
    }

    #[test]
    fn sjnr_examples() {
        let s = dbm_to_watts(-86.45);
        let j = dbm_to_watts(-65.37);
        let n = dbm_to_watts(-113.97);
        assert!(close(sjnr_db(s, 0.0, n), 27.52, 1e-9));
        assert_eq!(sjnr_db(s, 0.0, n), snr_db(s, n));
        assert!(close(sjnr_db(s, j, n), -21.08, 0.01));
        assert!(close(
            sjnr_db(s, n, n),
            snr_db(s, n) - 10.0 * 2f64.log10(),
            1e-12
        ));
    }

    #[test]
    fn qam_burst_properties() {
        let b = qam4_burst(100, 1.0, 5);
        assert!(b.iter().all(|z| close(z.norm_sqr(), 1.0, 1e-15)));
        assert!(qam4_burst(0, 1.0, 5).is_empty());
        assert_eq!(b, qam4_burst(100, 1.0, 5));
        let b = qam4_burst(64, 2.5e-12, 9);
        assert!(b.iter().all(|z| close(z.norm_sqr(), 2.5e-12, 1e-24)));
        // all four symbols appear
        let mut seen = [false; 4];
        for z in qam4_burst(200, 1.0, 1) {
            seen[(z.re > 0.0) as usize * 2 + (z.im > 0.0) as usize] = true;
        }
        assert!(seen.iter().all(|s| *s));
    }

    #[test]
    fn noiseless_rss_is_signal_power() {
        let r = synthesize_received(2.0, 7.0, 0.0, 50, false, 3).unwrap();
        assert!(close(rss(&r).unwrap(), 2.0, 1e-12));
    }

    #[test]
    fn jammed_burst_power_adds() {
        let link = RfLinkConfig::default();
        let s = link.signal_rx(35_786.03);
        let j = link.jam_rx(100.0, 30.0, 1_000.0);
        let n = link.noise();
        let total = s + j + n;
        let r = synthesize_received(s, j, n, 200, true, 17).unwrap();
        // |s + j|² of two unit-modulus QAM streams has std ≈ √(2·s·j) per
        // sample; the mean of 200 samples is within 3σ/√200.
        let sigma = (2.0 * s * j + 2.0 * (s + j) * n + n * n).sqrt() / (200f64).sqrt();
        assert!((rss(&r).unwrap() - total).abs() < 3.0 * sigma);
    }

    #[test]
    fn synthesis_deterministic() {
        let a = synthesize_received(1.0, 2.0, 0.1, 32, true, 8).unwrap();
        let b = synthesize_received(1.0, 2.0, 0.1, 32, true, 8).unwrap();
        assert_eq!(a, b);
        assert!(synthesize_received(1.0, 2.0, 0.1, 0, true, 8).is_err());
    }

    #[test]
    fn rss_examples() {
        let unit = [Complex64::new(0.6, 0.8), Complex64::new(-1.0, 0.0)];
        assert!(close(rss(&unit).unwrap(), 1.0, 1e-15));
        let two = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0)];
        assert_eq!(rss(&two).unwrap(), 2.5);
        assert!(rss(&[]).is_err());
    }

    #[test]
    fn constant_burst_features() {
        let burst = vec![Complex64::new(0.3, 0.4); 10];
        let f = extract_features(&burst, 12.0, 3.0, 0.25).unwrap();
        assert_eq!(f.total_amplitude_std, 0.0);
        assert_eq!(f.total_phase_variance, 0.0);
        assert!(close(f.total_amplitude_mean, 0.5, 1e-15));
        assert_eq!(f.distance_to_target, 12.0);
        assert_eq!(f.sjnr_at_target, 3.0);
        assert_eq!(f.total_received_power, 0.25);
        assert!(extract_features(&burst[..1], 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn phase_wrap_convention() {
        assert_eq!(wrapped_phase(&Complex64::new(-1.0, -0.0)), PI);
        assert_eq!(wrapped_phase(&Complex64::new(-1.0, 0.0)), PI);
    }

    #[test]
    fn noise_only_phase_is_uniform() {
        let n = complex_noise(20_000, 1.0, 4);
        let f = extract_features(&n, 0.0, 0.0, 1.0).unwrap();
        let expected = PI * PI / 3.0;
        assert!((f.total_phase_variance - expected).abs() / expected < 0.1);
        assert!(f.total_phase_variance <= PI * PI);
    }

    #[test]
    fn link_config_validation() {
        RfLinkConfig::default().validate().unwrap();
        let bad = RfLinkConfig {
            bandwidth: 0.0,
            ..RfLinkConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
