//! Simulation and detection primitives for on-orbit uplink jamming of a
//! geostationary satellite.
//!
//! The crate is `no_std` and only needs `alloc`. Everything here is a pure
//! function of its inputs: randomness always comes from explicit seeds that
//! are expanded with [`seed::mix_seed`], so results are reproducible across
//! threads and platforms.
//!
//! * [`orbital`]: two-body propagation, GEO geometry, volume-of-interest
//!   sampling, line of sight and access intervals.
//! * [`signal`]: link budgets, 4QAM bursts, received-sample synthesis and
//!   the per-record feature vector.
//! * [`scenario`]: the stationary and time-variant labeled datasets.
//! * [`stationary`]: standardization, PCA and the random forest classifier.
//! * [`adaptive`]: moving-window adaptive thresholds with rate-of-change
//!   triggers.
//! * [`eval`]: confusion matrices, per-class metrics, ROC/AUC and
//!   cross-trajectory aggregation.
#![no_std]
// `!(x >= 0.0)` style checks are there to reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// index loops read better for the small dense matrices in pca
#![allow(clippy::needless_range_loop)]

extern crate alloc;

pub mod adaptive;
pub mod error;
pub mod eval;
pub mod orbital;
pub mod scenario;
pub mod seed;
pub mod signal;
pub mod stationary;

pub use error::{Error, Result};
