//! File formats, experiment drivers and the command-line front end for
//! `geojam-core`.

pub mod cli;
pub mod config;
pub mod csv_io;
pub mod error;
pub mod model_io;
pub mod pipeline;
pub mod report;

pub use error::{Error, Result};
