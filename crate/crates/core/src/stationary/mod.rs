//! Stationary-scenario classifier: standardization, optional PCA, random
//! forest.

mod forest;
mod pca;
mod split;

pub use forest::{gini, Forest, ForestParams, Node, Tree};
pub use pca::{jacobi_eigen, pca_fit, pca_transform, PcaModel, Standardizer};
pub use split::{train_test_split, SplitSpec};

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Feature preprocessing applied before the forest.
#[derive(Debug, Clone, PartialEq)]
pub enum FeatureTransform {
    /// z-scores only.
    Standardize(Standardizer),
    /// z-scores projected on the leading principal components.
    Pca(PcaModel),
}

impl FeatureTransform {
    pub fn n_inputs(&self) -> usize {
        match self {
            FeatureTransform::Standardize(s) => s.means.len(),
            FeatureTransform::Pca(p) => p.scaler.means.len(),
        }
    }

    pub fn n_outputs(&self) -> usize {
        match self {
            FeatureTransform::Standardize(s) => s.means.len(),
            FeatureTransform::Pca(p) => p.n_components,
        }
    }

    pub fn apply(&self, row: &[f64]) -> Result<Vec<f64>> {
        match self {
            FeatureTransform::Standardize(s) => s.transform_row(row),
            FeatureTransform::Pca(p) => p.transform_row(row),
        }
    }
}

/// A fitted transform plus forest.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryModel {
    pub transform: FeatureTransform,
    pub forest: Forest,
}

impl StationaryModel {
    /// Fits the transform on `x` (training rows only), then the forest on the
    /// transformed rows. `n_components = None` skips PCA.
    pub fn fit(
        x: &[Vec<f64>],
        y: &[bool],
        n_components: Option<usize>,
        params: &ForestParams,
    ) -> Result<Self> {
        let transform = match n_components {
            Some(k) => FeatureTransform::Pca(pca_fit(x, k)?),
            None => FeatureTransform::Standardize(Standardizer::fit(x)?),
        };
        let z = x
            .iter()
            .map(|r| transform.apply(r))
            .collect::<Result<Vec<_>>>()?;
        let forest = Forest::fit(&z, y, params)?;
        Ok(StationaryModel { transform, forest })
    }

    /// Fraction of trees voting jammed.
    pub fn score(&self, row: &[f64]) -> Result<f64> {
        let z = self.transform.apply(row)?;
        self.forest.score(&z)
    }

    pub fn predict(&self, row: &[f64]) -> Result<bool> {
        let z = self.transform.apply(row)?;
        self.forest.predict(&z)
    }

    pub fn scores(&self, rows: &[Vec<f64>]) -> Result<Vec<f64>> {
        rows.iter().map(|r| self.score(r)).collect()
    }

    pub fn check_inputs(&self, n_features: usize) -> Result<()> {
        if self.transform.n_inputs() != n_features {
            return Err(Error::input(alloc::format!(
                "model expects {} features, data has {}",
                self.transform.n_inputs(),
                n_features
            )));
        }
        Ok(())
    }
}
