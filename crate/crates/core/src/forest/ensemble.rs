use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::derive_seed;

use super::dataset::Dataset;
use super::params::ForestParams;
use super::tree::{grow, DecisionTree, TrainView};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomForestModel {
    pub params: ForestParams,
    pub feature_names: Vec<String>,
    pub class_names: Vec<String>,
    pub per_tree_seeds: Vec<u64>,
    pub trees: Vec<DecisionTree>,
}

/// Train `n_estimators` trees in parallel. Tree `i` uses seed
/// `derive_seed(params.seed, i)`, so the model is independent of thread count.
pub fn fit_forest(data: &Dataset, params: &ForestParams) -> Result<RandomForestModel> {
    params.validate()?;
    if data.n_samples() == 0 {
        return Err(Error::Validation("cannot fit a forest on zero samples".into()));
    }
    let cols = data.columns();
    let view = TrainView::new(data, &cols);
    let per_tree_seeds: Vec<u64> = (0..params.n_estimators as u64)
        .map(|i| derive_seed(params.seed, i))
        .collect();
    let trees = per_tree_seeds
        .par_iter()
        .map(|&seed| grow(&view, params, seed))
        .collect();
    Ok(RandomForestModel {
        params: params.clone(),
        feature_names: data.feature_names.clone(),
        class_names: data.class_names.clone(),
        per_tree_seeds,
        trees,
    })
}

impl RandomForestModel {
    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    /// Mean of the trees' leaf class frequencies.
    pub fn predict_proba(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.n_features() {
            return Err(Error::Validation(format!(
                "row has {} features, model expects {}",
                row.len(),
                self.n_features()
            )));
        }
        let mut out = vec![0.0; self.n_classes()];
        for tree in &self.trees {
            tree.accumulate_proba(row, &mut out);
        }
        let n = self.trees.len() as f64;
        out.iter_mut().for_each(|p| *p /= n);
        Ok(out)
    }

    /// Most probable class; ties go to the lowest class id.
    pub fn predict(&self, row: &[f64]) -> Result<usize> {
        Ok(argmax(&self.predict_proba(row)?))
    }

    pub fn predict_proba_rows(&self, data: &Dataset) -> Result<Vec<Vec<f64>>> {
        (0..data.n_samples())
            .into_par_iter()
            .map(|i| self.predict_proba(data.row(i)))
            .collect()
    }
}

pub(crate) fn argmax(p: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in p.iter().enumerate() {
        if *v > p[best] {
            best = i;
        }
    }
    best
}
