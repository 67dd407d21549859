use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::rng_for;

use super::cv::cross_validate;
use super::dataset::Dataset;
use super::params::{ForestParams, MaxFeatures};

/// Candidate values for each forest hyperparameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ParamSpace {
    pub n_estimators: Vec<usize>,
    pub max_depth: Vec<usize>,
    pub min_samples_split: Vec<usize>,
    pub min_samples_leaf: Vec<usize>,
    pub max_features: Vec<MaxFeatures>,
    pub bootstrap: Vec<bool>,
}

impl Default for ParamSpace {
    fn default() -> Self {
        Self {
            n_estimators: vec![10, 20, 50, 100, 150, 200, 300, 400, 500, 1000],
            max_depth: std::iter::once(5).chain((1..=10).map(|i| i * 10)).collect(),
            min_samples_split: vec![2, 3, 4, 5, 6, 10],
            min_samples_leaf: (1..=6).collect(),
            max_features: vec![MaxFeatures::Sqrt, MaxFeatures::Log2],
            bootstrap: vec![false],
        }
    }
}

impl ParamSpace {
    pub fn size(&self) -> usize {
        self.n_estimators.len()
            * self.max_depth.len()
            * self.min_samples_split.len()
            * self.min_samples_leaf.len()
            * self.max_features.len()
            * self.bootstrap.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.size() == 0 {
            return Err(Error::Config("search space has an empty dimension".into()));
        }
        Ok(())
    }

    /// The `i`-th grid point in mixed-radix order; `base` supplies the seed.
    pub fn combination(&self, mut i: usize, base: &ForestParams) -> ForestParams {
        let mut pick = |len: usize| {
            let r = i % len;
            i /= len;
            r
        };
        let n_estimators = self.n_estimators[pick(self.n_estimators.len())];
        let max_depth = self.max_depth[pick(self.max_depth.len())];
        let min_samples_split = self.min_samples_split[pick(self.min_samples_split.len())];
        let min_samples_leaf = self.min_samples_leaf[pick(self.min_samples_leaf.len())];
        let max_features = self.max_features[pick(self.max_features.len())];
        let bootstrap = self.bootstrap[pick(self.bootstrap.len())];
        ForestParams {
            n_estimators,
            max_depth,
            min_samples_split,
            min_samples_leaf,
            max_features,
            bootstrap,
            seed: base.seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchRow {
    pub params: ForestParams,
    pub mean_accuracy: f64,
    pub per_fold_accuracies: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub best: ForestParams,
    pub best_accuracy: f64,
    /// One row per evaluated combination, in sampling order.
    pub table: Vec<SearchRow>,
}

/// Evaluate `n_iter` distinct grid points drawn without replacement by k-fold
/// mean accuracy. Ties keep the earlier-sampled combination.
pub fn randomized_search(
    data: &Dataset,
    space: &ParamSpace,
    n_iter: usize,
    k: usize,
    seed: u64,
    base: &ForestParams,
) -> Result<SearchResult> {
    space.validate()?;
    if n_iter == 0 {
        return Err(Error::Config("n_iter must be >= 1".into()));
    }
    let size = space.size();
    let n_iter = if n_iter > size {
        log::warn!("n_iter {n_iter} exceeds grid size {size}; evaluating the whole grid");
        size
    } else {
        n_iter
    };
    let mut rng = rng_for(seed, 2);
    let picks = index::sample(&mut rng, size, n_iter);

    let mut table = Vec::with_capacity(n_iter);
    let mut best: Option<(f64, ForestParams)> = None;
    for i in picks.iter() {
        let params = space.combination(i, base);
        let report = cross_validate(data, &params, k, seed)?;
        let mean = report.per_fold_accuracies.iter().sum::<f64>() / report.per_fold_accuracies.len() as f64;
        log::debug!("search {params:?}: {mean:.4}");
        if best.as_ref().is_none_or(|(b, _)| mean > *b) {
            best = Some((mean, params.clone()));
        }
        table.push(SearchRow { params, mean_accuracy: mean, per_fold_accuracies: report.per_fold_accuracies });
    }
    let (best_accuracy, best) = best.expect("at least one combination");
    Ok(SearchResult { best, best_accuracy, table })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn default_grid_size() {
        assert_eq!(ParamSpace::default().size(), 7920);
    }

    #[test]
    fn combinations_are_distinct() {
        let space = ParamSpace::default();
        let base = ForestParams::default();
        let seen: HashSet<String> = (0..space.size())
            .map(|i| format!("{:?}", space.combination(i, &base)))
            .collect();
        assert_eq!(seen.len(), space.size());
    }

    fn toy() -> Dataset {
        let rows: Vec<Vec<f64>> = (0..30).map(|i| vec![i as f64, (i % 3) as f64]).collect();
        let labels: Vec<usize> = (0..30).map(|i| usize::from(i >= 15)).collect();
        Dataset::new(rows, labels, vec!["a".into(), "b".into()], vec!["x".into(), "y".into()]).unwrap()
    }

    #[test]
    fn search_is_capped_and_deterministic() {
        let space = ParamSpace {
            n_estimators: vec![3, 5],
            max_depth: vec![2],
            min_samples_split: vec![2],
            min_samples_leaf: vec![1],
            max_features: vec![MaxFeatures::All],
            bootstrap: vec![false],
        };
        let base = ForestParams::default();
        let a = randomized_search(&toy(), &space, 10, 3, 5, &base).unwrap();
        assert_eq!(a.table.len(), 2);
        assert_eq!(a, randomized_search(&toy(), &space, 10, 3, 5, &base).unwrap());
        assert!(a.best_accuracy > 0.9);
    }
}
