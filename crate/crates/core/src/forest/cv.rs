use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::rng_for;

use super::dataset::Dataset;
use super::ensemble::{argmax, fit_forest, RandomForestModel};
use super::importance::mdi_importance;
use super::metrics::{accuracy, auroc, cohens_kappa, confusion_matrix};
use super::params::ForestParams;

fn indices_by_class(labels: &[usize]) -> Vec<Vec<usize>> {
    let k = labels.iter().max().map_or(0, |m| m + 1);
    let mut by_class = vec![Vec::new(); k];
    for (i, &y) in labels.iter().enumerate() {
        by_class[y].push(i);
    }
    by_class
}

/// Split `0..labels.len()` into `k` folds with near-equal class proportions.
///
/// Each class's indices are shuffled with `shuffle_seed`, then dealt
/// round-robin; the dealing position carries over from one class to the next,
/// so per-class counts and total fold sizes each differ by at most one.
pub fn stratified_kfold(labels: &[usize], k: usize, shuffle_seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::Validation(format!("k must be >= 2, got {k}")));
    }
    if k > labels.len() {
        return Err(Error::Validation(format!(
            "cannot make {k} folds from {} samples",
            labels.len()
        )));
    }
    let mut rng = rng_for(shuffle_seed, 0);
    let mut folds = vec![Vec::new(); k];
    let mut next = 0;
    for mut members in indices_by_class(labels) {
        members.shuffle(&mut rng);
        for i in members {
            folds[next].push(i);
            next = (next + 1) % k;
        }
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(folds)
}

/// Stratified single split; returns `(train, test)` index lists.
pub fn holdout_split(labels: &[usize], test_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::Validation(format!("test fraction {test_fraction} not in (0, 1)")));
    }
    let mut rng = rng_for(seed, 1);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for mut members in indices_by_class(labels) {
        members.shuffle(&mut rng);
        let n_test = (members.len() as f64 * test_fraction).round() as usize;
        test.extend_from_slice(&members[..n_test]);
        train.extend_from_slice(&members[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    if train.is_empty() || test.is_empty() {
        return Err(Error::Validation("holdout split left one side empty".into()));
    }
    Ok((train, test))
}

/// Pooled cross-validation results.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub accuracy: f64,
    pub cohens_kappa: f64,
    pub auroc: f64,
    /// Rows are true classes, columns predictions.
    pub confusion_matrix: Vec<Vec<u64>>,
    pub per_fold_accuracies: Vec<f64>,
    /// Mean MDI over the fold models, aligned with `feature_names`.
    pub importances: Vec<f64>,
    pub class_names: Vec<String>,
    pub feature_names: Vec<String>,
    pub n_samples: usize,
    pub k_folds: usize,
    pub shuffle_seed: u64,
    pub params: ForestParams,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

pub fn cross_validate(data: &Dataset, params: &ForestParams, k: usize, seed: u64) -> Result<EvalReport> {
    cross_validate_with(data, params, k, seed, |_| {})
}

/// [`cross_validate`] that hands every fold model to `inspect` before it is dropped.
pub fn cross_validate_with(
    data: &Dataset,
    params: &ForestParams,
    k: usize,
    seed: u64,
    mut inspect: impl FnMut(&RandomForestModel),
) -> Result<EvalReport> {
    let folds = stratified_kfold(data.labels(), k, seed)?;
    let n = data.n_samples();
    let mut proba = vec![Vec::new(); n];
    let mut per_fold_accuracies = Vec::with_capacity(k);
    let mut importance_sum = vec![0.0; data.n_features()];
    let mut importance_models = 0usize;

    for test in &folds {
        let mut in_test = vec![false; n];
        test.iter().for_each(|&i| in_test[i] = true);
        let train: Vec<usize> = (0..n).filter(|&i| !in_test[i]).collect();
        let model = fit_forest(&data.subset(&train), params)?;
        let mut hits = 0usize;
        for &i in test {
            let p = model.predict_proba(data.row(i))?;
            if argmax(&p) == data.labels()[i] {
                hits += 1;
            }
            proba[i] = p;
        }
        per_fold_accuracies.push(hits as f64 / test.len() as f64);
        if let Ok(imp) = mdi_importance(&model) {
            importance_models += 1;
            importance_sum.iter_mut().zip(&imp).for_each(|(s, v)| *s += v);
        }
        inspect(&model);
    }

    let pred: Vec<usize> = proba.iter().map(|p| argmax(p)).collect();
    let truth = data.labels();
    let importances = if importance_models == 0 {
        importance_sum
    } else {
        importance_sum.iter().map(|v| v / importance_models as f64).collect()
    };
    Ok(EvalReport {
        accuracy: accuracy(&pred, truth)?,
        cohens_kappa: cohens_kappa(&pred, truth)?,
        auroc: auroc(&proba, truth)?,
        confusion_matrix: confusion_matrix(&pred, truth, data.n_classes())?,
        per_fold_accuracies,
        importances,
        class_names: data.class_names.clone(),
        feature_names: data.feature_names.clone(),
        n_samples: n,
        k_folds: k,
        shuffle_seed: seed,
        params: params.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn per_class_counts(folds: &[Vec<usize>], labels: &[usize]) -> Vec<Vec<usize>> {
        let k = labels.iter().max().unwrap() + 1;
        folds
            .iter()
            .map(|f| {
                let mut c = vec![0; k];
                f.iter().for_each(|&i| c[labels[i]] += 1);
                c
            })
            .collect()
    }

    fn assert_partition(folds: &[Vec<usize>], n: usize) {
        let mut all: Vec<usize> = folds.iter().flatten().copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..n).collect::<Vec<_>>());
    }

    #[test]
    fn divisible_case() {
        let labels: Vec<usize> = (0..100).map(|i| i % 2).collect();
        let folds = stratified_kfold(&labels, 10, 3).unwrap();
        assert_partition(&folds, 100);
        for c in per_class_counts(&folds, &labels) {
            assert_eq!(c, vec![5, 5]);
        }
    }

    #[test]
    fn fold_sizes_for_139() {
        let labels: Vec<usize> = (0..139).map(|i| usize::from(i >= 70)).collect();
        let folds = stratified_kfold(&labels, 10, 8).unwrap();
        assert!(folds.iter().all(|f| f.len() == 13 || f.len() == 14));
        // six classes of uneven size also balance total fold size
        let labels: Vec<usize> = (0..139).map(|i| (i * 5 / 139) + usize::from(i % 11 == 0)).collect();
        let folds = stratified_kfold(&labels, 10, 8).unwrap();
        assert!(folds.iter().all(|f| f.len() == 13 || f.len() == 14));
    }

    #[test]
    fn errors_and_seeding() {
        assert!(stratified_kfold(&[0, 1, 0], 4, 0).is_err());
        assert!(stratified_kfold(&[0, 1, 0], 1, 0).is_err());
        let labels: Vec<usize> = (0..40).map(|i| i % 3).collect();
        assert_eq!(stratified_kfold(&labels, 5, 1).unwrap(), stratified_kfold(&labels, 5, 1).unwrap());
        assert_ne!(stratified_kfold(&labels, 5, 1).unwrap(), stratified_kfold(&labels, 5, 2).unwrap());
    }

    #[test]
    fn holdout_is_stratified() {
        let labels: Vec<usize> = (0..100).map(|i| usize::from(i < 30)).collect();
        let (train, test) = holdout_split(&labels, 0.2, 4).unwrap();
        assert_eq!(test.len(), 20);
        assert_eq!(train.len(), 80);
        assert_eq!(test.iter().filter(|&&i| labels[i] == 1).count(), 6);
        assert!(holdout_split(&labels, 1.0, 4).is_err());
    }

    proptest! {
        #[test]
        fn per_class_counts_differ_by_at_most_one(
            labels in prop::collection::vec(0usize..5, 10..200),
            k in 2usize..11,
            seed in any::<u64>(),
        ) {
            prop_assume!(k <= labels.len());
            let folds = stratified_kfold(&labels, k, seed).unwrap();
            assert_partition(&folds, labels.len());
            let counts = per_class_counts(&folds, &labels);
            for c in 0..counts[0].len() {
                let col: Vec<usize> = counts.iter().map(|r| r[c]).collect();
                prop_assert!(col.iter().max().unwrap() - col.iter().min().unwrap() <= 1);
            }
            let sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
            prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        }
    }
}
