use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forest::{
    accuracy, baseline_accuracy, cohens_kappa, cross_validate, fit_forest, holdout_split, randomized_search, Dataset,
    EvalReport, ForestParams, RandomForestModel, SearchResult,
};
use crate::io::{atomic_write, write_json};

use super::config::ExperimentConfig;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HoldoutReport {
    pub test_fraction: f64,
    pub n_train: usize,
    pub n_test: usize,
    pub accuracy: f64,
    pub cohens_kappa: f64,
}

pub struct TrainOutcome {
    pub params: ForestParams,
    pub search: Option<SearchResult>,
    pub report: EvalReport,
    pub holdout: Option<HoldoutReport>,
    /// Trained on every row.
    pub model: RandomForestModel,
}

/// Optional hyperparameter search, k-fold evaluation, then a final fit on all rows.
pub fn train_and_evaluate(data: &Dataset, config: &ExperimentConfig) -> Result<TrainOutcome> {
    let mut params = config.forest_params();
    let k = config.evaluation.k_folds;
    let search = match &config.search {
        Some(s) => {
            let result = randomized_search(data, &s.space, s.n_iter, k, config.seed, &params)?;
            log::info!("search picked {:?} at {:.4}", result.best, result.best_accuracy);
            params = result.best.clone();
            Some(result)
        }
        None => None,
    };
    let report = cross_validate(data, &params, k, config.seed)?;
    let holdout = match config.evaluation.holdout_fraction {
        Some(fraction) => Some(holdout(data, &params, fraction, config.seed)?),
        None => None,
    };
    let model = fit_forest(data, &params)?;
    Ok(TrainOutcome { params, search, report, holdout, model })
}

fn holdout(data: &Dataset, params: &ForestParams, fraction: f64, seed: u64) -> Result<HoldoutReport> {
    let (train, test) = holdout_split(data.labels(), fraction, seed)?;
    let model = fit_forest(&data.subset(&train), params)?;
    let pred = test.iter().map(|&i| model.predict(data.row(i))).collect::<Result<Vec<_>>>()?;
    let truth: Vec<usize> = test.iter().map(|&i| data.labels()[i]).collect();
    Ok(HoldoutReport {
        test_fraction: fraction,
        n_train: train.len(),
        n_test: test.len(),
        accuracy: accuracy(&pred, &truth)?,
        cohens_kappa: cohens_kappa(&pred, &truth)?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccuracyAtK {
    pub k: usize,
    pub forest_accuracy: f64,
    pub baseline_accuracy: f64,
    pub classes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImportanceRow {
    pub feature: String,
    pub importance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub eval: EvalReport,
    pub accuracy_vs_k: Option<Vec<AccuracyAtK>>,
    pub importance_chart_data: Vec<ImportanceRow>,
}

/// Forest and majority-baseline accuracy on the first `k` classes, for every
/// `k` from 2 to the number of classes.
pub fn accuracy_vs_k(data: &Dataset, params: &ForestParams, k_folds: usize, seed: u64) -> Result<Vec<AccuracyAtK>> {
    if data.n_classes() < 2 {
        return Err(Error::Validation("need at least 2 classes for a sweep".into()));
    }
    (2..=data.n_classes())
        .map(|k| {
            let classes: Vec<usize> = (0..k).collect();
            let subset = data.restrict_classes(&classes)?;
            let report = cross_validate(&subset, params, k_folds, seed)?;
            Ok(AccuracyAtK {
                k,
                forest_accuracy: report.accuracy,
                baseline_accuracy: baseline_accuracy(&subset.class_counts()),
                classes: subset.class_names.clone(),
            })
        })
        .collect()
}

/// Importances sorted descending; equal values keep feature order.
pub fn importance_rows(report: &EvalReport) -> Vec<ImportanceRow> {
    let mut rows: Vec<ImportanceRow> = report
        .feature_names
        .iter()
        .zip(&report.importances)
        .map(|(f, &i)| ImportanceRow { feature: f.clone(), importance: i })
        .collect();
    rows.sort_by(|a, b| b.importance.total_cmp(&a.importance));
    rows
}

pub fn build_report(data: &Dataset, config: &ExperimentConfig, sweep: bool) -> Result<ReportBundle> {
    let params = config.forest_params();
    let k = config.evaluation.k_folds;
    let eval = cross_validate(data, &params, k, config.seed)?;
    let accuracy_vs_k = if sweep { Some(accuracy_vs_k(data, &params, k, config.seed)?) } else { None };
    Ok(ReportBundle { importance_chart_data: importance_rows(&eval), eval, accuracy_vs_k })
}

pub fn write_report(dir: &Path, bundle: &ReportBundle) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_json(&dir.join("report.json"), bundle)?;
    let mut imp = String::from("feature,importance\n");
    for r in &bundle.importance_chart_data {
        writeln!(imp, "{},{:e}", r.feature, r.importance).expect("write to String");
    }
    atomic_write(&dir.join("importance.csv"), imp.as_bytes())?;
    if let Some(rows) = &bundle.accuracy_vs_k {
        let mut csv = String::from("k,forest_acc,baseline_acc\n");
        for r in rows {
            writeln!(csv, "{},{},{}", r.k, r.forest_accuracy, r.baseline_accuracy).expect("write to String");
        }
        atomic_write(&dir.join("accuracy_vs_k.csv"), csv.as_bytes())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blobs(classes: usize, per: usize) -> Dataset {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for c in 0..classes {
            for i in 0..per {
                let jitter = ((i * 37 + c * 11) % 17) as f64 / 17.0;
                rows.push(vec![c as f64 * 3.0 + jitter, jitter, (i % 5) as f64]);
                labels.push(c);
            }
        }
        let names = (0..3).map(|i| format!("f{i}")).collect();
        let classes = (0..classes).map(|c| format!("c{c}")).collect();
        Dataset::new(rows, labels, names, classes).unwrap()
    }

    #[test]
    fn sweep_baseline_is_modal_share() {
        let params = ForestParams { n_estimators: 10, ..Default::default() };
        let rows = accuracy_vs_k(&blobs(4, 20), &params, 5, 1).unwrap();
        assert_eq!(rows.iter().map(|r| r.k).collect::<Vec<_>>(), [2, 3, 4]);
        for r in &rows {
            assert!((r.baseline_accuracy - 1.0 / r.k as f64).abs() < 1e-12);
            assert!(r.forest_accuracy >= r.baseline_accuracy);
        }
    }

    #[test]
    fn importance_rows_are_sorted_and_sum_to_one() {
        let params = ForestParams { n_estimators: 10, ..Default::default() };
        let report = cross_validate(&blobs(3, 20), &params, 5, 1).unwrap();
        let rows = importance_rows(&report);
        assert!(rows.windows(2).all(|w| w[0].importance >= w[1].importance));
        assert!((rows.iter().map(|r| r.importance).sum::<f64>() - 1.0).abs() < 1e-9);
        assert_eq!(rows[0].feature, "f0");
    }
}
