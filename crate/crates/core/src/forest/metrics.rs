use log::warn;

use crate::error::{Error, Result};

pub(crate) fn gini_from_counts(counts: &[u32]) -> f64 {
    let total: u32 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let n = f64::from(total);
    1.0 - counts.iter().map(|c| (f64::from(*c) / n).powi(2)).sum::<f64>()
}

/// `1 − Σ p_k²` of a class histogram.
pub fn gini_impurity(class_counts: &[f64]) -> Result<f64> {
    if class_counts.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
        return Err(Error::Domain("class counts must be non-negative".into()));
    }
    let total: f64 = class_counts.iter().sum();
    if total <= 0.0 {
        return Err(Error::Domain("empty class histogram".into()));
    }
    Ok(1.0 - class_counts.iter().map(|c| (c / total).powi(2)).sum::<f64>())
}

fn check_lengths(pred: &[usize], truth: &[usize]) -> Result<()> {
    if pred.len() != truth.len() {
        return Err(Error::Validation(format!(
            "{} predictions for {} labels",
            pred.len(),
            truth.len()
        )));
    }
    if pred.is_empty() {
        return Err(Error::Validation("no predictions".into()));
    }
    Ok(())
}

/// `n_classes × n_classes` counts; rows are true classes, columns predictions.
pub fn confusion_matrix(pred: &[usize], truth: &[usize], n_classes: usize) -> Result<Vec<Vec<u64>>> {
    check_lengths(pred, truth)?;
    let mut m = vec![vec![0u64; n_classes]; n_classes];
    for (&p, &t) in pred.iter().zip(truth) {
        if p >= n_classes || t >= n_classes {
            return Err(Error::Validation(format!("label out of range for {n_classes} classes")));
        }
        m[t][p] += 1;
    }
    Ok(m)
}

pub fn accuracy(pred: &[usize], truth: &[usize]) -> Result<f64> {
    check_lengths(pred, truth)?;
    let hits = pred.iter().zip(truth).filter(|(p, t)| p == t).count();
    Ok(hits as f64 / pred.len() as f64)
}

/// Chance-corrected agreement `(p_o − p_e) / (1 − p_e)`; 0 when `p_e = 1`.
pub fn cohens_kappa(pred: &[usize], truth: &[usize]) -> Result<f64> {
    check_lengths(pred, truth)?;
    let k = pred.iter().chain(truth).max().map_or(0, |m| m + 1);
    let m = confusion_matrix(pred, truth, k)?;
    let n = pred.len() as f64;
    let observed = (0..k).map(|i| m[i][i]).sum::<u64>() as f64 / n;
    let expected = (0..k)
        .map(|i| {
            let row: u64 = m[i].iter().sum();
            let col: u64 = m.iter().map(|r| r[i]).sum();
            (row * col) as f64
        })
        .sum::<f64>()
        / (n * n);
    if expected >= 1.0 {
        return Ok(0.0);
    }
    Ok((observed - expected) / (1.0 - expected))
}

/// Mann–Whitney AUROC of `scores` for the positive set; ties count one half.
pub fn binary_auroc(scores: &[f64], positive: &[bool]) -> Result<f64> {
    if scores.len() != positive.len() || scores.is_empty() {
        return Err(Error::Validation("scores and labels must be non-empty and equal length".into()));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::Validation("scores must be finite".into()));
    }
    let n_pos = positive.iter().filter(|p| **p).count();
    let n_neg = positive.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::Validation("AUROC needs both positive and negative samples".into()));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // midranks, 1-based
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let midrank = (i + j) as f64 / 2.0 + 1.0;
        rank_sum_pos += midrank * order[i..=j].iter().filter(|&&o| positive[o]).count() as f64;
        i = j + 1;
    }
    let u = rank_sum_pos - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos as f64 * n_neg as f64))
}

/// AUROC from class-probability rows. Two classes: the rank statistic of the
/// class-1 column. More classes: unweighted mean of one-vs-rest AUROCs over
/// the classes present in `truth` (absent classes are skipped with a warning).
pub fn auroc(scores: &[Vec<f64>], truth: &[usize]) -> Result<f64> {
    if scores.len() != truth.len() || scores.is_empty() {
        return Err(Error::Validation("scores and labels must be non-empty and equal length".into()));
    }
    let k = scores[0].len();
    if k < 2 || scores.iter().any(|r| r.len() != k) {
        return Err(Error::Validation("every score row needs the same number (>= 2) of classes".into()));
    }
    if truth.iter().any(|t| *t >= k) {
        return Err(Error::Validation(format!("label out of range for {k} classes")));
    }
    let column = |c: usize| scores.iter().map(|r| r[c]).collect::<Vec<f64>>();
    if k == 2 {
        let positive: Vec<bool> = truth.iter().map(|t| *t == 1).collect();
        return binary_auroc(&column(1), &positive);
    }
    let mut terms = Vec::with_capacity(k);
    for c in 0..k {
        let positive: Vec<bool> = truth.iter().map(|t| *t == c).collect();
        let n_pos = positive.iter().filter(|p| **p).count();
        if n_pos == 0 || n_pos == truth.len() {
            warn!("class {c} has no {} in the truth labels; skipping its one-vs-rest AUROC", if n_pos == 0 { "positives" } else { "negatives" });
            continue;
        }
        terms.push(binary_auroc(&column(c), &positive)?);
    }
    if terms.is_empty() {
        return Err(Error::Validation("no class yields a defined one-vs-rest AUROC".into()));
    }
    Ok(terms.iter().sum::<f64>() / terms.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gini_examples() {
        assert_eq!(gini_impurity(&[10.0, 0.0]).unwrap(), 0.0);
        assert_eq!(gini_impurity(&[5.0, 5.0]).unwrap(), 0.5);
        assert!((gini_impurity(&[1.0, 2.0, 3.0]).unwrap() - 11.0 / 18.0).abs() < 1e-15);
        assert!(gini_impurity(&[]).is_err());
        assert!(gini_impurity(&[0.0, 0.0]).is_err());
        assert!(gini_impurity(&[-1.0, 2.0]).is_err());
        assert_eq!(gini_from_counts(&[1, 2, 3]), gini_impurity(&[1.0, 2.0, 3.0]).unwrap());
    }

    #[test]
    fn gini_upper_bound() {
        for k in 2..8 {
            let g = gini_impurity(&vec![3.0; k]).unwrap();
            assert!((g - (1.0 - 1.0 / k as f64)).abs() < 1e-12);
        }
    }

    #[test]
    fn kappa_examples() {
        let truth = [0, 1, 1, 0, 2, 2];
        assert_eq!(cohens_kappa(&truth, &truth).unwrap(), 1.0);
        let balanced = [0, 0, 1, 1];
        assert_eq!(cohens_kappa(&[0, 0, 0, 0], &balanced).unwrap(), 0.0);
        assert_eq!(cohens_kappa(&[1, 1], &[1, 1]).unwrap(), 0.0);
        assert!(cohens_kappa(&[0], &[0, 1]).is_err());
    }

    #[test]
    fn balanced_binary_kappa_is_two_acc_minus_one() {
        // 1000 samples, 500 per class, 72 errors each way → accuracy 0.856
        let mut truth = vec![0; 500];
        truth.extend(vec![1; 500]);
        let mut pred = truth.clone();
        for i in 0..72 {
            pred[i] = 1;
            pred[500 + i] = 0;
        }
        let acc = accuracy(&pred, &truth).unwrap();
        let k = cohens_kappa(&pred, &truth).unwrap();
        assert!((k - (2.0 * acc - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn auroc_examples() {
        let perfect = vec![vec![0.9, 0.1], vec![0.8, 0.2], vec![0.3, 0.7], vec![0.1, 0.9]];
        assert_eq!(auroc(&perfect, &[0, 0, 1, 1]).unwrap(), 1.0);
        let flat = vec![vec![0.5, 0.5]; 4];
        assert_eq!(auroc(&flat, &[0, 1, 0, 1]).unwrap(), 0.5);
        let three = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        assert_eq!(auroc(&three, &[0, 1, 2]).unwrap(), 1.0);
        // class 2 absent: mean of the two defined terms
        let partial = vec![vec![0.6, 0.3, 0.1], vec![0.2, 0.7, 0.1]];
        assert_eq!(auroc(&partial, &[0, 1]).unwrap(), 1.0);
        assert!(auroc(&flat, &[0, 0, 0, 0]).is_err());
    }

    #[test]
    fn confusion_rows_are_truth() {
        let m = confusion_matrix(&[0, 1, 1], &[0, 0, 1], 2).unwrap();
        assert_eq!(m, vec![vec![1, 1], vec![0, 1]]);
    }
}
