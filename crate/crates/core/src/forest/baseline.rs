use crate::error::{Error, Result};

/// Always predicts the most frequent training class (ties → lowest id).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MajorityClassifier {
    pub class: usize,
}

impl MajorityClassifier {
    pub fn predict(&self, _row: &[f64]) -> usize {
        self.class
    }
}

pub fn or_baseline(train_labels: &[usize]) -> Result<MajorityClassifier> {
    let k = train_labels
        .iter()
        .max()
        .map(|m| m + 1)
        .ok_or_else(|| Error::Validation("baseline needs at least one label".into()))?;
    let mut counts = vec![0usize; k];
    for &y in train_labels {
        counts[y] += 1;
    }
    let mut class = 0;
    for (c, n) in counts.iter().enumerate() {
        if *n > counts[class] {
            class = c;
        }
    }
    Ok(MajorityClassifier { class })
}

/// Accuracy of the majority classifier on data with these class counts.
pub fn baseline_accuracy(class_counts: &[usize]) -> f64 {
    let total: usize = class_counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    *class_counts.iter().max().expect("non-empty") as f64 / total as f64
}
