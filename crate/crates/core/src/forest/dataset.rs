use crate::error::{Error, Result};

/// Row-major feature table with integer class labels.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    n_samples: usize,
    n_features: usize,
    labels: Vec<usize>,
    pub feature_names: Vec<String>,
    pub class_names: Vec<String>,
}

impl Dataset {
    pub fn new(
        rows: Vec<Vec<f64>>,
        labels: Vec<usize>,
        feature_names: Vec<String>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        let n_features = feature_names.len();
        if rows.len() != labels.len() {
            return Err(Error::Validation(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        let mut features = Vec::with_capacity(rows.len() * n_features);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n_features {
                return Err(Error::Validation(format!(
                    "row {i} has {} values, expected {n_features}",
                    row.len()
                )));
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::Validation(format!("row {i}, feature {j} is not finite")));
            }
            features.extend_from_slice(row);
        }
        let data = Self {
            features,
            n_samples: rows.len(),
            n_features,
            labels,
            feature_names,
            class_names,
        };
        data.validate()?;
        Ok(data)
    }

    fn validate(&self) -> Result<()> {
        let k = self.class_names.len();
        if k < 2 {
            return Err(Error::Validation(format!("need at least 2 classes, got {k}")));
        }
        if self.n_samples < k {
            return Err(Error::Validation(format!(
                "{} samples cannot cover {k} classes",
                self.n_samples
            )));
        }
        if self.n_features == 0 {
            return Err(Error::Validation("dataset has no features".into()));
        }
        let mut counts = vec![0usize; k];
        for &y in &self.labels {
            if y >= k {
                return Err(Error::Validation(format!("label {y} out of range for {k} classes")));
            }
            counts[y] += 1;
        }
        if let Some(c) = counts.iter().position(|n| *n == 0) {
            return Err(Error::Validation(format!(
                "class {:?} has no samples",
                self.class_names[c]
            )));
        }
        Ok(())
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.features.chunks(self.n_features)
    }

    pub fn value(&self, i: usize, feature: usize) -> f64 {
        self.features[i * self.n_features + feature]
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes()];
        for &y in &self.labels {
            counts[y] += 1;
        }
        counts
    }

    /// Rows selected by `indices`, keeping the full class list. The subset may
    /// lack some classes (a training fold can miss a class with one sample).
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        let mut features = Vec::with_capacity(indices.len() * self.n_features);
        for &i in indices {
            features.extend_from_slice(self.row(i));
        }
        Dataset {
            features,
            n_samples: indices.len(),
            n_features: self.n_features,
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            feature_names: self.feature_names.clone(),
            class_names: self.class_names.clone(),
        }
    }

    /// Keep only samples of the given classes, relabelled `0..classes.len()` in that order.
    pub fn restrict_classes(&self, classes: &[usize]) -> Result<Dataset> {
        let indices: Vec<usize> = (0..self.n_samples)
            .filter(|&i| classes.contains(&self.labels[i]))
            .collect();
        let rows = indices.iter().map(|&i| self.row(i).to_vec()).collect();
        let labels = indices
            .iter()
            .map(|&i| classes.iter().position(|c| *c == self.labels[i]).expect("filtered"))
            .collect();
        let names = classes.iter().map(|&c| self.class_names[c].clone()).collect();
        Dataset::new(rows, labels, self.feature_names.clone(), names)
    }

    /// Column-major copy of the feature table.
    pub(crate) fn columns(&self) -> Vec<f64> {
        let mut cols = vec![0.0; self.features.len()];
        for (i, row) in self.rows().enumerate() {
            for (j, v) in row.iter().enumerate() {
                cols[j * self.n_samples + i] = *v;
            }
        }
        cols
    }
}
