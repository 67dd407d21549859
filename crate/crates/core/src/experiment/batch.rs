use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dsp::{featurize, trim_to_common_length, CategoryMaps, MfccConfig, MfccExtractor};
use crate::error::{Error, Result};
use crate::forest::Dataset;
use crate::io::{atomic_write, read_json, read_to_string, write_json};
use crate::simkit::{read_manifest, read_record, SignalRecord};

use super::config::{ExperimentConfig, Task};

/// Rows of feature values with their string labels.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureTable {
    pub feature_names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reject {
    pub record: String,
    pub reason: String,
}

/// Contents of `features.meta.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureMeta {
    pub task: Task,
    pub label_column: String,
    pub mfcc: MfccConfig,
    pub mfcc_fingerprint: String,
    pub include_categoricals: bool,
    pub category_maps: CategoryMaps,
    pub common_length: usize,
    pub n_rows: usize,
    pub rejects: Vec<Reject>,
}

/// Read every record a manifest lists, in manifest order.
pub fn load_manifest(path: &Path) -> Result<Vec<(String, SignalRecord)>> {
    read_manifest(path)?
        .par_iter()
        .map(|e| {
            let name = e.signal_path.display().to_string();
            Ok((name, read_record(&e.signal_path, &e.meta_path)?))
        })
        .collect()
}

fn label_of(task: Task, record: &SignalRecord, name: &str) -> Result<String> {
    let label = match task {
        Task::IdentifyPerson => record.labels.person_id.clone(),
        Task::ClassifyMood => record
            .labels
            .mood
            .clone()
            .ok_or_else(|| Error::Validation(format!("{name}: record has no mood label")))?,
        Task::Legshake => record.labels.activity.clone(),
    };
    if label.is_empty() || label.contains([',', '"', '\n', '\r']) {
        return Err(Error::Validation(format!("{name}: label {label:?} is empty or not CSV-safe")));
    }
    Ok(label)
}

type FeaturizedRow = (Vec<f64>, Vec<String>, String);

/// Trim to a common length, then featurize every record in parallel.
/// Zero-variance records are rejected rather than failing the batch.
pub fn featurize_batch(
    records: Vec<(String, SignalRecord)>,
    config: &ExperimentConfig,
) -> Result<(FeatureTable, FeatureMeta)> {
    if records.is_empty() {
        return Err(Error::Validation("no records to featurize".into()));
    }
    let rate = records[0].1.sample_rate;
    if let Some((name, r)) = records.iter().find(|(_, r)| r.sample_rate != rate) {
        return Err(Error::Validation(format!(
            "mixed sample rates: {name} has {} Hz, expected {rate} Hz",
            r.sample_rate
        )));
    }
    if rate != config.mfcc.sample_rate {
        return Err(Error::Validation(format!(
            "records are sampled at {rate} Hz but the MFCC config expects {} Hz",
            config.mfcc.sample_rate
        )));
    }
    let (names, records): (Vec<String>, Vec<SignalRecord>) = records.into_iter().unzip();
    let records = trim_to_common_length(records)?;
    let common_length = records[0].len();
    let extractor = MfccExtractor::new(config.mfcc.clone())?;
    let maps = CategoryMaps::from_lists(&config.dataset.plant_types, &config.dataset.locations);
    let include = config.evaluation.include_categoricals;

    let results: Vec<Result<Option<FeaturizedRow>>> = names
        .par_iter()
        .zip(&records)
        .map(|(name, record)| {
            let label = label_of(config.task, record, name)?;
            match featurize(record, &extractor, include, &maps) {
                Ok(v) => Ok(Some((v.values, v.names, label))),
                Err(Error::DegenerateSignal(_)) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect();

    let mut table = FeatureTable { feature_names: Vec::new(), rows: Vec::new(), labels: Vec::new() };
    let mut rejects = Vec::new();
    for (name, result) in names.iter().zip(results) {
        match result? {
            Some((values, feature_names, label)) => {
                if table.feature_names.is_empty() {
                    table.feature_names = feature_names;
                }
                table.rows.push(values);
                table.labels.push(label);
            }
            None => rejects.push(Reject { record: name.clone(), reason: "zero-variance signal".into() }),
        }
    }
    if !rejects.is_empty() {
        log::warn!("rejected {} degenerate record(s)", rejects.len());
    }
    if table.rows.is_empty() {
        return Err(Error::Validation("every record was rejected".into()));
    }
    let meta = FeatureMeta {
        task: config.task,
        label_column: config.task.label_column().into(),
        mfcc_fingerprint: config.mfcc.fingerprint(),
        mfcc: config.mfcc.clone(),
        include_categoricals: include,
        category_maps: maps,
        common_length,
        n_rows: table.rows.len(),
        rejects,
    };
    Ok((table, meta))
}

impl FeatureTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for name in &self.feature_names {
            out.push_str(name);
            out.push(',');
        }
        out.push_str("label\n");
        for (row, label) in self.rows.iter().zip(&self.labels) {
            for v in row {
                write!(out, "{v:e},").expect("write to String");
            }
            out.push_str(label);
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str, origin: &Path) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| Error::format(origin, "empty feature file"))?;
        let mut feature_names: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
        if feature_names.pop().as_deref() != Some("label") {
            return Err(Error::format(origin, "last header column must be \"label\""));
        }
        let width = feature_names.len();
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for (i, line) in lines {
            let mut cells: Vec<&str> = line.split(',').collect();
            if cells.len() != width + 1 {
                return Err(Error::format(origin, format!("line {}: expected {} columns, got {}", i + 1, width + 1, cells.len())));
            }
            labels.push(cells.pop().expect("non-empty").trim().to_string());
            let row = cells
                .iter()
                .map(|c| match c.trim().parse::<f64>() {
                    Ok(v) if v.is_finite() => Ok(v),
                    _ => Err(Error::format(origin, format!("line {}: bad value {c:?}", i + 1))),
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        Ok(Self { feature_names, rows, labels })
    }

    /// Sorted distinct labels.
    pub fn class_names(&self) -> Vec<String> {
        self.labels.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect()
    }

    pub fn to_dataset(&self) -> Result<Dataset> {
        let classes = self.class_names();
        let ids = self
            .labels
            .iter()
            .map(|l| classes.binary_search(l).expect("label from the same table"))
            .collect();
        Dataset::new(self.rows.clone(), ids, self.feature_names.clone(), classes)
    }
}

/// Paths written by [`write_features`].
pub struct FeatureFiles {
    pub csv: PathBuf,
    pub meta: PathBuf,
    pub rejects: PathBuf,
}

pub fn write_features(dir: &Path, table: &FeatureTable, meta: &FeatureMeta) -> Result<FeatureFiles> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = FeatureFiles {
        csv: dir.join("features.csv"),
        meta: dir.join("features.meta.json"),
        rejects: dir.join("rejects.json"),
    };
    atomic_write(&files.csv, table.to_csv().as_bytes())?;
    write_json(&files.meta, meta)?;
    write_json(&files.rejects, &meta.rejects)?;
    Ok(files)
}

/// Read `features.csv` and the `features.meta.json` beside it.
pub fn read_features(csv: &Path) -> Result<(FeatureTable, FeatureMeta)> {
    let table = FeatureTable::from_csv(&read_to_string(csv)?, csv)?;
    let meta_path = csv.with_file_name("features.meta.json");
    let meta: FeatureMeta = read_json(&meta_path)?;
    if meta.n_rows != table.rows.len() {
        return Err(Error::format(csv, format!("{} rows but the sidecar records {}", table.rows.len(), meta.n_rows)));
    }
    Ok((table, meta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::cohort::synthesize;

    fn config() -> ExperimentConfig {
        ExperimentConfig::from_toml(
            r#"
            seed = 11
            task = "identify_person"
            [dataset]
            samples_per_cell = 2
            duration = 2.7
            [[dataset.persons]]
            id = "a"
            step_frequency = 1.2
            walking_speed = 1.2
            vertical_amplitude = 1.0
            [[dataset.persons]]
            id = "b"
            step_frequency = 1.6
            walking_speed = 1.3
            vertical_amplitude = 1.0
            "#,
        )
        .unwrap()
    }

    fn records(c: &ExperimentConfig) -> Vec<(String, SignalRecord)> {
        synthesize(c).unwrap().into_iter().map(|r| (r.name, r.record)).collect()
    }

    #[test]
    fn csv_round_trip_and_rejects() {
        let c = config();
        let mut recs = records(&c);
        recs[1].1.samples.iter_mut().for_each(|v| *v = 0.5);
        let (table, meta) = featurize_batch(recs, &c).unwrap();
        assert_eq!(table.rows.len(), 3);
        assert_eq!(meta.rejects.len(), 1);
        assert_eq!(meta.rejects[0].record, "a_none_001");
        assert_eq!(table.labels, ["a", "b", "b"]);
        let back = FeatureTable::from_csv(&table.to_csv(), Path::new("x")).unwrap();
        assert_eq!(back, table);
        let data = back.to_dataset().unwrap();
        assert_eq!(data.class_names, ["a", "b"]);
    }

    #[test]
    fn mixed_rates_fail() {
        let c = config();
        let mut recs = records(&c);
        recs[2].1.sample_rate = 8000.0;
        assert!(matches!(featurize_batch(recs, &c), Err(Error::Validation(_))));
    }
}
