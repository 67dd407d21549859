use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{atomic_write, parse_samples, read_json, read_to_string, write_json};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Labels {
    pub person_id: String,
    pub mood: Option<String>,
    pub plant_type: String,
    pub location: String,
    pub activity: String,
}

/// A sampled current trace plus its labels.
#[derive(Clone, Debug, PartialEq)]
pub struct SignalRecord {
    pub samples: Vec<f64>,
    pub sample_rate: f64,
    pub labels: Labels,
    pub seed: u64,
    pub generator_params: serde_json::Value,
}

impl SignalRecord {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples.is_empty() {
            return Err(Error::Validation("record has no samples".into()));
        }
        if !(self.sample_rate.is_finite() && self.sample_rate > 0.0) {
            return Err(Error::Validation(format!("invalid sample rate {}", self.sample_rate)));
        }
        if let Some(i) = self.samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::Validation(format!("sample {i} is not finite")));
        }
        Ok(())
    }
}

/// Contents of `<name>.meta.json`.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct RecordMeta {
    sample_rate: f64,
    person_id: String,
    mood: Option<String>,
    plant_type: String,
    location: String,
    activity: String,
    seed: u64,
    generator_params: serde_json::Value,
}

/// One line of `dataset.json`. Relative paths resolve against the manifest's directory.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub signal_path: PathBuf,
    pub meta_path: PathBuf,
}

/// Write `<dir>/<name>.sig.csv` and `<dir>/<name>.meta.json`.
pub fn write_record(dir: &Path, name: &str, record: &SignalRecord) -> Result<ManifestEntry> {
    record.validate()?;
    let mut text = String::with_capacity(record.samples.len() * 24);
    for v in &record.samples {
        // `{:e}` is the shortest representation that round-trips exactly
        writeln!(text, "{v:e}").expect("write to String");
    }
    let signal_path = dir.join(format!("{name}.sig.csv"));
    let meta_path = dir.join(format!("{name}.meta.json"));
    atomic_write(&signal_path, text.as_bytes())?;
    let meta = RecordMeta {
        sample_rate: record.sample_rate,
        person_id: record.labels.person_id.clone(),
        mood: record.labels.mood.clone(),
        plant_type: record.labels.plant_type.clone(),
        location: record.labels.location.clone(),
        activity: record.labels.activity.clone(),
        seed: record.seed,
        generator_params: record.generator_params.clone(),
    };
    write_json(&meta_path, &meta)?;
    Ok(ManifestEntry {
        signal_path,
        meta_path,
    })
}

pub fn read_record(signal_path: &Path, meta_path: &Path) -> Result<SignalRecord> {
    let samples = parse_samples(&read_to_string(signal_path)?, signal_path)?;
    let meta: RecordMeta = read_json(meta_path)?;
    let record = SignalRecord {
        samples,
        sample_rate: meta.sample_rate,
        labels: Labels {
            person_id: meta.person_id,
            mood: meta.mood,
            plant_type: meta.plant_type,
            location: meta.location,
            activity: meta.activity,
        },
        seed: meta.seed,
        generator_params: meta.generator_params,
    };
    record
        .validate()
        .map_err(|e| Error::format(signal_path, e))?;
    Ok(record)
}

/// Write `dataset.json`, storing paths relative to the manifest when possible.
pub fn write_manifest(path: &Path, entries: &[ManifestEntry]) -> Result<()> {
    let base = path.parent().unwrap_or(Path::new(""));
    let relative: Vec<ManifestEntry> = entries
        .iter()
        .map(|e| ManifestEntry {
            signal_path: e.signal_path.strip_prefix(base).unwrap_or(&e.signal_path).to_path_buf(),
            meta_path: e.meta_path.strip_prefix(base).unwrap_or(&e.meta_path).to_path_buf(),
        })
        .collect();
    write_json(path, &relative)
}

/// Read `dataset.json`, resolving relative paths against its directory.
pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    let entries: Vec<ManifestEntry> = read_json(path)?;
    let base = path.parent().unwrap_or(Path::new(""));
    Ok(entries
        .into_iter()
        .map(|e| ManifestEntry {
            signal_path: base.join(e.signal_path),
            meta_path: base.join(e.meta_path),
        })
        .collect())
}
