use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{read_json, write_json};

use super::ensemble::RandomForestModel;

pub const MODEL_FORMAT: &str = "esdgait-forest";
pub const MODEL_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    mfcc_fingerprint: Option<String>,
    model: RandomForestModel,
}

/// Write `model` atomically, tagged with the feature pipeline fingerprint.
pub fn save_model(path: &Path, model: &RandomForestModel, mfcc_fingerprint: Option<&str>) -> Result<()> {
    let file = ModelFile {
        format: MODEL_FORMAT.into(),
        version: MODEL_VERSION,
        mfcc_fingerprint: mfcc_fingerprint.map(str::to_owned),
        model: model.clone(),
    };
    write_json(path, &file)
}

/// Load a saved model. When `expected_fingerprint` is given it must match the
/// one stored with the model.
pub fn load_model(path: &Path, expected_fingerprint: Option<&str>) -> Result<(RandomForestModel, Option<String>)> {
    let file: ModelFile = read_json(path)?;
    if file.format != MODEL_FORMAT {
        return Err(Error::format(path, format!("unknown model format {:?}", file.format)));
    }
    if file.version != MODEL_VERSION {
        return Err(Error::format(path, format!("unsupported model version {}", file.version)));
    }
    if let Some(want) = expected_fingerprint {
        if file.mfcc_fingerprint.as_deref() != Some(want) {
            return Err(Error::ModelMismatch(format!(
                "model was trained with feature config {:?}, current config is {want}",
                file.mfcc_fingerprint
            )));
        }
    }
    Ok((file.model, file.mfcc_fingerprint))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::{fit_forest, Dataset, ForestParams};

    #[test]
    fn round_trip_predicts_identically() {
        let rows: Vec<Vec<f64>> = (0..40).map(|i| vec![(i as f64 * 0.37).sin(), i as f64 * 0.1]).collect();
        let labels: Vec<usize> = (0..40).map(|i| i % 3).collect();
        let data = Dataset::new(
            rows,
            labels,
            vec!["a".into(), "b".into()],
            vec!["p".into(), "q".into(), "r".into()],
        )
        .unwrap();
        let params = ForestParams { n_estimators: 7, min_samples_split: 2, min_samples_leaf: 1, ..Default::default() };
        let model = fit_forest(&data, &params).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.rfj");
        save_model(&path, &model, Some("abc")).unwrap();
        let (loaded, fp) = load_model(&path, Some("abc")).unwrap();
        assert_eq!(fp.as_deref(), Some("abc"));
        for row in data.rows() {
            let a = model.predict_proba(row).unwrap();
            let b = loaded.predict_proba(row).unwrap();
            assert_eq!(a.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), b.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
        }
        assert!(matches!(load_model(&path, Some("other")), Err(Error::ModelMismatch(_))));
    }
}
