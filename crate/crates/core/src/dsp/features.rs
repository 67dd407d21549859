use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simkit::SignalRecord;

use super::mfcc::MfccExtractor;
use super::preprocess::z_transform;

pub const CATEGORICAL_NAMES: [&str; 2] = ["plant_type", "location"];

/// Caller-supplied integer codes, shared between training and serving.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryMaps {
    pub plant_type: BTreeMap<String, u32>,
    pub location: BTreeMap<String, u32>,
}

impl CategoryMaps {
    /// Codes assigned in the given order.
    pub fn from_lists(plant_types: &[String], locations: &[String]) -> Self {
        let index = |xs: &[String]| {
            let mut map = BTreeMap::new();
            for x in xs {
                let next = map.len() as u32;
                map.entry(x.clone()).or_insert(next);
            }
            map
        };
        Self {
            plant_type: index(plant_types),
            location: index(locations),
        }
    }

    fn code(map: &BTreeMap<String, u32>, field: &str, value: &str) -> Result<f64> {
        map.get(value)
            .map(|c| f64::from(*c))
            .ok_or_else(|| Error::Encoding(format!("no code for {field} = {value:?}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub names: Vec<String>,
}

/// Z-transform, MFCC and coefficient-major flattening, optionally followed by
/// the integer-coded plant type and location.
pub fn featurize(
    record: &SignalRecord,
    extractor: &MfccExtractor,
    include_categoricals: bool,
    maps: &CategoryMaps,
) -> Result<FeatureVector> {
    let standardized = z_transform(&record.samples)?;
    let matrix = extractor.extract(&standardized)?;
    let mut values = matrix.coefficients;
    let mut names: Vec<String> = (0..matrix.n_coefficients)
        .flat_map(|c| (0..matrix.n_frames).map(move |f| format!("mfcc{c}_t{f}")))
        .collect();
    if include_categoricals {
        values.push(CategoryMaps::code(&maps.plant_type, "plant_type", &record.labels.plant_type)?);
        values.push(CategoryMaps::code(&maps.location, "location", &record.labels.location)?);
        names.extend(CATEGORICAL_NAMES.iter().map(|s| s.to_string()));
    }
    Ok(FeatureVector { values, names })
}
