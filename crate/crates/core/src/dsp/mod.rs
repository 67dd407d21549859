//! Preprocessing and MFCC feature extraction.

mod features;
mod mel;
mod mfcc;
mod preprocess;

pub use features::{featurize, CategoryMaps, FeatureVector, CATEGORICAL_NAMES};
pub use mel::{build_mel_filterbank, hz_to_mel, mel_to_hz, MelFilterbank};
pub use mfcc::{dct_matrix, mfcc, FeatureMatrix, MfccConfig, MfccExtractor, WindowFunction, LOG_FLOOR};
pub use preprocess::{trim_to_common_length, z_transform};
