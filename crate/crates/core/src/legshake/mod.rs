//! Streaming leg-shake detection.
//!
//! A sliding window is scored by the share of its power that falls in a low
//! band around the shake frequency. A hysteresis state machine turns runs of
//! qualifying windows into timestamped events.

mod config;
mod detector;
mod spectrum;

pub use config::DetectorConfig;
pub use detector::{detect_stream, Detector, DetectorUpdate, ShakeEvent};
pub use spectrum::{band_ratio, BandAnalyzer};
