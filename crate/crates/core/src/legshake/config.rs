use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorConfig {
    pub sample_rate: f64,
    pub window_seconds: f64,
    pub hop_seconds: f64,
    pub band_low: f64,
    pub band_high: f64,
    pub peak_target_low: f64,
    pub peak_target_high: f64,
    pub ratio_threshold: f64,
    pub min_consecutive_windows: usize,
    pub release_windows: usize,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            sample_rate: 10_000.0,
            window_seconds: 1.0,
            hop_seconds: 0.25,
            band_low: 4.0,
            band_high: 8.0,
            peak_target_low: 5.0,
            peak_target_high: 6.0,
            ratio_threshold: 0.5,
            min_consecutive_windows: 3,
            release_windows: 2,
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.sample_rate.is_finite() && self.sample_rate > 0.0) {
            return bad(format!("sample_rate must be positive, got {}", self.sample_rate));
        }
        if !(self.window_seconds > 0.0 && self.hop_seconds > 0.0 && self.hop_seconds <= self.window_seconds) {
            return bad(format!(
                "need 0 < hop_seconds <= window_seconds, got hop {} window {}",
                self.hop_seconds, self.window_seconds
            ));
        }
        if self.window_len() < 4 || self.hop_len() == 0 {
            return bad("window or hop is shorter than the sample period".into());
        }
        let nyquist = self.sample_rate / 2.0;
        if !(0.0 < self.band_low
            && self.band_low < self.peak_target_low
            && self.peak_target_low < self.peak_target_high
            && self.peak_target_high < self.band_high
            && self.band_high < nyquist)
        {
            return bad(format!(
                "need 0 < band_low < peak_target_low < peak_target_high < band_high < {nyquist}, got {} {} {} {}",
                self.band_low, self.peak_target_low, self.peak_target_high, self.band_high
            ));
        }
        if !(self.ratio_threshold > 0.0 && self.ratio_threshold < 1.0) {
            return bad(format!("ratio_threshold must lie in (0, 1), got {}", self.ratio_threshold));
        }
        if self.min_consecutive_windows == 0 || self.release_windows == 0 {
            return bad("min_consecutive_windows and release_windows must be >= 1".into());
        }
        Ok(())
    }

    pub fn window_len(&self) -> usize {
        (self.window_seconds * self.sample_rate).round() as usize
    }

    pub fn hop_len(&self) -> usize {
        (self.hop_seconds * self.sample_rate).round() as usize
    }
}
