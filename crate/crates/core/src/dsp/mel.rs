use crate::error::{Error, Result};

use super::mfcc::MfccConfig;

/// HTK-style mel scale: `2595 · log10(1 + f / 700)`.
pub fn hz_to_mel(f: f64) -> Result<f64> {
    if !(f >= 0.0) {
        return Err(Error::Domain(format!("frequency must be >= 0 Hz, got {f}")));
    }
    Ok(2595.0 * (1.0 + f / 700.0).log10())
}

pub fn mel_to_hz(m: f64) -> f64 {
    700.0 * (10f64.powf(m / 2595.0) - 1.0)
}

/// Triangular filters over the one-sided spectrum of a `window_size` frame.
#[derive(Clone, Debug, PartialEq)]
pub struct MelFilterbank {
    /// `n_filters` rows of `n_bins` weights.
    pub filters: Vec<Vec<f64>>,
    pub center_frequencies: Vec<f64>,
    /// Half-open bin range with non-zero weight for each filter.
    pub supports: Vec<(usize, usize)>,
}

impl MelFilterbank {
    pub fn n_filters(&self) -> usize {
        self.filters.len()
    }

    /// Energy collected by each filter from a one-sided power spectrum.
    pub fn apply(&self, spectrum: &[f64], out: &mut [f64]) {
        for ((w, &(lo, hi)), o) in self.filters.iter().zip(&self.supports).zip(out.iter_mut()) {
            *o = w[lo..hi].iter().zip(&spectrum[lo..hi]).map(|(a, b)| a * b).sum();
        }
    }
}

pub fn build_mel_filterbank(config: &MfccConfig) -> Result<MelFilterbank> {
    config.validate()?;
    let n_bins = config.window_size / 2 + 1;
    let bin_hz = config.sample_rate / config.window_size as f64;
    let mel_lo = hz_to_mel(config.fmin)?;
    let mel_hi = hz_to_mel(config.fmax())?;
    let n = config.n_mel_filters;
    let edges: Vec<f64> = (0..n + 2)
        .map(|i| mel_to_hz(mel_lo + (mel_hi - mel_lo) * i as f64 / (n + 1) as f64))
        .collect();

    let mut filters = Vec::with_capacity(n);
    let mut supports = Vec::with_capacity(n);
    for m in 0..n {
        let (left, center, right) = (edges[m], edges[m + 1], edges[m + 2]);
        let row: Vec<f64> = (0..n_bins)
            .map(|k| {
                let f = k as f64 * bin_hz;
                let rise = (f - left) / (center - left);
                let fall = (right - f) / (right - center);
                rise.min(fall).max(0.0)
            })
            .collect();
        let lo = row.iter().position(|w| *w > 0.0);
        let hi = row.iter().rposition(|w| *w > 0.0);
        match (lo, hi) {
            (Some(lo), Some(hi)) => supports.push((lo, hi + 1)),
            _ => {
                return Err(Error::Config(format!(
                    "mel filter {m} ({left:.2}–{right:.2} Hz) covers no spectrum bin at {bin_hz:.3} Hz resolution; \
                     reduce n_mel_filters or enlarge window_size"
                )))
            }
        }
        filters.push(row);
    }
    Ok(MelFilterbank {
        filters,
        center_frequencies: edges[1..=n].to_vec(),
        supports,
    })
}
