use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

use super::mel::{build_mel_filterbank, MelFilterbank};

/// Filter energies are clamped here before the logarithm.
pub const LOG_FLOOR: f64 = 1e-10;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowFunction {
    #[default]
    Hann,
    Hamming,
    Rectangular,
}

impl WindowFunction {
    /// Periodic window coefficients of length `n`.
    pub fn coefficients(self, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| {
                let phase = 2.0 * PI * i as f64 / n as f64;
                match self {
                    WindowFunction::Hann => 0.5 - 0.5 * phase.cos(),
                    WindowFunction::Hamming => 0.54 - 0.46 * phase.cos(),
                    WindowFunction::Rectangular => 1.0,
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MfccConfig {
    pub sample_rate: f64,
    pub n_mfcc: usize,
    pub window_size: usize,
    pub hop_length: usize,
    pub magnitude_exponent: f64,
    pub n_mel_filters: usize,
    pub fmin: f64,
    /// Defaults to the Nyquist frequency.
    pub fmax: Option<f64>,
    pub window_function: WindowFunction,
}

impl Default for MfccConfig {
    fn default() -> Self {
        Self {
            sample_rate: 10_000.0,
            n_mfcc: 20,
            window_size: 2500,
            hop_length: 1250,
            magnitude_exponent: 2.0,
            n_mel_filters: 40,
            fmin: 0.0,
            fmax: None,
            window_function: WindowFunction::Hann,
        }
    }
}

impl MfccConfig {
    pub fn fmax(&self) -> f64 {
        self.fmax.unwrap_or(self.sample_rate / 2.0)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(format!("mfcc: {m}")));
        if !(self.sample_rate.is_finite() && self.sample_rate > 0.0) {
            return bad(format!("sample_rate {} must be > 0", self.sample_rate));
        }
        if self.hop_length == 0 || self.window_size < self.hop_length {
            return bad(format!(
                "need window_size ({}) >= hop_length ({}) > 0",
                self.window_size, self.hop_length
            ));
        }
        if self.n_mfcc == 0 || self.n_mfcc > self.n_mel_filters {
            return bad(format!(
                "need 0 < n_mfcc ({}) <= n_mel_filters ({})",
                self.n_mfcc, self.n_mel_filters
            ));
        }
        let fmax = self.fmax();
        if !(self.fmin >= 0.0 && self.fmin < fmax && fmax <= self.sample_rate / 2.0) {
            return bad(format!(
                "need 0 <= fmin ({}) < fmax ({fmax}) <= sample_rate/2",
                self.fmin
            ));
        }
        if !(self.magnitude_exponent.is_finite() && self.magnitude_exponent > 0.0) {
            return bad(format!("magnitude_exponent {} must be > 0", self.magnitude_exponent));
        }
        Ok(())
    }

    /// Number of frames for a signal of `len` samples (no padding, tail dropped).
    pub fn n_frames(&self, len: usize) -> usize {
        if len < self.window_size {
            0
        } else {
            (len - self.window_size) / self.hop_length + 1
        }
    }

    /// Hex SHA-256 of the resolved configuration; used to pair models with features.
    pub fn fingerprint(&self) -> String {
        let resolved = MfccConfig {
            fmax: Some(self.fmax()),
            ..self.clone()
        };
        let canonical = serde_json::to_string(&resolved).expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}

/// `n_mfcc × n_frames` coefficients, stored coefficient-major.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix {
    pub n_coefficients: usize,
    pub n_frames: usize,
    pub coefficients: Vec<f64>,
    /// Centre of each frame, seconds.
    pub frame_times: Vec<f64>,
}

impl FeatureMatrix {
    pub fn get(&self, coefficient: usize, frame: usize) -> f64 {
        self.coefficients[coefficient * self.n_frames + frame]
    }

    pub fn row(&self, coefficient: usize) -> &[f64] {
        &self.coefficients[coefficient * self.n_frames..(coefficient + 1) * self.n_frames]
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n_coefficients, self.n_frames)
    }
}

/// Orthonormal DCT-II basis, `rows × size`.
pub fn dct_matrix(rows: usize, size: usize) -> Vec<Vec<f64>> {
    let n = size as f64;
    (0..rows)
        .map(|k| {
            let scale = if k == 0 { (1.0 / n).sqrt() } else { (2.0 / n).sqrt() };
            (0..size)
                .map(|m| scale * (PI * k as f64 * (2 * m + 1) as f64 / (2.0 * n)).cos())
                .collect()
        })
        .collect()
}

/// Reusable MFCC pipeline: window, FFT, filterbank and DCT are built once.
pub struct MfccExtractor {
    config: MfccConfig,
    window: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
    filterbank: MelFilterbank,
    dct: Vec<Vec<f64>>,
}

impl std::fmt::Debug for MfccExtractor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MfccExtractor").field("config", &self.config).finish_non_exhaustive()
    }
}

impl MfccExtractor {
    pub fn new(config: MfccConfig) -> Result<Self> {
        let filterbank = build_mel_filterbank(&config)?;
        let fft = FftPlanner::new().plan_fft_forward(config.window_size);
        Ok(Self {
            window: config.window_function.coefficients(config.window_size),
            dct: dct_matrix(config.n_mfcc, config.n_mel_filters),
            config,
            fft,
            filterbank,
        })
    }

    pub fn config(&self) -> &MfccConfig {
        &self.config
    }

    pub fn filterbank(&self) -> &MelFilterbank {
        &self.filterbank
    }

    pub fn extract(&self, samples: &[f64]) -> Result<FeatureMatrix> {
        let cfg = &self.config;
        if samples.len() < cfg.window_size {
            return Err(Error::TooShort {
                len: samples.len(),
                required: cfg.window_size,
            });
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("samples must be finite".into()));
        }
        let n_frames = cfg.n_frames(samples.len());
        let n_bins = cfg.window_size / 2 + 1;
        let mut coefficients = vec![0.0; cfg.n_mfcc * n_frames];
        let mut buf = vec![Complex::new(0.0, 0.0); cfg.window_size];
        let mut scratch = vec![Complex::new(0.0, 0.0); self.fft.get_inplace_scratch_len()];
        let mut spectrum = vec![0.0; n_bins];
        let mut energies = vec![0.0; cfg.n_mel_filters];

        for frame in 0..n_frames {
            let start = frame * cfg.hop_length;
            for ((b, x), w) in buf.iter_mut().zip(&samples[start..start + cfg.window_size]).zip(&self.window) {
                *b = Complex::new(x * w, 0.0);
            }
            self.fft.process_with_scratch(&mut buf, &mut scratch);
            for (s, c) in spectrum.iter_mut().zip(&buf[..n_bins]) {
                *s = if cfg.magnitude_exponent == 2.0 {
                    c.norm_sqr()
                } else {
                    c.norm().powf(cfg.magnitude_exponent)
                };
            }
            self.filterbank.apply(&spectrum, &mut energies);
            for e in energies.iter_mut() {
                *e = e.max(LOG_FLOOR).ln();
            }
            for (k, basis) in self.dct.iter().enumerate() {
                coefficients[k * n_frames + frame] = basis.iter().zip(&energies).map(|(a, b)| a * b).sum();
            }
        }

        let frame_times = (0..n_frames)
            .map(|f| (f * cfg.hop_length) as f64 / cfg.sample_rate + cfg.window_size as f64 / (2.0 * cfg.sample_rate))
            .collect();
        Ok(FeatureMatrix {
            n_coefficients: cfg.n_mfcc,
            n_frames,
            coefficients,
            frame_times,
        })
    }
}

/// One-shot MFCC extraction; prefer [`MfccExtractor`] for batches.
pub fn mfcc(samples: &[f64], config: &MfccConfig) -> Result<FeatureMatrix> {
    MfccExtractor::new(config.clone())?.extract(samples)
}
