use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::dsp::WindowFunction;
use crate::error::{Error, Result};

use super::config::DetectorConfig;

const ZERO_PAD: usize = 4;

/// Reusable band-power analyzer for one window length.
pub struct BandAnalyzer {
    config: DetectorConfig,
    taper: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
    buf: Vec<Complex<f64>>,
    power: Vec<f64>,
}

impl BandAnalyzer {
    pub fn new(config: &DetectorConfig) -> Result<Self> {
        config.validate()?;
        let n = config.window_len();
        let nfft = n * ZERO_PAD;
        Ok(Self {
            config: config.clone(),
            taper: WindowFunction::Hann.coefficients(n),
            fft: FftPlanner::new().plan_fft_forward(nfft),
            buf: vec![Complex::default(); nfft],
            power: vec![0.0; nfft / 2 + 1],
        })
    }

    /// Returns `(ratio, peak_frequency)` for one window of samples.
    pub fn analyze(&mut self, window: &[f64]) -> Result<(f64, f64)> {
        let n = self.taper.len();
        if window.len() != n {
            return Err(Error::Validation(format!("window has {} samples, expected {n}", window.len())));
        }
        let mean = window.iter().sum::<f64>() / n as f64;
        let var = window.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        if !var.is_finite() {
            return Err(Error::Validation("non-finite sample in window".into()));
        }
        if var == 0.0 {
            return Ok((0.0, 0.0));
        }
        for (slot, (x, w)) in self.buf.iter_mut().zip(window.iter().zip(&self.taper)) {
            *slot = Complex::new((x - mean) * w, 0.0);
        }
        self.buf[n..].fill(Complex::default());
        self.fft.process(&mut self.buf);
        for (p, c) in self.power.iter_mut().zip(&self.buf) {
            *p = c.norm_sqr();
        }

        let df = self.config.sample_rate / self.buf.len() as f64;
        let lo = (self.config.band_low / df).ceil() as usize;
        let hi = ((self.config.band_high / df).floor() as usize).min(self.power.len() - 1);
        let total: f64 = self.power[1..].iter().sum();
        if total <= 0.0 {
            return Ok((0.0, 0.0));
        }
        let band: f64 = self.power[lo..=hi].iter().sum();
        let peak = (lo..=hi)
            .max_by(|&a, &b| self.power[a].total_cmp(&self.power[b]))
            .expect("band holds at least one bin");
        let freq = (peak as f64 + self.vertex_offset(peak)) * df;
        Ok((band / total, freq.clamp(self.config.band_low, self.config.band_high)))
    }

    /// Parabolic peak offset in bins, fitted to log power.
    fn vertex_offset(&self, k: usize) -> f64 {
        if k == 0 || k + 1 >= self.power.len() {
            return 0.0;
        }
        let ln = |i: usize| self.power[i].max(f64::MIN_POSITIVE).ln();
        let (a, b, c) = (ln(k - 1), ln(k), ln(k + 1));
        let denom = a - 2.0 * b + c;
        if denom >= 0.0 {
            return 0.0;
        }
        (0.5 * (a - c) / denom).clamp(-0.5, 0.5)
    }
}

pub fn band_ratio(window: &[f64], config: &DetectorConfig) -> Result<(f64, f64)> {
    BandAnalyzer::new(config)?.analyze(window)
}
