use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::config::DetectorConfig;
use super::spectrum::BandAnalyzer;

/// A detected shaking episode. `offset` is `None` while the episode is open.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShakeEvent {
    pub onset: f64,
    pub offset: Option<f64>,
    pub peak_frequency: f64,
    pub mean_band_ratio: f64,
}

/// Emitted as soon as an event opens, and again when it closes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum DetectorUpdate {
    Open(ShakeEvent),
    Close(ShakeEvent),
}

impl DetectorUpdate {
    pub fn event(&self) -> &ShakeEvent {
        match self {
            DetectorUpdate::Open(e) | DetectorUpdate::Close(e) => e,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("update serializes")
    }
}

#[derive(Default)]
struct Tally {
    windows: usize,
    ratio_sum: f64,
    peak_sum: f64,
}

impl Tally {
    fn add(&mut self, ratio: f64, peak: f64) {
        self.windows += 1;
        self.ratio_sum += ratio;
        self.peak_sum += peak;
    }

    fn fill(&self, event: &mut ShakeEvent) {
        event.mean_band_ratio = self.ratio_sum / self.windows as f64;
        event.peak_frequency = self.peak_sum / self.windows as f64;
    }
}

struct Run {
    onset: f64,
    tally: Tally,
}

struct Active {
    event: ShakeEvent,
    tally: Tally,
    misses: usize,
    first_miss_start: f64,
}

/// Single-stream detector. Feed samples in order with [`Detector::push`].
pub struct Detector {
    config: DetectorConfig,
    analyzer: BandAnalyzer,
    window_len: usize,
    hop_len: usize,
    ring: VecDeque<f64>,
    scratch: Vec<f64>,
    received: u64,
    next_eval: u64,
    run: Option<Run>,
    active: Option<Active>,
    closed: Vec<ShakeEvent>,
    last_offset: f64,
}

impl Detector {
    pub fn new(config: &DetectorConfig) -> Result<Self> {
        let analyzer = BandAnalyzer::new(config)?;
        let window_len = config.window_len();
        Ok(Self {
            config: config.clone(),
            analyzer,
            window_len,
            hop_len: config.hop_len(),
            ring: VecDeque::with_capacity(window_len + 1),
            scratch: Vec::with_capacity(window_len),
            received: 0,
            next_eval: window_len as u64,
            run: None,
            active: None,
            closed: Vec::new(),
            last_offset: f64::NEG_INFINITY,
        })
    }

    pub fn config(&self) -> &DetectorConfig {
        &self.config
    }

    /// Index of the next sample the detector expects.
    pub fn position(&self) -> u64 {
        self.received
    }

    /// Append a chunk whose first sample has index `start`. The chunk must
    /// begin exactly where the previous one ended.
    pub fn push_at(&mut self, start: u64, samples: &[f64]) -> Result<Vec<DetectorUpdate>> {
        if start != self.received {
            let kind = if start < self.received { "overlaps or precedes" } else { "leaves a gap after" };
            return Err(Error::Stream(format!(
                "chunk starting at sample {start} {kind} the stream position {}",
                self.received
            )));
        }
        self.push(samples)
    }

    /// Append the next chunk of samples.
    pub fn push(&mut self, samples: &[f64]) -> Result<Vec<DetectorUpdate>> {
        if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::Stream(format!("non-finite sample at index {}", self.received + i as u64)));
        }
        let mut updates = Vec::new();
        for &x in samples {
            self.ring.push_back(x);
            if self.ring.len() > self.window_len {
                self.ring.pop_front();
            }
            self.received += 1;
            if self.received == self.next_eval {
                self.next_eval += self.hop_len as u64;
                if let Some(u) = self.evaluate()? {
                    updates.push(u);
                }
            }
        }
        Ok(updates)
    }

    /// Events so far: closed ones, then the open one if any.
    pub fn events(&self) -> Vec<ShakeEvent> {
        let mut out = self.closed.clone();
        out.extend(self.active.as_ref().map(|a| a.event.clone()));
        out
    }

    fn evaluate(&mut self) -> Result<Option<DetectorUpdate>> {
        let fs = self.config.sample_rate;
        let window_start = (self.received - self.window_len as u64) as f64 / fs;
        self.scratch.clear();
        self.scratch.extend(self.ring.iter());
        let (ratio, peak) = self.analyzer.analyze(&self.scratch)?;
        let hit = ratio >= self.config.ratio_threshold
            && (self.config.peak_target_low..=self.config.peak_target_high).contains(&peak);

        if let Some(active) = &mut self.active {
            if hit {
                active.misses = 0;
                active.tally.add(ratio, peak);
                return Ok(None);
            }
            if active.misses == 0 {
                active.first_miss_start = window_start;
            }
            active.misses += 1;
            if active.misses < self.config.release_windows {
                return Ok(None);
            }
            let mut active = self.active.take().expect("checked above");
            let shortest = active.event.onset + self.config.min_consecutive_windows as f64 * self.config.hop_seconds;
            let offset = active.first_miss_start.max(shortest);
            active.event.offset = Some(offset);
            active.tally.fill(&mut active.event);
            self.last_offset = offset;
            self.closed.push(active.event.clone());
            return Ok(Some(DetectorUpdate::Close(active.event)));
        }

        if !hit {
            self.run = None;
            return Ok(None);
        }
        let run = self.run.get_or_insert_with(|| Run {
            onset: (window_start + refine_onset(&self.scratch, fs, self.config.band_low, self.config.band_high)).max(self.last_offset),
            tally: Tally::default(),
        });
        run.tally.add(ratio, peak);
        if run.tally.windows < self.config.min_consecutive_windows {
            return Ok(None);
        }
        let run = self.run.take().expect("run exists");
        let mut event = ShakeEvent {
            onset: run.onset,
            offset: None,
            peak_frequency: 0.0,
            mean_band_ratio: 0.0,
        };
        run.tally.fill(&mut event);
        self.active = Some(Active {
            event: event.clone(),
            tally: run.tally,
            misses: 0,
            first_miss_start: 0.0,
        });
        Ok(Some(DetectorUpdate::Open(event)))
    }
}

/// Seconds from the window start to the most likely rise in signal energy.
///
/// The window is low-passed with a boxcar, then split where a two-segment
/// constant-variance model fits best. Returns 0 unless the later segment is
/// clearly louder.
fn refine_onset(window: &[f64], fs: f64, band_low: f64, band_high: f64) -> f64 {
    let n = window.len();
    let width = ((fs / (4.0 * band_high)).round() as usize).clamp(1, n / 4);
    let mean = window.iter().sum::<f64>() / n as f64;
    let mut acc = 0.0;
    let mut smooth = Vec::with_capacity(n);
    for i in 0..n {
        acc += window[i] - mean;
        if i >= width {
            acc -= window[i - width] - mean;
        }
        smooth.push(acc / width.min(i + 1) as f64);
    }
    // delay of the causal boxcar
    let lag = (width - 1) / 2;

    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    for v in &smooth {
        prefix.push(prefix.last().unwrap() + v * v);
    }
    let total = prefix[n];
    let floor = total / n as f64 * 1e-12 + f64::MIN_POSITIVE;
    let margin = ((fs / (2.0 * band_low)).round() as usize).max(width).min(n / 4);
    let mut best: Option<(f64, usize)> = None;
    for (tau, &head) in prefix.iter().enumerate().take(n.saturating_sub(margin)).skip(margin) {
        let v1 = (head / tau as f64).max(floor);
        let v2 = ((total - head) / (n - tau) as f64).max(floor);
        let cost = tau as f64 * v1.ln() + (n - tau) as f64 * v2.ln();
        if best.is_none_or(|(c, _)| cost < c) {
            best = Some((cost, tau));
        }
    }
    let Some((_, tau)) = best else { return 0.0 };
    let v1 = prefix[tau] / tau as f64;
    let v2 = (total - prefix[tau]) / (n - tau) as f64;
    if v2 > 4.0 * v1 {
        tau.saturating_sub(lag) as f64 / fs
    } else {
        0.0
    }
}

/// Run a fresh detector over `chunks` and return every event, the last one
/// possibly open.
pub fn detect_stream<'a>(
    chunks: impl IntoIterator<Item = &'a [f64]>,
    config: &DetectorConfig,
) -> Result<Vec<ShakeEvent>> {
    let mut detector = Detector::new(config)?;
    for chunk in chunks {
        detector.push(chunk)?;
    }
    Ok(detector.events())
}
