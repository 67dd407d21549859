use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::legshake::{detect_stream, DetectorConfig, ShakeEvent};
use crate::simkit::SignalRecord;

/// Event-level detection quality over a labelled set of records.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionScore {
    pub shake_records: usize,
    pub other_records: usize,
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Events raised on records without shaking.
    pub events_on_other_records: usize,
    /// Onset error of each true positive, seconds.
    pub onset_errors: Vec<f64>,
}

/// Ground-truth onset for synthesized shake records.
pub fn true_onset(record: &SignalRecord) -> Option<f64> {
    if record.labels.activity != "legshake" {
        return None;
    }
    record.generator_params.get("onset_s")?.as_f64()
}

/// Run the detector on every record. A shake record is a hit when one of its
/// events starts within `tolerance` of the true onset; every other event is a
/// false positive.
pub fn score_detection(records: &[SignalRecord], config: &DetectorConfig, tolerance: f64) -> Result<DetectionScore> {
    let events: Vec<Vec<ShakeEvent>> = records
        .par_iter()
        .map(|r| detect_stream([r.samples.as_slice()], config))
        .collect::<Result<_>>()?;
    let mut score = DetectionScore {
        shake_records: 0,
        other_records: 0,
        true_positives: 0,
        false_positives: 0,
        false_negatives: 0,
        precision: 0.0,
        recall: 0.0,
        f1: 0.0,
        events_on_other_records: 0,
        onset_errors: Vec::new(),
    };
    for (record, events) in records.iter().zip(&events) {
        match true_onset(record) {
            Some(onset) => {
                score.shake_records += 1;
                match events.iter().map(|e| (e.onset - onset).abs()).find(|err| *err <= tolerance) {
                    Some(err) => {
                        score.true_positives += 1;
                        score.false_positives += events.len() - 1;
                        score.onset_errors.push(err);
                    }
                    None => {
                        score.false_negatives += 1;
                        score.false_positives += events.len();
                    }
                }
            }
            None => {
                score.other_records += 1;
                score.false_positives += events.len();
                score.events_on_other_records += events.len();
            }
        }
    }
    let (tp, fp, fn_) = (score.true_positives as f64, score.false_positives as f64, score.false_negatives as f64);
    score.precision = if tp + fp > 0.0 { tp / (tp + fp) } else { 1.0 };
    score.recall = if tp + fn_ > 0.0 { tp / (tp + fn_) } else { 1.0 };
    score.f1 = if tp + fp + fn_ > 0.0 { 2.0 * tp / (2.0 * tp + fp + fn_) } else { 1.0 };
    Ok(score)
}
