use rand_distr::{Distribution, Normal};
use serde_json::json;

use crate::error::{Error, Result};
use crate::seed::rng_for;

use super::coupling::{foot_motion_current, induced_current, Interval};
use super::record::{Labels, SignalRecord};
use super::types::{Capacitance, CapacitanceModel, ElectrodeModel, GaitProfile, MoodProfile, Trajectory};
use super::waveform::{FootstepSchedule, ShakeSchedule};

/// Sampling rate of every synthesized record, Hz.
pub const SAMPLE_RATE: f64 = 10_000.0;

/// Seated subject position `(x, y)` in metres used for leg-shake records.
pub const DEFAULT_SEAT: (f64, f64) = (0.8, 0.4);

/// Raise a foot's reciprocal capacitance by `gain · m(t)` (relative).
fn modulate(base: &Capacitance, gain: f64, m: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Capacitance {
    if gain == 0.0 {
        return base.clone();
    }
    let base = base.clone();
    Capacitance::varying(move |t| base.at(t) / (1.0 + gain * m(t)))
}

fn check_common(duration: f64, noise_std: f64) -> Result<usize> {
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::Validation(format!("duration must be > 0, got {duration}")));
    }
    if !(noise_std.is_finite() && noise_std >= 0.0) {
        return Err(Error::Validation(format!("noise_std must be >= 0, got {noise_std}")));
    }
    let grid = (duration * SAMPLE_RATE).round() as usize;
    if grid < 3 {
        return Err(Error::Validation(format!("duration {duration} s is shorter than three samples")));
    }
    Ok(grid)
}

/// Evaluate the electrode current on the sample grid `n / fs` for
/// `n = 1 .. grid - 2`; the two boundary points have no central difference.
fn render(
    model: &CapacitanceModel,
    traj: &Trajectory,
    electrode: &ElectrodeModel,
    grid: usize,
    time_scale: f64,
) -> Result<Vec<f64>> {
    let step = 1.0 / SAMPLE_RATE;
    let domain = Interval::new(0.0, (grid - 1) as f64 * step);
    (1..grid - 1)
        .map(|n| {
            let t = n as f64 * step;
            induced_current(
                traj,
                electrode,
                |_| foot_motion_current(model, t, step, domain),
                t * time_scale,
            )
        })
        .collect()
}

fn add_noise(samples: &mut [f64], noise_std: f64, seed: u64) {
    if noise_std == 0.0 {
        return;
    }
    let normal = Normal::new(0.0, noise_std).expect("validated noise std");
    let mut rng = rng_for(seed, 0);
    for s in samples.iter_mut() {
        *s += normal.sample(&mut rng);
    }
}

fn capmodel_params(model: &CapacitanceModel) -> serde_json::Value {
    json!({
        "foot1_f": model.foot1.at(0.0),
        "foot2_f": model.foot2.at(0.0),
        "room_terms": model.room.len(),
        "plant_f": model.plant,
        "lift_depth": model.lift_depth,
        "k_prop": model.k_prop,
    })
}

/// Synthesize one walking record.
///
/// The mood (if any) scales cadence, lift amplitude and walking speed; the
/// trajectory is traversed `speed_factor` times faster. Deterministic in `seed`.
#[allow(clippy::too_many_arguments)]
pub fn synth_walk(
    gait: &GaitProfile,
    mood: Option<&MoodProfile>,
    traj: &Trajectory,
    capmodel: &CapacitanceModel,
    electrode: &ElectrodeModel,
    duration: f64,
    noise_std: f64,
    seed: u64,
    labels: Labels,
) -> Result<SignalRecord> {
    gait.validate()?;
    if let Some(m) = mood {
        m.validate()?;
    }
    capmodel.validate()?;
    electrode.validate()?;
    let grid = check_common(duration, noise_std)?;

    let effective = gait.with_mood(mood);
    effective.validate()?;
    let gain = capmodel.lift_depth * effective.vertical_amplitude;
    let contact_lowers = effective.contact_charge_sign < 0.0;
    let [left, right] = FootstepSchedule::for_gait(&effective);
    let foot = |s: FootstepSchedule| {
        move |t: f64| {
            let lifted = s.lifted_fraction(t);
            if contact_lowers {
                lifted
            } else {
                1.0 - lifted
            }
        }
    };
    let model = CapacitanceModel {
        foot1: modulate(&capmodel.foot1, gain, foot(left)),
        foot2: modulate(&capmodel.foot2, gain, foot(right)),
        ..capmodel.clone()
    };

    let time_scale = mood.map_or(1.0, |m| m.speed_factor);
    let mut samples = render(&model, traj, electrode, grid, time_scale)?;
    add_noise(&mut samples, noise_std, seed);

    let mut labels = labels;
    labels.mood = mood.map(|m| m.label.to_string());
    if labels.activity.is_empty() {
        labels.activity = "walk".into();
    }
    let generator_params = json!({
        "kind": "walk",
        "gait": effective,
        "mood": mood,
        "trajectory": format!("{traj:?}"),
        "capacitance": capmodel_params(capmodel),
        "electrode": electrode,
        "duration_s": duration,
        "noise_std": noise_std,
    });
    Ok(SignalRecord {
        samples,
        sample_rate: SAMPLE_RATE,
        labels,
        seed,
        generator_params,
    })
}

/// Synthesize a seated subject who starts shaking one leg at `onset`.
///
/// The subject stays at [`DEFAULT_SEAT`]; only foot 1's capacitance is
/// modulated, with depth `capmodel.lift_depth`.
pub fn synth_legshake(
    shake_frequency: f64,
    duration: f64,
    onset: f64,
    capmodel: &CapacitanceModel,
    electrode: &ElectrodeModel,
    noise_std: f64,
    seed: u64,
) -> Result<SignalRecord> {
    if !(3.0..=10.0).contains(&shake_frequency) {
        return Err(Error::Validation(format!(
            "shake_frequency {shake_frequency} Hz outside [3, 10]"
        )));
    }
    let grid = check_common(duration, noise_std)?;
    if !(onset >= 0.0 && onset < duration) {
        return Err(Error::Validation(format!(
            "onset {onset} s must lie in [0, duration = {duration})"
        )));
    }
    capmodel.validate()?;
    electrode.validate()?;

    let shake = ShakeSchedule {
        frequency: shake_frequency,
        onset,
    };
    let model = CapacitanceModel {
        foot1: modulate(&capmodel.foot1, capmodel.lift_depth, move |t| shake.lifted_fraction(t)),
        ..capmodel.clone()
    };
    let seat = Trajectory::stationary(DEFAULT_SEAT.0, DEFAULT_SEAT.1);
    let mut samples = render(&model, &seat, electrode, grid, 1.0)?;
    add_noise(&mut samples, noise_std, seed);

    let labels = Labels {
        person_id: "seated".into(),
        mood: None,
        plant_type: String::new(),
        location: String::new(),
        activity: "legshake".into(),
    };
    let generator_params = json!({
        "kind": "legshake",
        "shake_frequency_hz": shake_frequency,
        "onset_s": onset,
        "duration_s": duration,
        "capacitance": capmodel_params(capmodel),
        "electrode": electrode,
        "noise_std": noise_std,
    });
    Ok(SignalRecord {
        samples,
        sample_rate: SAMPLE_RATE,
        labels,
        seed,
        generator_params,
    })
}

/// Noise standard deviation giving `snr_db` relative to the mean power of `clean`.
pub fn noise_std_for_snr(clean: &[f64], snr_db: f64) -> f64 {
    if clean.is_empty() {
        return 0.0;
    }
    let power = clean.iter().map(|x| x * x).sum::<f64>() / clean.len() as f64;
    (power / 10f64.powf(snr_db / 10.0)).sqrt()
}
