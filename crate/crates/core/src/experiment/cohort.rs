use std::path::{Path, PathBuf};

use rand::seq::IndexedRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::seed::{derive_seed, rng_for};
use crate::simkit::{
    noise_std_for_snr, synth_legshake, synth_walk, write_manifest, write_record, Labels, ManifestEntry, Mood,
    SignalRecord, Trajectory,
};

use super::config::{Direction, ExperimentConfig, Task};

/// One synthesized record and the file stem it is written under.
#[derive(Clone, Debug)]
pub struct NamedRecord {
    pub name: String,
    pub record: SignalRecord,
}

struct WalkPlan {
    name: String,
    person: usize,
    mood: Option<Mood>,
    seed: u64,
}

fn plan_walks(config: &ExperimentConfig) -> Vec<WalkPlan> {
    let d = &config.dataset;
    let moods: Vec<Option<Mood>> = if d.moods.is_empty() {
        vec![None]
    } else {
        d.moods.iter().copied().map(Some).collect()
    };
    let mut plans = Vec::new();
    for (p, person) in d.persons.iter().enumerate() {
        for &mood in &moods {
            for i in 0..d.samples_per_cell {
                let tag = mood.map_or("none", |m| m.as_str());
                plans.push(WalkPlan {
                    name: format!("{}_{tag}_{i:03}", person.id),
                    person: p,
                    mood,
                    seed: derive_seed(config.seed, plans.len() as u64),
                });
            }
        }
    }
    plans
}

fn spread(rng: &mut impl Rng, half_width: f64) -> f64 {
    if half_width == 0.0 {
        1.0
    } else {
        1.0 + rng.random_range(-half_width..=half_width)
    }
}

fn synth_one(config: &ExperimentConfig, plan: &WalkPlan) -> Result<SignalRecord> {
    let d = &config.dataset;
    let j = &d.jitter;
    let mut rng = rng_for(plan.seed, 1);
    let mut gait = d.persons[plan.person].gait.clone();
    gait.step_frequency *= spread(&mut rng, j.step_frequency);
    gait.walking_speed *= spread(&mut rng, j.walking_speed);
    gait.vertical_amplitude *= spread(&mut rng, j.vertical_amplitude);
    gait.start_phase = rng.random_range(0.0..1.0);
    let duration = d.duration + if j.duration > 0.0 { rng.random_range(-j.duration..=j.duration) } else { 0.0 };
    let toward = match d.path.direction {
        Direction::Toward => true,
        Direction::Away => false,
        Direction::Random => rng.random_bool(0.5),
    };
    let [near, far] = d.path.start_distance;
    let x0 = if far > near { rng.random_range(near..=far) } else { near };
    let plant_type = d.plant_types.choose(&mut rng).expect("validated non-empty").clone();
    let location = d.locations.choose(&mut rng).expect("validated non-empty").clone();
    let noise_scale = spread(&mut rng, j.noise);

    let mood = plan.mood.map(|m| config.mood_profile(m));
    let span = duration * mood.as_ref().map_or(1.0, |m| m.speed_factor) * gait.walking_speed;
    let traj = if toward {
        Trajectory::straight(x0, -gait.walking_speed, d.path.vertical_offset)
    } else {
        Trajectory::straight(x0 - span, gait.walking_speed, d.path.vertical_offset)
    };
    let capmodel = d.capacitance.model();
    let labels = Labels {
        person_id: d.persons[plan.person].id.clone(),
        mood: None,
        plant_type,
        location,
        activity: "walk".into(),
    };
    let walk = |noise_std: f64| {
        synth_walk(&gait, mood.as_ref(), &traj, &capmodel, &d.electrode, duration, noise_std, plan.seed, labels.clone())
    };
    let noise_std = match (d.noise_std, d.snr_db) {
        (Some(s), _) => s * noise_scale,
        (None, Some(snr)) => noise_std_for_snr(&walk(0.0)?.samples, snr) * noise_scale,
        (None, None) => 0.0,
    };
    walk(noise_std).map_err(|e| Error::Validation(format!("record {}: {e}", plan.name)))
}

/// Synthesize every record the config describes, in a fixed order.
pub fn synthesize(config: &ExperimentConfig) -> Result<Vec<NamedRecord>> {
    config.validate()?;
    match config.task {
        Task::Legshake => synthesize_legshake(config),
        Task::IdentifyPerson | Task::ClassifyMood => plan_walks(config)
            .par_iter()
            .map(|plan| Ok(NamedRecord { name: plan.name.clone(), record: synth_one(config, plan)? }))
            .collect(),
    }
}

fn synthesize_legshake(config: &ExperimentConfig) -> Result<Vec<NamedRecord>> {
    let l = &config.legshake;
    let capmodel = config.dataset.capacitance.model();
    let electrode = &config.dataset.electrode;
    let draw = |rng: &mut rand_chacha::ChaCha8Rng, [lo, hi]: [f64; 2]| {
        if hi > lo {
            rng.random_range(lo..=hi)
        } else {
            lo
        }
    };
    let shake = (0..l.shake_records).into_par_iter().map(|i| {
        let seed = derive_seed(config.seed, (1 << 32) | i as u64);
        let mut rng = rng_for(seed, 1);
        let freq = draw(&mut rng, l.frequency);
        let onset = draw(&mut rng, l.onset);
        let clean = synth_legshake(freq, l.duration, onset, &capmodel, electrode, 0.0, seed)?;
        let std = noise_std_for_snr(&clean.samples, l.snr_db);
        let record = synth_legshake(freq, l.duration, onset, &capmodel, electrode, std, seed)?;
        Ok(NamedRecord { name: format!("shake_{i:03}"), record })
    });
    let reference = synth_legshake(
        0.5 * (l.frequency[0] + l.frequency[1]),
        l.duration,
        l.onset[0],
        &capmodel,
        electrode,
        0.0,
        config.seed,
    )?;
    let rest_std = noise_std_for_snr(&reference.samples, l.snr_db);
    let still = crate::simkit::CapacitanceModel { lift_depth: 0.0, ..capmodel.clone() };
    let rest = (0..l.noise_records).into_par_iter().map(|i| {
        let seed = derive_seed(config.seed, (2 << 32) | i as u64);
        let mut record = synth_legshake(l.frequency[0], l.duration, 0.0, &still, electrode, rest_std, seed)?;
        record.labels.activity = "rest".into();
        record.generator_params["kind"] = "rest".into();
        record.generator_params.as_object_mut().map(|m| m.remove("onset_s"));
        record.generator_params.as_object_mut().map(|m| m.remove("shake_frequency_hz"));
        Ok(NamedRecord { name: format!("rest_{i:03}"), record })
    });
    let mut out: Vec<NamedRecord> = shake.collect::<Result<_>>()?;
    out.extend(rest.collect::<Result<Vec<_>>>()?);
    Ok(out)
}

/// Write every record and `dataset.json` into `dir`; returns the manifest path.
pub fn write_dataset(dir: &Path, records: &[NamedRecord]) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let entries: Vec<ManifestEntry> = records
        .par_iter()
        .map(|r| write_record(dir, &r.name, &r.record))
        .collect::<Result<_>>()?;
    let manifest = dir.join("dataset.json");
    write_manifest(&manifest, &entries)?;
    Ok(manifest)
}
