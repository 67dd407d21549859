use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dsp::MfccConfig;
use crate::error::{Error, Result};
use crate::forest::{ForestParams, ParamSpace};
use crate::io::read_to_string;
use crate::legshake::DetectorConfig;
use crate::simkit::{CapacitanceModel, ElectrodeModel, GaitProfile, Mood, MoodProfile};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    IdentifyPerson,
    ClassifyMood,
    Legshake,
}

impl Task {
    /// Name of the label column written to `features.csv`.
    pub fn label_column(self) -> &'static str {
        match self {
            Task::IdentifyPerson => "person_id",
            Task::ClassifyMood => "mood",
            Task::Legshake => "activity",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PersonSpec {
    pub id: String,
    #[serde(flatten)]
    pub gait: GaitProfile,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Toward,
    Away,
    Random,
}

/// Per-record random perturbations, as relative half-widths unless noted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Jitter {
    pub step_frequency: f64,
    pub walking_speed: f64,
    pub vertical_amplitude: f64,
    /// Absolute half-width, seconds.
    pub duration: f64,
    /// Relative half-width applied to the noise level.
    pub noise: f64,
}

impl Default for Jitter {
    fn default() -> Self {
        Self {
            step_frequency: 0.03,
            walking_speed: 0.05,
            vertical_amplitude: 0.1,
            duration: 0.2,
            noise: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathSpec {
    /// Range of distances, metres, at which a walk toward the plant starts.
    pub start_distance: [f64; 2],
    /// Constant vertical offset, metres.
    pub vertical_offset: f64,
    pub direction: Direction,
}

impl Default for PathSpec {
    fn default() -> Self {
        Self {
            start_distance: [3.0, 5.0],
            vertical_offset: 0.5,
            direction: Direction::Random,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetConfig {
    pub persons: Vec<PersonSpec>,
    /// Mood labels to cross with every person; empty means no mood.
    pub moods: Vec<Mood>,
    /// Overrides for the built-in happy/sad profiles.
    pub mood_profiles: Vec<MoodProfile>,
    pub samples_per_cell: usize,
    pub duration: f64,
    /// Absolute noise level; exclusive with `snr_db`.
    pub noise_std: Option<f64>,
    /// Noise level relative to each record's clean power.
    pub snr_db: Option<f64>,
    pub plant_types: Vec<String>,
    pub locations: Vec<String>,
    pub jitter: Jitter,
    pub path: PathSpec,
    pub capacitance: CapacitanceSpec,
    pub electrode: ElectrodeModel,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        Self {
            persons: Vec::new(),
            moods: Vec::new(),
            mood_profiles: Vec::new(),
            samples_per_cell: 10,
            duration: 3.0,
            noise_std: None,
            snr_db: Some(10.0),
            plant_types: vec!["unknown".into()],
            locations: vec!["unknown".into()],
            jitter: Jitter::default(),
            path: PathSpec::default(),
            capacitance: CapacitanceSpec::default(),
            electrode: ElectrodeModel::default(),
        }
    }
}

/// Constant-valued capacitance network, farads.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CapacitanceSpec {
    pub foot: f64,
    pub room: Vec<f64>,
    pub plant: f64,
    pub lift_depth: f64,
    pub k_prop: f64,
}

impl Default for CapacitanceSpec {
    fn default() -> Self {
        let m = CapacitanceModel::default();
        Self {
            foot: m.foot1.at(0.0),
            room: Vec::new(),
            plant: m.plant,
            lift_depth: m.lift_depth,
            k_prop: m.k_prop,
        }
    }
}

impl CapacitanceSpec {
    pub fn model(&self) -> CapacitanceModel {
        use crate::simkit::Capacitance;
        CapacitanceModel {
            foot1: Capacitance::Constant(self.foot),
            foot2: Capacitance::Constant(self.foot),
            room: self.room.iter().map(|&c| Capacitance::Constant(c)).collect(),
            plant: self.plant,
            lift_depth: self.lift_depth,
            k_prop: self.k_prop,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LegshakeDatasetConfig {
    pub shake_records: usize,
    pub noise_records: usize,
    pub frequency: [f64; 2],
    pub onset: [f64; 2],
    pub duration: f64,
    pub snr_db: f64,
    /// Largest onset error, seconds, that still counts as a hit.
    pub onset_tolerance: f64,
}

impl Default for LegshakeDatasetConfig {
    fn default() -> Self {
        Self {
            shake_records: 50,
            noise_records: 50,
            frequency: [5.0, 6.0],
            onset: [1.0, 5.0],
            duration: 8.0,
            snr_db: 10.0,
            onset_tolerance: 0.25,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluationConfig {
    pub k_folds: usize,
    pub include_categoricals: bool,
    /// When set, `eval` also scores a stratified holdout of this fraction.
    pub holdout_fraction: Option<f64>,
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        Self {
            k_folds: 10,
            include_categoricals: false,
            holdout_fraction: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchConfig {
    pub n_iter: usize,
    #[serde(default)]
    pub space: ParamSpace,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub task: Task,
    #[serde(default)]
    pub dataset: DatasetConfig,
    #[serde(default)]
    pub legshake: LegshakeDatasetConfig,
    #[serde(default)]
    pub mfcc: MfccConfig,
    /// `seed` inside this table is ignored; the top-level seed is used.
    #[serde(default)]
    pub forest: ForestParams,
    #[serde(default)]
    pub search: Option<SearchConfig>,
    #[serde(default)]
    pub evaluation: EvaluationConfig,
    #[serde(default)]
    pub detector: DetectorConfig,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = read_to_string(path)?;
        Self::from_toml(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Forest parameters with the experiment seed applied.
    pub fn forest_params(&self) -> ForestParams {
        ForestParams { seed: self.seed, ..self.forest.clone() }
    }

    /// Resolve a mood label to its profile, preferring configured overrides.
    pub fn mood_profile(&self, mood: Mood) -> MoodProfile {
        self.dataset
            .mood_profiles
            .iter()
            .find(|m| m.label == mood)
            .cloned()
            .unwrap_or_else(|| match mood {
                Mood::Happy => MoodProfile::happy(),
                Mood::Sad => MoodProfile::sad(),
            })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        self.mfcc.validate()?;
        self.forest.validate()?;
        self.detector.validate()?;
        if let Some(search) = &self.search {
            search.space.validate()?;
            if search.n_iter == 0 {
                return bad("search.n_iter must be >= 1".into());
            }
        }
        if self.evaluation.k_folds < 2 {
            return bad("evaluation.k_folds must be >= 2".into());
        }
        if let Some(f) = self.evaluation.holdout_fraction {
            if !(f > 0.0 && f < 1.0) {
                return bad(format!("evaluation.holdout_fraction {f} not in (0, 1)"));
            }
        }
        match self.task {
            Task::Legshake => self.validate_legshake(),
            Task::IdentifyPerson | Task::ClassifyMood => self.validate_walks(),
        }
    }

    fn validate_walks(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        let d = &self.dataset;
        if d.persons.is_empty() {
            return bad("dataset.persons is empty".into());
        }
        let mut ids = BTreeSet::new();
        for p in &d.persons {
            if p.id.is_empty() || !p.id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
                return bad(format!("person id {:?} must be non-empty [A-Za-z0-9_-]", p.id));
            }
            if !ids.insert(&p.id) {
                return bad(format!("duplicate person id {:?}", p.id));
            }
            p.gait.validate()?;
        }
        let moods: BTreeSet<Mood> = d.moods.iter().copied().collect();
        if moods.len() != d.moods.len() {
            return bad("dataset.moods lists a mood twice".into());
        }
        for &m in &d.moods {
            let profile = self.mood_profile(m);
            profile.validate()?;
            for p in &d.persons {
                p.gait.with_mood(Some(&profile)).validate()?;
            }
        }
        match self.task {
            Task::IdentifyPerson if d.persons.len() < 2 => return bad("identify_person needs >= 2 persons".into()),
            Task::ClassifyMood if d.moods.len() < 2 => return bad("classify_mood needs >= 2 moods".into()),
            _ => {}
        }
        if d.samples_per_cell == 0 {
            return bad("dataset.samples_per_cell must be >= 1".into());
        }
        match (d.noise_std, d.snr_db) {
            (Some(_), Some(_)) => return bad("set only one of dataset.noise_std and dataset.snr_db".into()),
            (None, None) => return bad("set dataset.noise_std or dataset.snr_db".into()),
            (Some(s), None) if !(s.is_finite() && s >= 0.0) => return bad(format!("noise_std {s} must be >= 0")),
            (None, Some(s)) if !s.is_finite() => return bad(format!("snr_db {s} must be finite")),
            _ => {}
        }
        if d.plant_types.is_empty() || d.locations.is_empty() {
            return bad("dataset.plant_types and dataset.locations need at least one entry".into());
        }
        let j = &d.jitter;
        for (name, v) in [
            ("step_frequency", j.step_frequency),
            ("walking_speed", j.walking_speed),
            ("vertical_amplitude", j.vertical_amplitude),
            ("noise", j.noise),
        ] {
            if !(0.0..1.0).contains(&v) {
                return bad(format!("dataset.jitter.{name} {v} not in [0, 1)"));
            }
        }
        if !(j.duration >= 0.0 && d.duration - j.duration > 0.0) {
            return bad(format!("duration {} must exceed its jitter {}", d.duration, j.duration));
        }
        let [near, far] = d.path.start_distance;
        if !(near.is_finite() && far >= near) {
            return bad(format!("dataset.path.start_distance [{near}, {far}] is not a range"));
        }
        if !(d.path.vertical_offset > 0.0) {
            return bad("dataset.path.vertical_offset must be > 0".into());
        }
        d.capacitance.model().validate()?;
        d.electrode.validate()
    }

    fn validate_legshake(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        let l = &self.legshake;
        if l.shake_records + l.noise_records == 0 {
            return bad("legshake needs at least one record".into());
        }
        let [f0, f1] = l.frequency;
        if !(3.0 <= f0 && f0 <= f1 && f1 <= 10.0) {
            return bad(format!("legshake.frequency [{f0}, {f1}] must lie within [3, 10]"));
        }
        let [o0, o1] = l.onset;
        if !(0.0 <= o0 && o0 <= o1 && o1 < l.duration) {
            return bad(format!("legshake.onset [{o0}, {o1}] must lie within [0, duration)"));
        }
        if !(l.onset_tolerance > 0.0 && l.snr_db.is_finite()) {
            return bad("legshake.onset_tolerance must be > 0 and snr_db finite".into());
        }
        self.dataset.capacitance.model().validate()?;
        self.dataset.electrode.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        seed = 7
        task = "identify_person"
        [[dataset.persons]]
        id = "a"
        step_frequency = 1.0
        walking_speed = 1.1
        vertical_amplitude = 1.0
        [[dataset.persons]]
        id = "b"
        step_frequency = 1.3
        walking_speed = 1.3
        vertical_amplitude = 0.9
        duty_cycle = 0.55
    "#;

    #[test]
    fn minimal_config_round_trips() {
        let c = ExperimentConfig::from_toml(MINIMAL).unwrap();
        c.validate().unwrap();
        assert_eq!(c.dataset.persons[1].gait.duty_cycle, 0.55);
        assert_eq!(c.forest_params().seed, 7);
        assert_eq!(ExperimentConfig::from_toml(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn invalid_configs() {
        let mut c = ExperimentConfig::from_toml(MINIMAL).unwrap();
        c.dataset.samples_per_cell = 0;
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::from_toml(MINIMAL).unwrap();
        c.dataset.persons[1].id = "a".into();
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::from_toml(MINIMAL).unwrap();
        c.task = Task::ClassifyMood;
        assert!(c.validate().is_err());
        assert!(ExperimentConfig::from_toml("seed = 1\ntask = \"dance\"").is_err());
        assert!(ExperimentConfig::from_toml("task = \"legshake\"").is_err());
    }
}
