use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A scalar quantity that varies with time (seconds).
pub type TimeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A capacitance term in farads, either fixed or a function of time.
#[derive(Clone)]
pub enum Capacitance {
    Constant(f64),
    Varying(TimeFn),
}

impl Capacitance {
    pub fn varying(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Capacitance::Varying(Arc::new(f))
    }

    pub fn at(&self, t: f64) -> f64 {
        match self {
            Capacitance::Constant(c) => *c,
            Capacitance::Varying(f) => f(t),
        }
    }
}

impl fmt::Debug for Capacitance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Capacitance::Constant(c) => write!(f, "Constant({c:e} F)"),
            Capacitance::Varying(_) => f.write_str("Varying(<fn>)"),
        }
    }
}

/// Capacitances of the body network.
///
/// `foot1`/`foot2` are the foot-to-ground capacitances while the foot rests on
/// the floor. Synthesis raises each foot's reciprocal capacitance by
/// `lift_depth * vertical_amplitude` (relative) when the foot is fully lifted.
#[derive(Clone, Debug)]
pub struct CapacitanceModel {
    pub foot1: Capacitance,
    pub foot2: Capacitance,
    pub room: Vec<Capacitance>,
    /// Body-to-plant-electrode capacitance.
    pub plant: f64,
    pub lift_depth: f64,
    /// Proportionality constant between `C_plant * d(1/C_B)/dt` and the foot current.
    pub k_prop: f64,
}

impl Default for CapacitanceModel {
    fn default() -> Self {
        Self {
            foot1: Capacitance::Constant(300e-12),
            foot2: Capacitance::Constant(300e-12),
            room: Vec::new(),
            plant: 1e-12,
            lift_depth: 1.0,
            k_prop: 1.0,
        }
    }
}

impl CapacitanceModel {
    pub fn with_feet(foot1: Capacitance, foot2: Capacitance) -> Self {
        Self {
            foot1,
            foot2,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.plant.is_finite() && self.plant > 0.0) {
            return Err(Error::Validation(format!(
                "plant capacitance must be positive, got {}",
                self.plant
            )));
        }
        if !(self.lift_depth.is_finite() && self.lift_depth >= 0.0) {
            return Err(Error::Validation(format!(
                "lift_depth must be non-negative, got {}",
                self.lift_depth
            )));
        }
        if !self.k_prop.is_finite() {
            return Err(Error::Validation("k_prop must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElectrodeModel {
    /// Permittivity of air, F/m.
    pub epsilon: f64,
    /// Equivalent area between body and plant, m².
    pub area: f64,
}

impl Default for ElectrodeModel {
    fn default() -> Self {
        Self {
            epsilon: 8.854e-12,
            area: 0.5,
        }
    }
}

impl ElectrodeModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::Validation(format!("epsilon must be > 0, got {}", self.epsilon)));
        }
        if !(self.area.is_finite() && self.area > 0.0) {
            return Err(Error::Validation(format!("area must be > 0, got {}", self.area)));
        }
        Ok(())
    }

    pub fn coupling(&self) -> f64 {
        self.epsilon * self.area
    }
}

/// One coordinate of a trajectory as a function of time.
#[derive(Clone)]
pub enum PathFn {
    Constant(f64),
    Linear { start: f64, rate: f64 },
    Custom(TimeFn),
}

impl PathFn {
    pub fn at(&self, t: f64) -> f64 {
        match self {
            PathFn::Constant(v) => *v,
            PathFn::Linear { start, rate } => start + rate * t,
            PathFn::Custom(f) => f(t),
        }
    }
}

impl fmt::Debug for PathFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathFn::Constant(v) => write!(f, "Constant({v})"),
            PathFn::Linear { start, rate } => write!(f, "Linear({start} + {rate}·t)"),
            PathFn::Custom(_) => f.write_str("Custom(<fn>)"),
        }
    }
}

/// Horizontal (`x`) and vertical (`y`) distance to the plant electrode, metres.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub x: PathFn,
    pub y: PathFn,
}

impl Trajectory {
    pub fn stationary(x: f64, y: f64) -> Self {
        Self {
            x: PathFn::Constant(x),
            y: PathFn::Constant(y),
        }
    }

    /// Straight walk along `x` at constant velocity (negative = towards the plant).
    pub fn straight(x_start: f64, velocity: f64, y: f64) -> Self {
        Self {
            x: PathFn::Linear {
                start: x_start,
                rate: velocity,
            },
            y: PathFn::Constant(y),
        }
    }

    pub fn position(&self, t: f64) -> (f64, f64) {
        (self.x.at(t), self.y.at(t))
    }

    pub fn radial_distance(&self, t: f64) -> f64 {
        let (x, y) = self.position(t);
        x.hypot(y)
    }
}

fn default_contact_sign() -> f64 {
    -1.0
}

fn default_detach_sign() -> f64 {
    1.0
}

fn default_duty_cycle() -> f64 {
    0.6
}

fn default_edge_time() -> f64 {
    0.05
}

/// Walking characteristics of one subject.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaitProfile {
    /// Footsteps per second (both feet).
    pub step_frequency: f64,
    /// m/s
    pub walking_speed: f64,
    pub vertical_amplitude: f64,
    #[serde(default = "default_contact_sign")]
    pub contact_charge_sign: f64,
    #[serde(default = "default_detach_sign")]
    pub detach_charge_sign: f64,
    /// Fraction of a foot's stride period spent on the ground.
    #[serde(default = "default_duty_cycle")]
    pub duty_cycle: f64,
    /// Duration of the raised-cosine contact/detach edges, seconds.
    #[serde(default = "default_edge_time")]
    pub edge_time: f64,
    /// Phase of foot 1's first contact as a fraction of the stride period.
    #[serde(default)]
    pub start_phase: f64,
}

impl Default for GaitProfile {
    fn default() -> Self {
        Self {
            step_frequency: 1.5,
            walking_speed: 1.2,
            vertical_amplitude: 1.0,
            contact_charge_sign: default_contact_sign(),
            detach_charge_sign: default_detach_sign(),
            duty_cycle: default_duty_cycle(),
            edge_time: default_edge_time(),
            start_phase: 0.0,
        }
    }
}

impl GaitProfile {
    /// Period of one foot's contact/lift cycle (two footsteps).
    pub fn stride_period(&self) -> f64 {
        2.0 / self.step_frequency
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::Validation(format!("gait profile: {msg}")));
        if !(self.step_frequency > 0.0 && self.step_frequency <= 10.0) {
            return invalid(format!("step_frequency {} outside (0, 10] Hz", self.step_frequency));
        }
        if !(self.walking_speed.is_finite() && self.walking_speed > 0.0) {
            return invalid(format!("walking_speed {} must be > 0", self.walking_speed));
        }
        if !(self.vertical_amplitude.is_finite() && self.vertical_amplitude >= 0.0) {
            return invalid(format!("vertical_amplitude {} must be >= 0", self.vertical_amplitude));
        }
        if !(self.duty_cycle > 0.0 && self.duty_cycle < 1.0) {
            return invalid(format!("duty_cycle {} outside (0, 1)", self.duty_cycle));
        }
        if !(self.contact_charge_sign * self.detach_charge_sign < 0.0) {
            return invalid("contact and detach charges must have opposite non-zero signs".into());
        }
        let period = self.stride_period();
        let shortest_phase = period * self.duty_cycle.min(1.0 - self.duty_cycle);
        if !(self.edge_time > 0.0 && self.edge_time < shortest_phase) {
            return invalid(format!(
                "edge_time {} must be in (0, {shortest_phase}) for this cadence and duty cycle",
                self.edge_time
            ));
        }
        if !(self.start_phase.is_finite()) {
            return invalid("start_phase must be finite".into());
        }
        Ok(())
    }

    /// The gait after applying a mood's multipliers.
    pub fn with_mood(&self, mood: Option<&MoodProfile>) -> GaitProfile {
        match mood {
            None => self.clone(),
            Some(m) => GaitProfile {
                step_frequency: self.step_frequency * m.step_frequency_factor,
                walking_speed: self.walking_speed * m.speed_factor,
                vertical_amplitude: self.vertical_amplitude * m.amplitude_factor,
                ..self.clone()
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mood {
    Happy,
    Sad,
}

impl Mood {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mood::Happy => "happy",
            Mood::Sad => "sad",
        }
    }
}

impl fmt::Display for Mood {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoodProfile {
    pub label: Mood,
    pub speed_factor: f64,
    pub amplitude_factor: f64,
    #[serde(default = "one")]
    pub step_frequency_factor: f64,
}

fn one() -> f64 {
    1.0
}

impl MoodProfile {
    pub fn happy() -> Self {
        Self {
            label: Mood::Happy,
            speed_factor: 1.25,
            amplitude_factor: 1.2,
            step_frequency_factor: 1.1,
        }
    }

    pub fn sad() -> Self {
        Self {
            label: Mood::Sad,
            speed_factor: 0.8,
            amplitude_factor: 0.8,
            step_frequency_factor: 0.9,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let factors = [self.speed_factor, self.amplitude_factor, self.step_frequency_factor];
        if factors.iter().any(|f| !(f.is_finite() && *f > 0.0)) {
            return Err(Error::Validation(format!(
                "mood '{}': factors must be positive",
                self.label
            )));
        }
        let ok = match self.label {
            Mood::Sad => self.speed_factor < 1.0 && self.amplitude_factor < 1.0,
            Mood::Happy => self.speed_factor >= 1.0 && self.amplitude_factor >= 1.0,
        };
        if !ok {
            return Err(Error::Validation(format!(
                "mood '{}': sad walking needs speed and amplitude factors < 1, happy walking >= 1",
                self.label
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gait_validation() {
        assert!(GaitProfile::default().validate().is_ok());
        let bad = [
            GaitProfile { step_frequency: 0.0, ..Default::default() },
            GaitProfile { step_frequency: 10.5, ..Default::default() },
            GaitProfile { duty_cycle: 1.0, ..Default::default() },
            GaitProfile { duty_cycle: 0.0, ..Default::default() },
            GaitProfile { contact_charge_sign: 1.0, ..Default::default() },
            GaitProfile { edge_time: 0.6, ..Default::default() },
            GaitProfile { walking_speed: -1.0, ..Default::default() },
        ];
        for g in bad {
            assert!(matches!(g.validate(), Err(Error::Validation(_))), "{g:?}");
        }
    }

    #[test]
    fn mood_constraints() {
        assert!(MoodProfile::happy().validate().is_ok());
        assert!(MoodProfile::sad().validate().is_ok());
        let wrong = MoodProfile { speed_factor: 1.1, ..MoodProfile::sad() };
        assert!(wrong.validate().is_err());
        let wrong = MoodProfile { amplitude_factor: 0.9, ..MoodProfile::happy() };
        assert!(wrong.validate().is_err());
    }

    #[test]
    fn mood_scales_gait() {
        let g = GaitProfile::default().with_mood(Some(&MoodProfile::sad()));
        assert!((g.walking_speed - 0.96).abs() < 1e-12);
        assert!((g.vertical_amplitude - 0.8).abs() < 1e-12);
        assert!((g.step_frequency - 1.35).abs() < 1e-12);
    }

    #[test]
    fn three_four_five() {
        assert_eq!(Trajectory::stationary(3.0, 4.0).radial_distance(12.0), 5.0);
        let t = Trajectory::straight(5.0, -1.0, 0.0);
        assert_eq!(t.position(2.0), (3.0, 0.0));
    }
}
