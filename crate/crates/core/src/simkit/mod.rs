//! Synthetic electrostatic-discharge signals.
//!
//! A walking or seated body is modelled as a capacitor network: each foot
//! couples to the floor (`C_f1`, `C_f2`), the body couples to nearby objects
//! (`C_r,i`) and to the plant electrode (`C_plant`). Foot motion modulates the
//! reciprocal body capacitance, whose time derivative drives a current that is
//! scaled by the electrode geometry and the subject's distance to the plant.

mod coupling;
mod record;
mod synth;
mod types;
mod waveform;

pub use coupling::{foot_motion_current, induced_current, reciprocal_body_capacitance, Interval};
pub use record::{read_manifest, read_record, write_manifest, write_record, Labels, ManifestEntry, SignalRecord};
pub use synth::{noise_std_for_snr, synth_legshake, synth_walk, DEFAULT_SEAT, SAMPLE_RATE};
pub use types::{
    Capacitance, CapacitanceModel, ElectrodeModel, GaitProfile, Mood, MoodProfile, PathFn, TimeFn,
    Trajectory,
};
pub use waveform::{FootstepSchedule, ShakeSchedule};
