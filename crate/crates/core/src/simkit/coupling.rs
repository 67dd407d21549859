use crate::error::{Error, Result};

use super::types::{CapacitanceModel, ElectrodeModel, Trajectory};

/// Closed time interval on which a model is defined.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub start: f64,
    pub end: f64,
}

impl Interval {
    pub fn new(start: f64, end: f64) -> Self {
        Self { start, end }
    }
}

fn positive_reciprocal(term: &str, c: f64, t: f64) -> Result<f64> {
    if c.is_finite() && c > 0.0 {
        Ok(1.0 / c)
    } else {
        Err(Error::Domain(format!(
            "{term} capacitance must be positive and finite, got {c} F at t = {t} s"
        )))
    }
}

/// `1/C_B(t) = 1/C_f1(t) + 1/C_f2(t) + Σ 1/C_r,i(t)`, in F⁻¹.
pub fn reciprocal_body_capacitance(model: &CapacitanceModel, t: f64) -> Result<f64> {
    let mut sum = positive_reciprocal("foot1", model.foot1.at(t), t)?;
    sum += positive_reciprocal("foot2", model.foot2.at(t), t)?;
    for (i, c) in model.room.iter().enumerate() {
        sum += positive_reciprocal(&format!("room[{i}]"), c.at(t), t)?;
    }
    Ok(sum)
}

/// Current induced by foot motion alone: `k_prop · C_plant · d/dt(1/C_B)`.
///
/// The derivative is a central difference with the given `step`; `t` must be
/// at least one step away from both ends of `domain`.
pub fn foot_motion_current(
    model: &CapacitanceModel,
    t: f64,
    step: f64,
    domain: Interval,
) -> Result<f64> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Validation(format!("finite-difference step must be > 0, got {step}")));
    }
    let slack = step * 1e-6;
    if t - step < domain.start - slack || t + step > domain.end + slack {
        return Err(Error::Boundary {
            t,
            step,
            start: domain.start,
            end: domain.end,
        });
    }
    let ahead = reciprocal_body_capacitance(model, t + step)?;
    let behind = reciprocal_body_capacitance(model, t - step)?;
    Ok(model.k_prop * model.plant * (ahead - behind) / (2.0 * step))
}

/// Electrode current `ε·S / r(t) · I(t)` with `r` the radial distance to the plant.
pub fn induced_current(
    traj: &Trajectory,
    electrode: &ElectrodeModel,
    foot_current: impl Fn(f64) -> Result<f64>,
    t: f64,
) -> Result<f64> {
    let r = traj.radial_distance(t);
    if r == 0.0 || !r.is_finite() {
        return Err(Error::Singularity { t });
    }
    Ok(electrode.coupling() / r * foot_current(t)?)
}
