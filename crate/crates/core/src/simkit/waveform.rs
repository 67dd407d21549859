//! Modulation waveforms in `[0, 1]` applied to a foot's reciprocal capacitance.

use std::f64::consts::PI;

use super::types::GaitProfile;

/// Contact/lift schedule of one foot.
///
/// Returns the lifted fraction: 0 while the foot rests on the floor, 1 while it
/// is airborne, with raised-cosine edges of width `edge` centred on each
/// contact and detach instant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FootstepSchedule {
    pub stride_period: f64,
    pub duty_cycle: f64,
    pub edge: f64,
    /// Time of this foot's first contact.
    pub offset: f64,
}

impl FootstepSchedule {
    /// Schedules for both feet; the second foot lags by half a stride.
    pub fn for_gait(gait: &GaitProfile) -> [FootstepSchedule; 2] {
        let stride_period = gait.stride_period();
        let first = FootstepSchedule {
            stride_period,
            duty_cycle: gait.duty_cycle,
            edge: gait.edge_time,
            offset: gait.start_phase * stride_period,
        };
        let second = FootstepSchedule {
            offset: first.offset + stride_period / 2.0,
            ..first
        };
        [first, second]
    }

    pub fn lifted_fraction(&self, t: f64) -> f64 {
        let period = self.stride_period;
        let half = self.edge / 2.0;
        let detach = self.duty_cycle * period;
        let tau = (t - self.offset).rem_euclid(period);
        if tau < half {
            // contact edge, second half
            0.5 * (1.0 + (PI * (tau + half) / self.edge).cos())
        } else if tau > period - half {
            // contact edge, first half
            0.5 * (1.0 + (PI * (tau - (period - half)) / self.edge).cos())
        } else if (tau - detach).abs() < half {
            0.5 * (1.0 - (PI * (tau - (detach - half)) / self.edge).cos())
        } else if tau < detach {
            0.0
        } else {
            1.0
        }
    }
}

/// Seated leg shaking: silent before `onset`, then `(1 - cos(2π f (t - onset))) / 2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShakeSchedule {
    pub frequency: f64,
    pub onset: f64,
}

impl ShakeSchedule {
    pub fn lifted_fraction(&self, t: f64) -> f64 {
        if t < self.onset {
            0.0
        } else {
            0.5 * (1.0 - (2.0 * PI * self.frequency * (t - self.onset)).cos())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schedule() -> FootstepSchedule {
        FootstepSchedule {
            stride_period: 1.2,
            duty_cycle: 0.6,
            edge: 0.05,
            offset: 0.1,
        }
    }

    #[test]
    fn plateaus_and_edges() {
        let s = schedule();
        // mid-contact
        assert_eq!(s.lifted_fraction(0.1 + 0.3), 0.0);
        // mid-air
        assert_eq!(s.lifted_fraction(0.1 + 0.72 + 0.2), 1.0);
        // edge centres sit at one half
        assert!((s.lifted_fraction(0.1) - 0.5).abs() < 1e-12);
        assert!((s.lifted_fraction(0.1 + 0.72) - 0.5).abs() < 1e-12);
        assert!((s.lifted_fraction(0.1 + 1.2) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn continuous_and_bounded() {
        let s = schedule();
        let dt = 1e-4;
        let mut prev = s.lifted_fraction(0.0);
        for i in 1..40_000 {
            let v = s.lifted_fraction(i as f64 * dt);
            assert!((0.0..=1.0).contains(&v));
            assert!((v - prev).abs() < 0.01, "jump at {}", i as f64 * dt);
            prev = v;
        }
    }

    #[test]
    fn contact_lowers_and_detach_raises() {
        let s = schedule();
        let before = s.lifted_fraction(0.1 - 0.02);
        let after = s.lifted_fraction(0.1 + 0.02);
        assert!(after < before);
        let before = s.lifted_fraction(0.82 - 0.02);
        let after = s.lifted_fraction(0.82 + 0.02);
        assert!(after > before);
    }

    #[test]
    fn feet_alternate() {
        let g = GaitProfile { step_frequency: 2.0, ..GaitProfile::default() };
        let [a, b] = FootstepSchedule::for_gait(&g);
        assert_eq!(b.offset - a.offset, 0.5);
        assert_eq!(a.stride_period, 1.0);
    }

    #[test]
    fn shake_starts_silent() {
        let s = ShakeSchedule { frequency: 5.0, onset: 1.0 };
        assert_eq!(s.lifted_fraction(0.5), 0.0);
        assert_eq!(s.lifted_fraction(1.0), 0.0);
        assert!((s.lifted_fraction(1.1) - 1.0).abs() < 1e-12);
    }
}
