use crate::error::{Error, Result};
use crate::simkit::SignalRecord;

/// Trim every record to the shortest length, removing samples evenly from
/// both ends (an odd excess loses the extra sample at the end).
pub fn trim_to_common_length(records: Vec<SignalRecord>) -> Result<Vec<SignalRecord>> {
    let target = records
        .iter()
        .map(SignalRecord::len)
        .min()
        .ok_or_else(|| Error::Validation("cannot trim an empty record list".into()))?;
    Ok(records
        .into_iter()
        .map(|mut r| {
            let excess = r.samples.len() - target;
            let front = excess / 2;
            r.samples.truncate(front + target);
            r.samples.drain(..front);
            r
        })
        .collect())
}

/// Standardize to zero mean and unit population variance.
pub fn z_transform(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.len() < 2 {
        return Err(Error::DegenerateSignal(format!(
            "need at least 2 samples, got {}",
            samples.len()
        )));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let std = var.sqrt();
    let peak = samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if !std.is_finite() || std <= 1e-12 * peak || std == 0.0 {
        return Err(Error::DegenerateSignal("zero variance".into()));
    }
    Ok(samples.iter().map(|v| (v - mean) / std).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simkit::Labels;
    use proptest::prelude::*;

    fn rec(samples: Vec<f64>) -> SignalRecord {
        SignalRecord {
            samples,
            sample_rate: 10_000.0,
            labels: Labels { person_id: "x".into(), ..Labels::default() },
            seed: 0,
            generator_params: serde_json::Value::Null,
        }
    }

    fn ramp(n: usize) -> Vec<f64> {
        (0..n).map(|i| i as f64).collect()
    }

    #[test]
    fn trim_examples() {
        let same = trim_to_common_length(vec![rec(ramp(10)), rec(ramp(10)), rec(ramp(10))]).unwrap();
        assert!(same.iter().all(|r| r.samples == ramp(10)));

        let even = trim_to_common_length(vec![rec(ramp(12)), rec(ramp(10))]).unwrap();
        assert_eq!(even[0].samples, (1..11).map(|i| i as f64).collect::<Vec<_>>());
        assert_eq!(even[1].samples, ramp(10));

        let odd = trim_to_common_length(vec![rec(ramp(13)), rec(ramp(10))]).unwrap();
        // one from the start, two from the end
        assert_eq!(odd[0].samples.first(), Some(&1.0));
        assert_eq!(odd[0].samples.last(), Some(&10.0));
        assert_eq!(odd[0].samples.len(), 10);
        assert_eq!(odd[0].labels.person_id, "x");

        assert!(matches!(trim_to_common_length(vec![]), Err(Error::Validation(_))));
    }

    #[test]
    fn z_examples() {
        let z = z_transform(&[1.0, 2.0, 3.0]).unwrap();
        let a = (1.5f64).sqrt();
        for (got, want) in z.iter().zip([-a, 0.0, a]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!(matches!(z_transform(&[5.0, 5.0, 5.0]), Err(Error::DegenerateSignal(_))));
        assert!(z_transform(&[1.0]).is_err());
    }

    fn moments(v: &[f64]) -> (f64, f64) {
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        (mean, v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n)
    }

    proptest! {
        #[test]
        fn standardized_moments(xs in prop::collection::vec(-1e3f64..1e3, 2..300)) {
            prop_assume!(moments(&xs).1 > 1e-6);
            let z = z_transform(&xs).unwrap();
            let (mean, var) = moments(&z);
            prop_assert!(mean.abs() < 1e-9);
            prop_assert!((var - 1.0).abs() < 1e-9);
            let zz = z_transform(&z).unwrap();
            for (a, b) in z.iter().zip(&zz) {
                prop_assert!((a - b).abs() < 1e-9);
            }
        }

        #[test]
        fn affine_invariance(xs in prop::collection::vec(-10f64..10.0, 2..100), a in 0.01f64..100.0, b in -50f64..50.0) {
            prop_assume!(moments(&xs).1 > 1e-3);
            let z = z_transform(&xs).unwrap();
            let shifted: Vec<f64> = xs.iter().map(|x| a * x + b).collect();
            let zs = z_transform(&shifted).unwrap();
            for (p, q) in z.iter().zip(&zs) {
                prop_assert!((p - q).abs() < 1e-8);
            }
        }

        #[test]
        fn trimmed_lengths_are_minimum(lens in prop::collection::vec(1usize..60, 1..8)) {
            let records: Vec<_> = lens.iter().map(|n| rec(ramp(*n))).collect();
            let min = *lens.iter().min().unwrap();
            let out = trim_to_common_length(records).unwrap();
            for (r, n) in out.iter().zip(&lens) {
                prop_assert_eq!(r.samples.len(), min);
                prop_assert_eq!(r.samples[0], ((n - min) / 2) as f64);
            }
        }
    }
}
