use esdgait::legshake::{detect_stream, DetectorConfig};
use esdgait::seed::rng_for;
use esdgait::simkit::{noise_std_for_snr, synth_legshake, CapacitanceModel, ElectrodeModel};
use rand::Rng;

fn shake(freq: f64, onset: f64, seed: u64) -> Vec<f64> {
    let cap = CapacitanceModel::default();
    let el = ElectrodeModel::default();
    let clean = synth_legshake(freq, 8.0, onset, &cap, &el, 0.0, seed).unwrap();
    let std = noise_std_for_snr(&clean.samples, 10.0);
    synth_legshake(freq, 8.0, onset, &cap, &el, std, seed).unwrap().samples
}

#[test]
fn onset_is_recovered_from_synthetic_shaking() {
    let config = DetectorConfig::default();
    let mut rng = rng_for(77, 0);
    for seed in 0..12 {
        let freq = rng.random_range(5.0..=6.0);
        let onset = rng.random_range(1.0..=5.0);
        let x = shake(freq, onset, seed);
        let events = detect_stream(x.chunks(4096), &config).unwrap();
        assert_eq!(events.len(), 1, "seed {seed} f {freq} onset {onset}: {events:?}");
        assert!((events[0].onset - onset).abs() <= 0.25, "seed {seed}: {onset} vs {:?}", events[0]);
    }
}

#[test]
fn flat_capacitance_gives_no_events() {
    let config = DetectorConfig::default();
    let reference = shake(5.5, 2.0, 0);
    let std = noise_std_for_snr(&reference, 10.0);
    let flat = CapacitanceModel { lift_depth: 0.0, ..CapacitanceModel::default() };
    for seed in 0..5 {
        let x = synth_legshake(5.5, 8.0, 2.0, &flat, &ElectrodeModel::default(), std, seed).unwrap();
        assert!(detect_stream([x.samples.as_slice()], &config).unwrap().is_empty());
    }
}
