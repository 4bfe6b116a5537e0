use std::f64::consts::{PI, TAU};

use mmloc_core::signal::{
    chirp_beat_tdoa, phase_toa_candidates, simulate_mixed_chirps, spectral_peak, xcorr_tdoa, ChirpParams,
    PhaseMeasurement, SampledSignal, PHASE_TOLERANCE,
};
use proptest::prelude::*;

fn signal(fs: f64, x: Vec<f64>) -> SampledSignal {
    SampledSignal::new(fs, x).unwrap()
}

/// Either continuous samples or small integers, which make exact ties common.
fn samples() -> impl Strategy<Value = Vec<f64>> {
    prop_oneof![
        prop::collection::vec(-1.0..1.0f64, 1..40),
        prop::collection::vec((-2i8..=2).prop_map(f64::from), 1..12),
    ]
}

fn phase_residual(m: &PhaseMeasurement, toa: f64) -> f64 {
    let x = m.frequency() * toa;
    let r = TAU * (x - x.floor()) - m.phase();
    (r + PI).rem_euclid(TAU) - PI
}

proptest! {
    #[test]
    fn xcorr_is_antisymmetric(a in samples(), b in samples(), fs in 1.0..1e6f64) {
        let ab = xcorr_tdoa(&signal(fs, a.clone()), &signal(fs, b.clone())).unwrap();
        let ba = xcorr_tdoa(&signal(fs, b), &signal(fs, a)).unwrap();
        prop_assert_eq!(ab, -ba);
    }

    #[test]
    fn xcorr_recovers_integer_shifts(a in prop::collection::vec(-1.0..1.0f64, 16..64), k in 0usize..30) {
        let fs = 1e6;
        let mut b = vec![0.0; k];
        b.extend(&a);
        prop_assert_eq!(xcorr_tdoa(&signal(fs, a.clone()), &signal(fs, b.clone())).unwrap(), k as f64 / fs);
        prop_assert_eq!(xcorr_tdoa(&signal(fs, b), &signal(fs, a)).unwrap(), -(k as f64) / fs);
    }

    #[test]
    fn phase_candidates_are_consistent_and_periodic(k1 in 10u32..40, k3 in 10u32..40, toa in 0.0..50e-9f64) {
        // carriers on a 100 MHz raster with coprime multipliers k1, k1 + 1:
        // their periods share a 10 ns least common multiple
        let base = 100e6;
        let freqs = [k1, k1 + 1, k3].map(|k| f64::from(k) * base);
        let ms: Vec<PhaseMeasurement> = freqs.iter().map(|&f| PhaseMeasurement::synthesize(f, toa).unwrap()).collect();
        let max_toa = 50e-9;
        let lcm = 1.0 / base;
        let cands = phase_toa_candidates(&ms, max_toa).unwrap();

        for &c in &cands {
            prop_assert!((0.0..max_toa).contains(&c));
            for m in &ms {
                prop_assert!(phase_residual(m, c).abs() <= PHASE_TOLERANCE);
            }
        }
        let expected = max_toa / lcm;
        prop_assert!((cands.len() as f64 - expected).abs() <= 1.0, "{} candidates", cands.len());
        for w in cands.windows(2) {
            prop_assert!((w[1] - w[0] - lcm).abs() <= 1e-12);
        }
        let folded = toa.rem_euclid(lcm);
        prop_assert!(cands.iter().any(|c| (c.rem_euclid(lcm) - folded).abs() <= 1e-12
            || (c.rem_euclid(lcm) - folded).abs() >= lcm - 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn chirp_beat_is_within_one_bin(bw_mhz in 50.0..200.0f64, delay_us in 1.0..40.0f64) {
        let chirp = ChirpParams::new(bw_mhz * 1e6, 1e-3, 28e9).unwrap();
        let fs = 1e6;
        let dt = delay_us * 1e-9 * 10.0;
        let beat = simulate_mixed_chirps(&chirp, dt, fs).unwrap();
        let peak = spectral_peak(&beat);
        let est = chirp_beat_tdoa(peak.frequency, &chirp).unwrap();
        let bin = peak.bin_width * chirp.duration() / chirp.bandwidth();
        prop_assert!((est - dt).abs() <= bin, "{est} vs {dt} (bin {bin})");
    }
}
