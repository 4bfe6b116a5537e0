//! Delay estimators working on sampled signals and carrier phases.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use thiserror::Error;

use crate::math;

/// Phase agreement required for a ToA candidate (rad).
pub const PHASE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SignalError {
    #[error("sample rate must be positive and finite, got {0} Hz")]
    InvalidSampleRate(f64),
    #[error("signal has no samples")]
    EmptySignal,
    #[error("sample rates differ: {0} Hz vs {1} Hz")]
    MismatchedSampleRates(f64, f64),
    #[error("chirp bandwidth and duration must be positive")]
    InvalidChirp,
    #[error("beat frequency must be non-negative, got {0} Hz")]
    NegativeBeat(f64),
    #[error("delay {delay} s is not shorter than the chirp duration {duration} s")]
    DelayExceedsChirp { delay: f64, duration: f64 },
    #[error("sample rate {fs} Hz does not exceed four times the beat frequency {beat} Hz")]
    UndersampledBeat { fs: f64, beat: f64 },
    #[error("no phase measurements given")]
    NoMeasurements,
    #[error("phase {0} rad is outside [0, 2π)")]
    InvalidPhase(f64),
    #[error("frequency must be positive and finite, got {0} Hz")]
    InvalidFrequency(f64),
    #[error("maximum ToA must be positive, got {0} s")]
    InvalidMaxToa(f64),
}

/// Real-valued samples at a fixed rate.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    sample_rate: f64,
    samples: Vec<f64>,
}

impl SampledSignal {
    pub fn new(sample_rate: f64, samples: Vec<f64>) -> Result<Self, SignalError> {
        if !(sample_rate > 0.0 && sample_rate.is_finite()) {
            return Err(SignalError::InvalidSampleRate(sample_rate));
        }
        if samples.is_empty() {
            return Err(SignalError::EmptySignal);
        }
        Ok(Self { sample_rate, samples })
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }
}

/// Delay of `b` relative to `a` (s) at the peak of their cross-correlation.
///
/// All integer lags are scanned. Equal peaks resolve to the smallest `|lag|`.
/// When `±lag` tie exactly, the sign follows the lexicographic order of the
/// two sample sequences, so swapping the inputs always negates the result.
pub fn xcorr_tdoa(a: &SampledSignal, b: &SampledSignal) -> Result<f64, SignalError> {
    if a.sample_rate != b.sample_rate {
        return Err(SignalError::MismatchedSampleRates(a.sample_rate, b.sample_rate));
    }
    let (xa, xb) = (&a.samples, &b.samples);
    let (na, nb) = (xa.len() as isize, xb.len() as isize);
    let positive_first = cmp_samples(xa, xb) != core::cmp::Ordering::Greater;
    let mut best: Option<(f64, isize)> = None;
    for lag in -(na - 1)..nb {
        // pairs a[n] · b[n + lag], ascending n
        let lo = 0.max(-lag);
        let hi = na.min(nb - lag);
        let c: f64 = (lo..hi).map(|n| xa[n as usize] * xb[(n + lag) as usize]).sum();
        let better = match best {
            None => true,
            Some((bc, bl)) => {
                c > bc || (c == bc && (lag.abs() < bl.abs() || (lag.abs() == bl.abs() && (lag > bl) == positive_first)))
            }
        };
        if better {
            best = Some((c, lag));
        }
    }
    let (_, lag) = best.ok_or(SignalError::EmptySignal)?;
    Ok(lag as f64 / a.sample_rate)
}

fn cmp_samples(a: &[f64], b: &[f64]) -> core::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or_else(|| a.len().cmp(&b.len()))
}

/// Linear FM chirp sweeping `bandwidth` Hz in `duration` seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChirpParams {
    bandwidth: f64,
    duration: f64,
    start_freq: f64,
}

impl ChirpParams {
    pub fn new(bandwidth: f64, duration: f64, start_freq: f64) -> Result<Self, SignalError> {
        let ok = bandwidth > 0.0 && duration > 0.0 && bandwidth.is_finite() && duration.is_finite();
        if !ok || !start_freq.is_finite() {
            return Err(SignalError::InvalidChirp);
        }
        Ok(Self { bandwidth, duration, start_freq })
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn start_freq(&self) -> f64 {
        self.start_freq
    }

    /// Sweep rate `B / T_c` (Hz/s).
    pub fn slope(&self) -> f64 {
        self.bandwidth / self.duration
    }
}

/// Delay difference implied by the beat tone of two mixed chirps.
pub fn chirp_beat_tdoa(beat_freq: f64, chirp: &ChirpParams) -> Result<f64, SignalError> {
    if !(beat_freq >= 0.0) {
        return Err(SignalError::NegativeBeat(beat_freq));
    }
    Ok(beat_freq * chirp.duration / chirp.bandwidth)
}

/// Low-pass output of mixing two unit chirps offset by `delta_t`.
///
/// The mixer is a quadrature (dechirp) mixer, so only the difference tone
/// survives; its real part is sampled at `fs` over the interval where both
/// chirps are present, then smoothed by a moving average with cutoff `B/10`.
pub fn simulate_mixed_chirps(chirp: &ChirpParams, delta_t: f64, fs: f64) -> Result<SampledSignal, SignalError> {
    if !(fs > 0.0 && fs.is_finite()) {
        return Err(SignalError::InvalidSampleRate(fs));
    }
    let lag = delta_t.abs();
    if !(lag < chirp.duration) {
        return Err(SignalError::DelayExceedsChirp { delay: delta_t, duration: chirp.duration });
    }
    let beat = chirp.slope() * lag;
    if !(fs > 4.0 * beat) {
        return Err(SignalError::UndersampledBeat { fs, beat });
    }

    let start = delta_t.max(0.0);
    let n = (math::floor((chirp.duration - lag) * fs) as usize).max(1);
    let k = chirp.slope();
    let offset = chirp.start_freq * delta_t - 0.5 * k * delta_t * delta_t;
    let mixed: Vec<f64> = (0..n)
        .map(|i| {
            let t = start + i as f64 / fs;
            // φ(t) − φ(t − Δt) in cycles, with the large constant wrapped first
            let cycles = offset - math::floor(offset) + k * delta_t * t;
            math::cos(TAU * (cycles - math::floor(cycles)))
        })
        .collect();

    let window = (math::round(fs / (chirp.bandwidth / 10.0)) as usize).max(1);
    SampledSignal::new(fs, moving_average(&mixed, window))
}

fn moving_average(x: &[f64], window: usize) -> Vec<f64> {
    if window <= 1 {
        return x.to_vec();
    }
    let mut out = Vec::with_capacity(x.len());
    let mut acc = 0.0;
    for (i, v) in x.iter().enumerate() {
        acc += v;
        if i >= window {
            acc -= x[i - window];
        }
        out.push(acc / (i + 1).min(window) as f64);
    }
    out
}

/// Strongest DFT bin of a real signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPeak {
    pub frequency: f64,
    /// Spacing of the DFT bins, `fs / n` (Hz).
    pub bin_width: f64,
    pub magnitude: f64,
}

/// Peak-picks the magnitude spectrum over bins `0..=n/2` (Goertzel per bin).
pub fn spectral_peak(signal: &SampledSignal) -> SpectralPeak {
    let x = &signal.samples;
    let n = x.len();
    let bin_width = signal.sample_rate / n as f64;
    let mut best = (0usize, -1.0f64);
    for k in 0..=n / 2 {
        let w = TAU * k as f64 / n as f64;
        let coeff = 2.0 * math::cos(w);
        let (mut s1, mut s2) = (0.0f64, 0.0f64);
        for &v in x {
            let s0 = v + coeff * s1 - s2;
            s2 = s1;
            s1 = s0;
        }
        let power = s1 * s1 + s2 * s2 - coeff * s1 * s2;
        if power > best.1 {
            best = (k, power);
        }
    }
    SpectralPeak {
        frequency: best.0 as f64 * bin_width,
        bin_width,
        magnitude: math::sqrt(best.1.max(0.0)),
    }
}

/// Carrier phase of the channel observed at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseMeasurement {
    frequency: f64,
    phase: f64,
}

impl PhaseMeasurement {
    pub fn new(frequency: f64, phase: f64) -> Result<Self, SignalError> {
        if !(frequency > 0.0 && frequency.is_finite()) {
            return Err(SignalError::InvalidFrequency(frequency));
        }
        if !(0.0..TAU).contains(&phase) {
            return Err(SignalError::InvalidPhase(phase));
        }
        Ok(Self { frequency, phase })
    }

    /// Phase accrued at `frequency` after a delay of `toa` seconds.
    pub fn synthesize(frequency: f64, toa: f64) -> Result<Self, SignalError> {
        Self::new(frequency, math::wrap_tau(TAU * frac(frequency * toa)))
    }

    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    fn residual(&self, toa: f64) -> f64 {
        math::wrap_pi(TAU * frac(self.frequency * toa) - self.phase)
    }
}

fn frac(x: f64) -> f64 {
    x - math::floor(x)
}

/// All delays in `[0, max_toa)` consistent with every measured phase.
///
/// The delay axis is scanned at a thousandth of the shortest carrier period;
/// each local minimum of the summed squared phase error is refined by
/// Gauss-Newton and kept when every phase agrees within [`PHASE_TOLERANCE`].
/// For commensurate carriers the survivors are spaced by the least common
/// multiple of the periods.
pub fn phase_toa_candidates(measurements: &[PhaseMeasurement], max_toa: f64) -> Result<Vec<f64>, SignalError> {
    if measurements.is_empty() {
        return Err(SignalError::NoMeasurements);
    }
    if !(max_toa > 0.0 && max_toa.is_finite()) {
        return Err(SignalError::InvalidMaxToa(max_toa));
    }
    let max_freq = measurements.iter().map(|m| m.frequency).fold(0.0, f64::max);
    let step = 1.0 / max_freq / 1000.0;
    let cost = |t: f64| -> f64 { measurements.iter().map(|m| math::sq(m.residual(t))).sum() };

    let n = math::ceil(max_toa / step) as usize;
    let mut out: Vec<f64> = Vec::new();
    let mut prev = f64::INFINITY;
    let mut cur = cost(0.0);
    for i in 0..=n {
        let next = cost((i + 1) as f64 * step);
        if cur <= prev && cur <= next {
            if let Some(t) = refine_toa(measurements, i as f64 * step, step) {
                if t < max_toa {
                    match out.last_mut() {
                        Some(last) if (t - *last).abs() < step / 2.0 => {
                            if cost(t) < cost(*last) {
                                *last = t;
                            }
                        }
                        _ => out.push(t),
                    }
                }
            }
        }
        prev = cur;
        cur = next;
    }
    Ok(out)
}

fn refine_toa(measurements: &[PhaseMeasurement], start: f64, step: f64) -> Option<f64> {
    let curvature: f64 = measurements.iter().map(|m| m.frequency * m.frequency).sum::<f64>() * TAU;
    let mut t = start;
    for _ in 0..50 {
        let grad: f64 = measurements.iter().map(|m| m.frequency * m.residual(t)).sum();
        let dt = grad / curvature;
        t -= dt;
        if dt.abs() <= 1e-24 + t.abs() * 1e-16 {
            break;
        }
    }
    if t < 0.0 {
        if t < -step {
            return None;
        }
        t = 0.0;
    }
    let consistent = measurements.iter().all(|m| m.residual(t).abs() <= PHASE_TOLERANCE);
    consistent.then_some(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sig(fs: f64, x: Vec<f64>) -> SampledSignal {
        SampledSignal::new(fs, x).unwrap()
    }

    fn burst(seed: u64, n: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    #[test]
    fn xcorr_integer_shift() {
        let a = burst(1, 200);
        let mut b = vec![0.0; 17];
        b.extend_from_slice(&a);
        let fs = 1e6;
        assert_eq!(xcorr_tdoa(&sig(fs, a.clone()), &sig(fs, b.clone())).unwrap(), 17.0 / fs);
        assert_eq!(xcorr_tdoa(&sig(fs, b), &sig(fs, a.clone())).unwrap(), -17.0 / fs);
        assert_eq!(xcorr_tdoa(&sig(fs, a.clone()), &sig(fs, a)).unwrap(), 0.0);
    }

    #[test]
    fn xcorr_noise_burst_delay() {
        // 3.2 µs at 10 MHz is 32 samples.
        let fs = 10e6;
        let pulse = burst(7, 64);
        let mut a = vec![0.0; 256];
        let mut b = vec![0.0; 256];
        a[40..104].copy_from_slice(&pulse);
        b[72..136].copy_from_slice(&pulse);
        let lag = xcorr_tdoa(&sig(fs, a), &sig(fs, b)).unwrap();
        assert!((lag - 3.2e-6).abs() <= 1.0 / fs);
    }

    #[test]
    fn xcorr_rejects_mixed_rates() {
        let r = xcorr_tdoa(&sig(1.0, vec![1.0]), &sig(2.0, vec![1.0]));
        assert_eq!(r, Err(SignalError::MismatchedSampleRates(1.0, 2.0)));
    }

    #[test]
    fn chirp_beat_arithmetic() {
        let c = ChirpParams::new(100e6, 1e-3, 28e9).unwrap();
        assert_eq!(chirp_beat_tdoa(0.0, &c).unwrap(), 0.0);
        assert!((chirp_beat_tdoa(100e3, &c).unwrap() - 1e-6).abs() < 1e-18);
        let c2 = ChirpParams::new(100e6, 2e-3, 28e9).unwrap();
        assert!((chirp_beat_tdoa(100e3, &c2).unwrap() - 2e-6).abs() < 1e-18);
        assert!(chirp_beat_tdoa(-1.0, &c).is_err());
    }

    #[test]
    fn mixed_chirp_tone() {
        let c = ChirpParams::new(100e6, 1e-3, 28e9).unwrap();
        let fs = 1e6;
        let flat = simulate_mixed_chirps(&c, 0.0, fs).unwrap();
        assert!(flat.samples().iter().all(|&v| (v - 1.0).abs() < 1e-12));

        let s = simulate_mixed_chirps(&c, 1e-6, fs).unwrap();
        let peak = spectral_peak(&s);
        assert!((peak.frequency - 100e3).abs() <= peak.bin_width, "{peak:?}");

        let neg = spectral_peak(&simulate_mixed_chirps(&c, -1e-6, fs).unwrap());
        assert_eq!(neg.frequency, peak.frequency);

        assert!(matches!(simulate_mixed_chirps(&c, 1e-3, fs), Err(SignalError::DelayExceedsChirp { .. })));
        assert!(matches!(simulate_mixed_chirps(&c, 5e-6, fs), Err(SignalError::UndersampledBeat { .. })));
    }

    #[test]
    fn moving_average_smooths() {
        assert_eq!(moving_average(&[1.0, 3.0, 5.0, 7.0], 2), vec![1.0, 2.0, 4.0, 6.0]);
    }

    /// Brute-force 1 ps scan for delays matching all phases.
    fn scan_oracle(ms: &[PhaseMeasurement], max_toa: f64) -> Vec<f64> {
        let steps = (max_toa / 1e-12).round() as usize;
        let mut hits: Vec<f64> = Vec::new();
        for i in 0..steps {
            let t = i as f64 * 1e-12;
            if ms.iter().all(|m| m.residual(t).abs() < 1e-3) && hits.last().is_none_or(|l| t - l > 1e-11) {
                hits.push(t);
            }
        }
        hits
    }

    #[test]
    fn single_carrier_candidates() {
        let m = [PhaseMeasurement::new(1e9, 0.0).unwrap()];
        let c = phase_toa_candidates(&m, 10e-9).unwrap();
        assert_eq!(c.len(), 10);
        for (k, t) in c.iter().enumerate() {
            assert!((t - k as f64 * 1e-9).abs() < 1e-15, "{t}");
        }
    }

    #[test]
    fn two_carrier_lcm_spacing() {
        let m = [PhaseMeasurement::new(1e9, 0.0).unwrap(), PhaseMeasurement::new(1.5e9, 0.0).unwrap()];
        let c = phase_toa_candidates(&m, 10e-9).unwrap();
        let oracle = scan_oracle(&m, 10e-9);
        assert_eq!(oracle.len(), 5);
        assert_eq!(c.len(), oracle.len());
        for (got, want) in c.iter().zip(&oracle) {
            assert!((got - want).abs() <= 1e-12);
        }
        for w in c.windows(2) {
            assert!((w[1] - w[0] - 2e-9).abs() < 1e-12);
        }
    }

    #[test]
    fn inconsistent_phases_have_no_candidate() {
        // At 1 GHz and 2 GHz, phase 0 forces t = k ns, where 2 GHz also reads 0.
        let m = [PhaseMeasurement::new(1e9, 0.0).unwrap(), PhaseMeasurement::new(2e9, 1.0).unwrap()];
        assert!(phase_toa_candidates(&m, 20e-9).unwrap().is_empty());
        assert_eq!(phase_toa_candidates(&[], 1.0), Err(SignalError::NoMeasurements));
    }

    #[test]
    fn offset_delay_is_recovered() {
        let toa = 3.217e-9;
        let m: Vec<_> = [1e9, 1.25e9].iter().map(|&f| PhaseMeasurement::synthesize(f, toa).unwrap()).collect();
        let c = phase_toa_candidates(&m, 20e-9).unwrap();
        // periods 1 ns and 0.8 ns, LCM 4 ns
        assert!(c.iter().any(|t| (t - toa).abs() < 1e-15));
        for w in c.windows(2) {
            assert!((w[1] - w[0] - 4e-9).abs() < 1e-12);
        }
        for t in &c {
            for mm in &m {
                assert!(mm.residual(*t).abs() <= PHASE_TOLERANCE);
            }
        }
    }
}
