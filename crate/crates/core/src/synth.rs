//! Deterministic test signals.

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{FifError, Result};
use crate::fourier::Transform;
use crate::group::{GroupSpec, Signal};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tone {
    pub freq: f64,
    pub amplitude: f64,
    pub phase: f64,
}

impl Tone {
    pub fn new(freq: f64, amplitude: f64) -> Self {
        Self { freq, amplitude, phase: 0.0 }
    }
}

/// Linear chirp `A sin(2 pi (f0 t + (f1 - f0) t^2 / (2L)))` plus band-limited
/// Gaussian noise under a `sin^2(pi t / L)` envelope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChirpInNoise {
    pub f0: f64,
    pub f1: f64,
    pub amplitude: f64,
    pub noise_band: (f64, f64),
    pub noise_amplitude: f64,
    pub seed: u64,
}

impl Default for ChirpInNoise {
    fn default() -> Self {
        Self {
            f0: 30.0,
            f1: 230.0,
            amplitude: 1.0,
            noise_band: (300.0, 400.0),
            noise_amplitude: 0.3,
            seed: 0,
        }
    }
}

impl ChirpInNoise {
    /// Frequency of the chirp at time `t` for a signal of duration `duration`.
    pub fn instantaneous_frequency(&self, duration: f64, t: f64) -> f64 {
        self.f0 + (self.f1 - self.f0) * t / duration
    }

    /// Chirp phase in radians.
    pub fn phase(&self, duration: f64, t: f64) -> f64 {
        2.0 * std::f64::consts::PI * (self.f0 * t + (self.f1 - self.f0) * t * t / (2.0 * duration))
    }
}

fn check_shape(n: usize, rate: f64) -> Result<()> {
    if n < 2 {
        return Err(FifError::InvalidParameter("need at least two samples".into()));
    }
    if !(rate.is_finite() && rate > 0.0) {
        return Err(FifError::InvalidParameter(format!("sample rate {rate} must be positive")));
    }
    Ok(())
}

fn check_freq(freq: f64, rate: f64) -> Result<()> {
    if !(freq.is_finite() && freq >= 0.0) || freq > rate / 2.0 {
        return Err(FifError::InvalidParameter(format!(
            "frequency {freq} outside [0, {}] (Nyquist)",
            rate / 2.0
        )));
    }
    Ok(())
}

fn to_signal<T: Real>(values: Vec<f64>, rate: f64) -> Result<Signal<T>> {
    Signal::from_samples(values.into_iter().map(T::lit).collect(), T::lit(rate))
}

fn sum_of_tones(n: usize, rate: f64, tones: &[Tone]) -> Result<Vec<f64>> {
    check_shape(n, rate)?;
    for t in tones {
        check_freq(t.freq, rate)?;
    }
    Ok((0..n)
        .map(|i| {
            let t = i as f64 / rate;
            tones
                .iter()
                .map(|tone| tone.amplitude * (2.0 * std::f64::consts::PI * tone.freq * t + tone.phase).sin())
                .sum()
        })
        .collect())
}

pub fn tone<T: Real>(n: usize, rate: f64, tone: Tone) -> Result<Signal<T>> {
    to_signal(sum_of_tones(n, rate, &[tone])?, rate)
}

pub fn two_tone<T: Real>(n: usize, rate: f64, low: Tone, high: Tone) -> Result<Signal<T>> {
    to_signal(sum_of_tones(n, rate, &[low, high])?, rate)
}

/// Unit-rms Gaussian noise restricted to `band` by zeroing every other DFT
/// bin.
fn band_limited_noise(n: usize, rate: f64, band: (f64, f64), seed: u64) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let white: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let transform = Transform::<f64>::new(&GroupSpec::cyclic(n)?);
    let mut spectrum = transform.forward_real(&white);
    for (k, c) in spectrum.iter_mut().enumerate() {
        let freq = k.min(n - k) as f64 * rate / n as f64;
        if freq < band.0 || freq > band.1 {
            *c = Complex::new(0.0, 0.0);
        }
    }
    let (mut noise, _) = transform.inverse_to_real(spectrum);
    let rms = (noise.iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt();
    if rms > 0.0 {
        noise.iter_mut().for_each(|v| *v /= rms);
    }
    Ok(noise)
}

pub fn chirp_in_noise<T: Real>(n: usize, rate: f64, params: &ChirpInNoise) -> Result<Signal<T>> {
    check_shape(n, rate)?;
    for f in [params.f0, params.f1, params.noise_band.0, params.noise_band.1] {
        check_freq(f, rate)?;
    }
    if params.noise_band.0 > params.noise_band.1 {
        return Err(FifError::InvalidParameter("noise band is reversed".into()));
    }
    let duration = n as f64 / rate;
    let noise = band_limited_noise(n, rate, params.noise_band, params.seed)?;
    let values = (0..n)
        .map(|i| {
            let t = i as f64 / rate;
            let envelope = (std::f64::consts::PI * t / duration).sin().powi(2);
            params.amplitude * params.phase(duration, t).sin() + params.noise_amplitude * envelope * noise[i]
        })
        .collect();
    to_signal(values, rate)
}
