#![allow(dead_code)]

use std::f64::consts::PI;

use fif::{fluctuation, DiscreteFilter64, Signal64};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_values(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

pub fn random_signal(rng: &mut ChaCha8Rng, n: usize) -> Signal64 {
    Signal64::from_samples(random_values(rng, n), 1.0).unwrap()
}

/// Unitary DFT by direct summation, entries `exp(-2 pi i jk / N) / sqrt(N)`.
pub fn direct_dft(x: &[f64]) -> Vec<Complex64> {
    let n = x.len();
    let scale = 1.0 / (n as f64).sqrt();
    (0..n)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(j, &v)| Complex64::from_polar(v, -2.0 * PI * ((j * k) % n) as f64 / n as f64))
                .sum::<Complex64>()
                * scale
        })
        .collect()
}

/// `(u * v)[g] = sum_h u[g - h] v[h]` on `Z_N`.
pub fn direct_convolve(u: &[f64], v: &[f64]) -> Vec<f64> {
    let n = u.len();
    (0..n).map(|g| (0..n).map(|h| u[(g + n - h) % n] * v[h]).sum()).collect()
}

/// Same sum on `Z_rows x Z_cols`, row-major.
pub fn direct_convolve_2d(u: &[f64], v: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let mut out = vec![0.0; rows * cols];
    for a in 0..rows {
        for b in 0..cols {
            let mut acc = 0.0;
            for c in 0..rows {
                for d in 0..cols {
                    acc += u[((a + rows - c) % rows) * cols + (b + cols - d) % cols] * v[c * cols + d];
                }
            }
            out[a * cols + b] = acc;
        }
    }
    out
}

/// `p` sequential fluctuation passes.
pub fn iterated_fluctuation(s: &Signal64, w: &DiscreteFilter64, p: usize) -> Signal64 {
    (0..p).fold(s.clone(), |acc, _| fluctuation(&acc, w).unwrap())
}

pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm(&diff) / norm(b).max(f64::MIN_POSITIVE)
}

pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut ab, mut aa, mut bb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        ab += (x - ma) * (y - mb);
        aa += (x - ma) * (x - ma);
        bb += (y - mb) * (y - mb);
    }
    ab / (aa * bb).sqrt()
}

pub fn sine(n: usize, rate: f64, freq: f64, amp: f64) -> Vec<f64> {
    (0..n).map(|i| amp * (2.0 * PI * freq * i as f64 / rate).sin()).collect()
}

/// Numerical self-convolution of the uniform density on `[-1/4, 1/4]`,
/// evaluated at `x` by the midpoint rule.
pub fn box_self_convolution(x: f64, steps: usize) -> f64 {
    let a = -0.25;
    let h = 0.5 / steps as f64;
    (0..steps)
        .map(|i| {
            let y = a + (i as f64 + 0.5) * h;
            let u = |t: f64| if t.abs() <= 0.25 { 2.0 } else { 0.0 };
            u(y) * u(x - y) * h
        })
        .sum()
}
