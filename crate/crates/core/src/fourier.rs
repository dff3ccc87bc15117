//! Discrete Fourier analysis on `Z_N` and `Z_N1 x Z_N2`.
//!
//! The public transforms are unitary: both directions scale by `1/sqrt(N)`,
//! so `||F s||_2 = ||s||_2`. The matrix is the standard DFT matrix with
//! entries `omega^(i*j) / sqrt(N)`, `omega = exp(-2 pi i / N)`. On a product
//! group the transform is applied separably along each axis.
//!
//! [`Transform`] exposes the unnormalized kernels used internally by the
//! spectral operators; plans are immutable and can be shared across threads.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{FifError, Result};
use crate::group::{GroupSpec, Signal, Spectrum};
use crate::scalar::Real;

struct AxisPlan<T: Real> {
    len: usize,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

/// Planned, unnormalized DFT over a group.
pub struct Transform<T: Real> {
    group: GroupSpec,
    axes: Vec<AxisPlan<T>>,
}

impl<T: Real> Transform<T> {
    pub fn new(group: &GroupSpec) -> Self {
        let mut planner = FftPlanner::new();
        let axes = group
            .moduli()
            .iter()
            .map(|&len| AxisPlan {
                len,
                forward: planner.plan_fft_forward(len),
                inverse: planner.plan_fft_inverse(len),
            })
            .collect();
        Self { group: group.clone(), axes }
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    /// `sum_g x(g) conj(chi(g))`, no normalization.
    pub fn forward_real(&self, values: &[T]) -> Vec<Complex<T>> {
        let mut buf: Vec<Complex<T>> = values.iter().map(|&v| Complex::new(v, T::zero())).collect();
        self.forward_in_place(&mut buf);
        buf
    }

    pub fn forward_in_place(&self, buf: &mut [Complex<T>]) {
        self.run(buf, true);
    }

    /// Inverse kernel without the `1/N` factor.
    pub fn inverse_in_place(&self, buf: &mut [Complex<T>]) {
        self.run(buf, false);
    }

    /// Inverse DFT scaled by `1/N`, splitting the result into its real part
    /// and the norm of the discarded imaginary part.
    pub fn inverse_to_real(&self, mut buf: Vec<Complex<T>>) -> (Vec<T>, T) {
        self.inverse_in_place(&mut buf);
        let scale = T::one() / T::from_usize_lossy(buf.len());
        let mut imag_sq = T::zero();
        let real = buf
            .iter()
            .map(|c| {
                imag_sq += c.im * c.im;
                c.re * scale
            })
            .collect();
        (real, imag_sq.sqrt() * scale)
    }

    fn run(&self, buf: &mut [Complex<T>], forward: bool) {
        assert_eq!(buf.len(), self.group.order(), "buffer does not match group order");
        let pick = |a: &AxisPlan<T>| if forward { a.forward.clone() } else { a.inverse.clone() };
        match self.axes.as_slice() {
            [axis] => pick(axis).process(buf),
            [rows, cols] => {
                // rows are contiguous; rustfft processes the buffer chunk by chunk
                pick(cols).process(buf);
                let mut column = vec![Complex::new(T::zero(), T::zero()); rows.len * cols.len];
                transpose(buf, &mut column, rows.len, cols.len);
                pick(rows).process(&mut column);
                transpose(&column, buf, cols.len, rows.len);
            }
            _ => unreachable!("groups have one or two factors"),
        }
    }
}

fn transpose<C: Copy>(src: &[C], dst: &mut [C], rows: usize, cols: usize) {
    for r in 0..rows {
        for c in 0..cols {
            dst[c * rows + r] = src[r * cols + c];
        }
    }
}

/// Unitary forward transform.
pub fn forward_transform<T: Real>(signal: &Signal<T>) -> Spectrum<T> {
    let transform = Transform::new(signal.group());
    let scale = T::one() / T::from_usize_lossy(signal.len()).sqrt();
    let values = transform
        .forward_real(signal.values())
        .into_iter()
        .map(|c| c * scale)
        .collect();
    Spectrum {
        group: signal.group().clone(),
        values,
        sample_rate: signal.sample_rate().to_vec(),
    }
}

/// Unitary inverse transform back to a real signal.
///
/// Fails when the imaginary part of the result is not negligible relative to
/// the result's norm, which happens exactly when the input spectrum is not
/// conjugate-symmetric.
pub fn inverse_transform<T: Real>(spectrum: &Spectrum<T>) -> Result<Signal<T>> {
    let transform = Transform::new(spectrum.group());
    let n = T::from_usize_lossy(spectrum.values().len());
    let (real, imag_norm) = transform.inverse_to_real(spectrum.values().to_vec());
    // inverse_to_real scales by 1/N; the unitary inverse scales by 1/sqrt(N)
    let values: Vec<T> = real.into_iter().map(|v| v * n.sqrt()).collect();
    let imag_norm = imag_norm * n.sqrt();
    let total = (crate::scalar::l2_norm(&values).powi(2) + imag_norm * imag_norm).sqrt();
    let tolerance = T::residue_tolerance() * total;
    if imag_norm > tolerance {
        return Err(FifError::ImaginaryResidue {
            residue: imag_norm.to_f64().unwrap_or(f64::NAN),
            tolerance: tolerance.to_f64().unwrap_or(f64::NAN),
        });
    }
    Signal::new(spectrum.group().clone(), values, spectrum.sample_rate().to_vec())
}

/// Group convolution `(u * v)(g) = sum_h u(g - h) v(h)`.
pub fn convolve<T: Real>(u: &Signal<T>, v: &Signal<T>) -> Result<Signal<T>> {
    v.require_same_group(u.group())?;
    let transform = Transform::new(u.group());
    let fu = transform.forward_real(u.values());
    let fv = transform.forward_real(v.values());
    let product = fu.into_iter().zip(fv).map(|(a, b)| a * b).collect();
    let (values, _) = transform.inverse_to_real(product);
    u.with_values(values)
}
