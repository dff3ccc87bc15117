//! Iterative filtering: moving averages, the fluctuation operator, the IMF
//! operator `V_w^p` evaluated in the spectral domain, and the outer loop that
//! peels intrinsic mode functions off a signal.

use num_complex::Complex;

use crate::error::{FifError, Result};
use crate::filter::{
    circular_extrema, circular_gaps, dilate_and_sample, first_zero, half_width_for,
    length_from_gaps, FilterPrototype, GroupFilter, SPECTRAL_ZERO_TOLERANCE,
};
use crate::fourier::Transform;
use crate::group::Signal;
use crate::scalar::Real;

/// Parameters of the decomposition loop.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionConfig<T> {
    /// Significance and inner-loop threshold.
    pub delta: T,
    /// Filter length multiplier applied to the median extrema gap.
    pub nu: T,
    pub max_imfs: usize,
    /// Cap on the inner power; `None` means `ceil(1 / (e * delta))`, which
    /// always suffices for double-convolution filters.
    pub max_inner_power: Option<usize>,
    /// Factor applied when the filter length must be forced upward.
    pub growth_factor: T,
    pub prototype: FilterPrototype<T>,
}

impl<T: Real> Default for DecompositionConfig<T> {
    fn default() -> Self {
        Self {
            delta: T::lit(1e-3),
            nu: T::lit(8.0),
            max_imfs: 64,
            max_inner_power: None,
            growth_factor: T::lit(1.1),
            prototype: FilterPrototype::double_hann(),
        }
    }
}

impl<T: Real> DecompositionConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(FifError::InvalidConfig(m.to_string()));
        if !(self.delta > T::zero() && self.delta < T::one()) {
            return bad("delta must lie in (0, 1)");
        }
        if !(self.nu.is_finite() && self.nu > T::zero()) {
            return bad("nu must be positive");
        }
        if !(self.growth_factor.is_finite() && self.growth_factor > T::one()) {
            return bad("growth factor must exceed 1");
        }
        if self.max_imfs == 0 {
            return bad("max_imfs must be positive");
        }
        if self.max_inner_power == Some(0) {
            return bad("max_inner_power must be positive");
        }
        Ok(())
    }

    pub fn inner_power_cap(&self) -> usize {
        self.max_inner_power.unwrap_or_else(|| default_power_cap(self.delta))
    }
}

/// `ceil(1 / (e * delta))`.
pub fn default_power_cap<T: Real>(delta: T) -> usize {
    let bound = (T::one() / (T::E() * delta)).ceil();
    bound.to_usize().unwrap_or(usize::MAX).max(1)
}

/// One extracted intrinsic mode function and the parameters that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct ImfRecord<T> {
    /// 1-based position in the decomposition.
    pub index: usize,
    pub values: Signal<T>,
    pub filter_length: T,
    pub power: usize,
    /// First zero of the filter's transfer function, in cycles per unit.
    pub first_zero_freq: T,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LoopEvent<T> {
    /// The estimated length did not exceed the previous accepted length.
    ForcedGrowth { imf: usize, estimated: T, previous: T, forced: T },
    /// The candidate IMF failed the significance test and was discarded.
    InsignificantRetry { imf: usize, length: T, next_length: T },
    /// Power selection hit its cap before meeting the threshold.
    PowerCapped { imf: usize, power: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// The remainder has at most one local extremum.
    TrendOnly,
    /// The next filter would not fit on the group.
    SupportExceeded,
    MaxImfs,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionResult<T> {
    pub imfs: Vec<ImfRecord<T>>,
    pub remainder: Signal<T>,
    pub log: Vec<LoopEvent<T>>,
    pub stop: StopReason,
}

impl<T: Real> DecompositionResult<T> {
    /// Sum of all IMFs and the remainder.
    pub fn reconstruct(&self) -> Vec<T> {
        let mut acc = self.remainder.values().to_vec();
        for imf in &self.imfs {
            for (a, &v) in acc.iter_mut().zip(imf.values.values()) {
                *a += v;
            }
        }
        acc
    }
}

/// A signal's spectrum paired with a filter's transfer function.
struct Spectral<T: Real> {
    transform: Transform<T>,
    transfer: Vec<T>,
    spectrum: Vec<Complex<T>>,
}

impl<T: Real> Spectral<T> {
    fn new<F: GroupFilter<T>>(signal: &Signal<T>, filter: &F) -> Result<Self> {
        signal.require_same_group(filter.group())?;
        let transform = Transform::new(signal.group());
        let transfer = filter.transfer(&transform);
        let spectrum = transform.forward_real(signal.values());
        Ok(Self { transform, transfer, spectrum })
    }

    fn apply(&self, signal: &Signal<T>, gain: impl Fn(T) -> T) -> Result<Signal<T>> {
        let out = self
            .spectrum
            .iter()
            .zip(&self.transfer)
            .map(|(&s, &h)| s * gain(h))
            .collect();
        let (values, _) = self.transform.inverse_to_real(out);
        signal.with_values(values)
    }
}

/// `(1 - H)^p S` for each frequency.
fn powered<T: Real>(transfer: &[T], spectrum: &[Complex<T>], p: usize) -> Vec<Complex<T>> {
    let exp = i32::try_from(p).unwrap_or(i32::MAX);
    spectrum
        .iter()
        .zip(transfer)
        .map(|(&s, &h)| s * (T::one() - h).powi(exp))
        .collect()
}

/// Smallest `p <= cap` with `||(1-H)^p H S||^2 <= threshold_sq`, and whether
/// the threshold was met. Each step is a single entrywise pass.
fn scan_power<T: Real>(
    transfer: &[T],
    spectrum: &[Complex<T>],
    threshold_sq: T,
    cap: usize,
) -> (usize, bool) {
    let mut factor: Vec<T> = transfer.iter().map(|&h| T::one() - h).collect();
    let mut p = 1;
    loop {
        let diff_sq = spectrum
            .iter()
            .zip(transfer)
            .zip(&factor)
            .fold(T::zero(), |acc, ((s, &h), &g)| acc + s.norm_sqr() * (g * h) * (g * h));
        if diff_sq <= threshold_sq {
            return (p, true);
        }
        if p >= cap {
            return (p, false);
        }
        for (g, &h) in factor.iter_mut().zip(transfer) {
            *g *= T::one() - h;
        }
        p += 1;
    }
}

/// Moving average `w * s`.
pub fn moving_average<T: Real, F: GroupFilter<T>>(signal: &Signal<T>, filter: &F) -> Result<Signal<T>> {
    Spectral::new(signal, filter)?.apply(signal, |h| h)
}

/// Fluctuation `s - w * s`.
pub fn fluctuation<T: Real, F: GroupFilter<T>>(signal: &Signal<T>, filter: &F) -> Result<Signal<T>> {
    Spectral::new(signal, filter)?.apply(signal, |h| T::one() - h)
}

/// The IMF operator `V_w^p s`, computed as `F^-1 (1 - F w)^p F s`.
pub fn imf_apply<T: Real, F: GroupFilter<T>>(
    signal: &Signal<T>,
    filter: &F,
    p: usize,
) -> Result<Signal<T>> {
    if p == 0 {
        return Err(FifError::InvalidParameter("power must be at least 1".into()));
    }
    let sp = Spectral::new(signal, filter)?;
    let (values, _) = sp.transform.inverse_to_real(powered(&sp.transfer, &sp.spectrum, p));
    signal.with_values(values)
}

/// Smallest `p` with `||V^(p+1) s - V^p s|| <= delta ||s||`, or `cap` (with
/// a warning) when no `p <= cap` qualifies.
pub fn select_power<T: Real, F: GroupFilter<T>>(
    signal: &Signal<T>,
    filter: &F,
    delta: T,
    cap: usize,
) -> Result<usize> {
    let norm = signal.norm();
    if norm == T::zero() {
        return Err(FifError::ZeroSignal);
    }
    if !(delta > T::zero()) || cap == 0 {
        return Err(FifError::InvalidParameter("delta and cap must be positive".into()));
    }
    let sp = Spectral::new(signal, filter)?;
    let n = T::from_usize_lossy(signal.len());
    let (p, met) = scan_power(&sp.transfer, &sp.spectrum, n * (delta * norm).powi(2), cap);
    if !met {
        log::warn!("power selection reached its cap of {cap} without meeting delta = {delta}");
    }
    Ok(p)
}

/// Limit of `V_w^p s` as `p -> infinity`: the orthogonal projection onto the
/// frequencies where the transfer function vanishes.
///
/// Intended as a reference for double-convolution filters; it keeps no
/// non-stationary information and is not used by [`decompose`].
pub fn projection_limit<T: Real, F: GroupFilter<T>>(filter: &F, signal: &Signal<T>) -> Result<Signal<T>> {
    let tau = T::lit(SPECTRAL_ZERO_TOLERANCE);
    Spectral::new(signal, filter)?.apply(signal, |h| if h.abs() <= tau { T::one() } else { T::zero() })
}

/// Geometry-specific pieces of the decomposition loop.
pub(crate) trait Geometry<T: Real> {
    fn extrema_count(&self, values: &[T]) -> usize;
    /// `None` when there are too few extrema.
    fn estimate_length(&self, values: &[T], nu: T) -> Option<T>;
    fn fits(&self, ell: T) -> bool;
    fn transfer(&self, proto: &FilterPrototype<T>, ell: T, transform: &Transform<T>) -> Result<Vec<T>>;
    fn first_zero_freq(&self, transfer: &[T]) -> T;
}

struct Line<T> {
    n: usize,
    rate: T,
}

impl<T: Real> Geometry<T> for Line<T> {
    fn extrema_count(&self, values: &[T]) -> usize {
        circular_extrema(values).len()
    }

    fn estimate_length(&self, values: &[T], nu: T) -> Option<T> {
        let mut gaps = circular_gaps(&circular_extrema(values), self.n);
        (!gaps.is_empty()).then(|| length_from_gaps(&mut gaps, nu))
    }

    fn fits(&self, ell: T) -> bool {
        2 * half_width_for(ell.to_f64().unwrap_or(f64::INFINITY)) < self.n
    }

    fn transfer(&self, proto: &FilterPrototype<T>, ell: T, transform: &Transform<T>) -> Result<Vec<T>> {
        Ok(dilate_and_sample(proto, ell, transform.group())?.transfer(transform))
    }

    fn first_zero_freq(&self, transfer: &[T]) -> T {
        let n = T::from_usize_lossy(self.n);
        first_zero(transfer, self.n / 2)
            .map(|k| T::from_usize_lossy(k) * self.rate / n)
            .unwrap_or(self.rate / T::lit(2.0))
    }
}

/// Decomposes a 1-D signal into IMFs and a remainder.
///
/// The loop stops when the remainder has at most one local extremum, when
/// the next filter would not fit on the circle, or after `max_imfs` IMFs.
/// Filter lengths are strictly increasing, and `sum(imfs) + remainder`
/// reproduces the input up to rounding.
pub fn decompose<T: Real>(
    signal: &Signal<T>,
    config: &DecompositionConfig<T>,
) -> Result<DecompositionResult<T>> {
    signal.require_dims(1)?;
    let geometry = Line { n: signal.len(), rate: signal.sample_rate()[0] };
    run_decomposition(signal, config, &geometry)
}

pub(crate) fn run_decomposition<T: Real, G: Geometry<T>>(
    signal: &Signal<T>,
    config: &DecompositionConfig<T>,
    geometry: &G,
) -> Result<DecompositionResult<T>> {
    config.validate()?;
    if signal.norm() == T::zero() {
        return Err(FifError::ZeroSignal);
    }
    let transform = Transform::new(signal.group());
    let n = T::from_usize_lossy(signal.len());
    let cap = config.inner_power_cap();

    let mut remainder = signal.clone();
    let mut imfs: Vec<ImfRecord<T>> = Vec::new();
    let mut log = Vec::new();
    let mut previous: Option<T> = None;

    let stop = loop {
        if imfs.len() >= config.max_imfs {
            break StopReason::MaxImfs;
        }
        let index = imfs.len() + 1;
        if geometry.extrema_count(remainder.values()) <= 1 {
            break StopReason::TrendOnly;
        }
        let Some(mut ell) = geometry.estimate_length(remainder.values(), config.nu) else {
            break StopReason::TrendOnly;
        };
        if let Some(prev) = previous {
            if ell <= prev {
                let forced = config.growth_factor * prev;
                log.push(LoopEvent::ForcedGrowth { imf: index, estimated: ell, previous: prev, forced });
                ell = forced;
            }
        }

        let spectrum = transform.forward_real(remainder.values());
        let norm = remainder.norm();
        let threshold_sq = n * (config.delta * norm).powi(2);
        let accepted = loop {
            if !geometry.fits(ell) {
                break None;
            }
            let transfer = geometry.transfer(&config.prototype, ell, &transform)?;
            let fluct_sq = spectrum
                .iter()
                .zip(&transfer)
                .fold(T::zero(), |acc, (s, &h)| acc + s.norm_sqr() * (T::one() - h).powi(2));
            if fluct_sq <= threshold_sq {
                let next = config.growth_factor * ell;
                log.push(LoopEvent::InsignificantRetry { imf: index, length: ell, next_length: next });
                ell = next;
                continue;
            }
            let (power, met) = scan_power(&transfer, &spectrum, threshold_sq, cap);
            if !met {
                log::warn!("IMF {index}: inner power capped at {power}");
                log.push(LoopEvent::PowerCapped { imf: index, power });
            }
            break Some((transfer, power));
        };
        let Some((transfer, power)) = accepted else {
            break StopReason::SupportExceeded;
        };

        let (values, _) = transform.inverse_to_real(powered(&transfer, &spectrum, power));
        let imf = remainder.with_values(values)?;
        remainder = remainder.sub(&imf)?;
        imfs.push(ImfRecord {
            index,
            values: imf,
            filter_length: ell,
            power,
            first_zero_freq: geometry.first_zero_freq(&transfer),
        });
        previous = Some(ell);
    };

    Ok(DecompositionResult { imfs, remainder, log, stop })
}
