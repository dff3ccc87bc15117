//! Filter prototypes, their discrete dilations, and the data-driven filter
//! length estimate.
//!
//! A filter is nonnegative, even, and sums to one. Prototypes are continuous
//! double-convolution filters `w0 = h * h` supported on `[-1/2, 1/2]`; a
//! filter of length `ell` samples `w0(k / ell)` on the integers and
//! renormalizes.

use std::f64::consts::PI;

use crate::error::{FifError, Result};
use crate::fourier::Transform;
use crate::group::{GroupSpec, Signal};
use crate::scalar::Real;

/// Spectral values at or below this are treated as zeros of the transfer
/// function.
pub const SPECTRAL_ZERO_TOLERANCE: f64 = 1e-6;

const TABLE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PrototypeKind {
    /// `4 max(0, 1/2 - |x|)`, the self-convolution of the uniform density on
    /// `[-1/4, 1/4]`.
    Triangle,
    /// Self-convolution of the raised cosine `4 cos^2(2 pi x)` on
    /// `[-1/4, 1/4]`. Its transfer function has sidelobes below `7.5e-4`.
    DoubleHann,
    /// A sampled prototype supplied by the caller.
    Tabulated,
}

impl PrototypeKind {
    pub fn name(self) -> &'static str {
        match self {
            PrototypeKind::Triangle => "triangle",
            PrototypeKind::DoubleHann => "double-hann",
            PrototypeKind::Tabulated => "tabulated",
        }
    }
}

/// Continuous prototype filter `w0` on `[-1/2, 1/2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterPrototype<T> {
    kind: PrototypeKind,
    xs: Vec<T>,
    ys: Vec<T>,
}

impl<T: Real> FilterPrototype<T> {
    pub fn triangle() -> Self {
        Self { kind: PrototypeKind::Triangle, xs: Vec::new(), ys: Vec::new() }
    }

    pub fn double_hann() -> Self {
        Self { kind: PrototypeKind::DoubleHann, xs: Vec::new(), ys: Vec::new() }
    }

    /// A tabulated prototype. The table must be nonnegative, even about 0,
    /// lie within `[-1/2, 1/2]` and have unit trapezoidal mass.
    pub fn tabulated(xs: Vec<T>, ys: Vec<T>) -> Result<Self> {
        validate_table(&xs, &ys)?;
        Ok(Self { kind: PrototypeKind::Tabulated, xs, ys })
    }

    /// Like [`FilterPrototype::tabulated`], but rescales the table to unit
    /// trapezoidal mass before validating.
    pub fn tabulated_normalized(xs: Vec<T>, mut ys: Vec<T>) -> Result<Self> {
        if xs.len() == ys.len() && xs.len() >= 2 {
            let mass = trapezoid(&xs, &ys);
            if mass > T::zero() && mass.is_finite() {
                ys.iter_mut().for_each(|y| *y /= mass);
            }
        }
        Self::tabulated(xs, ys)
    }

    /// Parses the two-column `x value` text format. Blank lines and lines
    /// starting with `#` are ignored.
    pub fn parse_table(text: &str) -> Result<(Vec<T>, Vec<T>)> {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|f| !f.is_empty())
                .collect();
            let parse = |f: &str| {
                f.parse::<f64>().map(T::lit).map_err(|_| {
                    FifError::InvalidPrototype(format!("line {}: cannot parse {f:?}", lineno + 1))
                })
            };
            match fields.as_slice() {
                [x, y] => {
                    xs.push(parse(x)?);
                    ys.push(parse(y)?);
                }
                _ => {
                    return Err(FifError::InvalidPrototype(format!(
                        "line {}: expected two columns",
                        lineno + 1
                    )))
                }
            }
        }
        Ok((xs, ys))
    }

    pub fn kind(&self) -> PrototypeKind {
        self.kind
    }

    /// Number of table samples for tabulated prototypes.
    pub fn resolution(&self) -> Option<usize> {
        (self.kind == PrototypeKind::Tabulated).then_some(self.xs.len())
    }

    /// Evaluates `w0(x)`; zero outside `[-1/2, 1/2]`.
    pub fn eval(&self, x: T) -> T {
        let a = x.abs();
        let half = T::lit(0.5);
        match self.kind {
            PrototypeKind::Triangle => T::lit(4.0) * (half - a).max(T::zero()),
            PrototypeKind::DoubleHann => {
                if a >= half {
                    return T::zero();
                }
                let a = a.to_f64().unwrap_or(0.5);
                let rest = 0.5 - a;
                let v = 4.0
                    * (rest * (1.0 + (4.0 * PI * a).cos() / 2.0)
                        + 3.0 * (4.0 * PI * a).sin() / (8.0 * PI));
                T::lit(v.max(0.0))
            }
            PrototypeKind::Tabulated => interpolate(&self.xs, &self.ys, x),
        }
    }
}

/// Builds a prototype of the requested kind; `table` is required for
/// [`PrototypeKind::Tabulated`] and ignored otherwise.
pub fn make_prototype<T: Real>(
    kind: PrototypeKind,
    table: Option<(Vec<T>, Vec<T>)>,
) -> Result<FilterPrototype<T>> {
    match kind {
        PrototypeKind::Triangle => Ok(FilterPrototype::triangle()),
        PrototypeKind::DoubleHann => Ok(FilterPrototype::double_hann()),
        PrototypeKind::Tabulated => {
            let (xs, ys) = table.ok_or_else(|| {
                FifError::InvalidPrototype("tabulated prototype requires a table".into())
            })?;
            FilterPrototype::tabulated(xs, ys)
        }
    }
}

fn trapezoid<T: Real>(xs: &[T], ys: &[T]) -> T {
    xs.windows(2)
        .zip(ys.windows(2))
        .fold(T::zero(), |acc, (x, y)| acc + (x[1] - x[0]) * (y[0] + y[1]) * T::lit(0.5))
}

fn interpolate<T: Real>(xs: &[T], ys: &[T], x: T) -> T {
    if xs.is_empty() || x < xs[0] || x > xs[xs.len() - 1] {
        return T::zero();
    }
    let hi = xs.partition_point(|&v| v < x);
    if hi == 0 {
        return ys[0];
    }
    let lo = hi - 1;
    if hi >= xs.len() {
        return ys[lo];
    }
    let t = (x - xs[lo]) / (xs[hi] - xs[lo]);
    ys[lo] + t * (ys[hi] - ys[lo])
}

fn validate_table<T: Real>(xs: &[T], ys: &[T]) -> Result<()> {
    let err = |m: String| Err(FifError::InvalidPrototype(m));
    if xs.len() != ys.len() {
        return err(format!("{} abscissae but {} values", xs.len(), ys.len()));
    }
    if xs.len() < 3 {
        return err("table needs at least 3 samples".into());
    }
    let half = T::lit(0.5);
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return err("table contains non-finite entries".into());
    }
    if xs.windows(2).any(|w| w[1] <= w[0]) {
        return err("abscissae must be strictly ascending".into());
    }
    if xs[0] < -half || xs[xs.len() - 1] > half {
        return err("support must lie within [-1/2, 1/2]".into());
    }
    if let Some(i) = ys.iter().position(|&y| y < T::zero()) {
        return err(format!("negative value at sample {i}"));
    }
    let peak = ys.iter().fold(T::zero(), |m, &y| m.max(y));
    let tol = T::lit(TABLE_TOLERANCE) * peak.max(T::one());
    for (&x, &y) in xs.iter().zip(ys) {
        if (interpolate(xs, ys, -x) - y).abs() > tol {
            return err(format!("table is not even: w0({x}) != w0({})", -x));
        }
    }
    let mass = trapezoid(xs, ys);
    if (mass - T::one()).abs() > T::lit(TABLE_TOLERANCE) {
        return err(format!("table integrates to {mass}, not 1"));
    }
    Ok(())
}

/// A filter that can act on signals of a group through its transfer function.
pub trait GroupFilter<T: Real> {
    fn group(&self) -> &GroupSpec;

    /// Taps placed on the group (zero elsewhere), in row-major order.
    fn embed(&self) -> Vec<T>;

    /// Real part of the unnormalized DFT of the embedded taps. Exactly real
    /// up to rounding because the taps are even.
    fn transfer(&self, transform: &Transform<T>) -> Vec<T> {
        transform.forward_real(&self.embed()).into_iter().map(|c| c.re).collect()
    }
}

/// Even, nonnegative, unit-sum taps `taps[m + k] = w(k)` for `|k| <= m`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteFilter<T> {
    taps: Vec<T>,
    length: T,
    group: GroupSpec,
}

impl<T: Real> DiscreteFilter<T> {
    /// Wraps explicit taps, normalizing them to unit sum. The tap count must
    /// be odd and the taps nonnegative and symmetric.
    pub fn from_taps(taps: Vec<T>, group: GroupSpec) -> Result<Self> {
        if group.dims() != 1 {
            return Err(FifError::Dimension { expected: 1, actual: group.dims() });
        }
        if taps.len().is_multiple_of(2) {
            return Err(FifError::InvalidParameter("tap count must be odd".into()));
        }
        if taps.len() > group.order() {
            return Err(FifError::FilterTooLong { taps: taps.len(), order: group.order() });
        }
        if taps.iter().any(|t| !t.is_finite() || *t < T::zero()) {
            return Err(FifError::InvalidParameter("taps must be finite and nonnegative".into()));
        }
        if taps.iter().zip(taps.iter().rev()).any(|(a, b)| a != b) {
            return Err(FifError::InvalidParameter("taps must be even".into()));
        }
        let length = T::from_usize_lossy(taps.iter().filter(|&&t| t > T::zero()).count());
        Self::normalized(taps, length, group)
    }

    fn normalized(mut taps: Vec<T>, length: T, group: GroupSpec) -> Result<Self> {
        let sum = taps.iter().fold(T::zero(), |a, &t| a + t);
        if !(sum > T::zero()) {
            return Err(FifError::InvalidParameter("taps sum to zero".into()));
        }
        taps.iter_mut().for_each(|t| *t /= sum);
        Ok(Self { taps, length, group })
    }

    pub fn taps(&self) -> &[T] {
        &self.taps
    }

    /// Half width `m` of the `2m + 1` taps.
    pub fn half_width(&self) -> usize {
        self.taps.len() / 2
    }

    /// The dilation parameter `ell` this filter was built from.
    pub fn length(&self) -> T {
        self.length
    }
}

impl<T: Real> GroupFilter<T> for DiscreteFilter<T> {
    fn group(&self) -> &GroupSpec {
        &self.group
    }

    fn embed(&self) -> Vec<T> {
        let n = self.group.order();
        let m = self.half_width() as isize;
        let mut out = vec![T::zero(); n];
        for (i, &t) in self.taps.iter().enumerate() {
            out[(i as isize - m).rem_euclid(n as isize) as usize] += t;
        }
        out
    }
}

/// Number of taps on each side of the center for dilation `ell`.
pub(crate) fn half_width_for(ell: f64) -> usize {
    (ell / 2.0).floor() as usize
}

/// Samples the dilation `w0(x / ell) / ell` at the integers `|k| <= ell/2`
/// and renormalizes to unit sum.
pub fn dilate_and_sample<T: Real>(
    proto: &FilterPrototype<T>,
    ell: T,
    group: &GroupSpec,
) -> Result<DiscreteFilter<T>> {
    if group.dims() != 1 {
        return Err(FifError::Dimension { expected: 1, actual: group.dims() });
    }
    let ell_f = ell.to_f64().unwrap_or(f64::NAN);
    if !(ell_f >= 2.0) || !ell_f.is_finite() {
        return Err(FifError::FilterTooShort { ell: ell_f });
    }
    let m = half_width_for(ell_f);
    let n = group.order();
    if 2 * m + 1 > n {
        return Err(FifError::FilterTooLong { taps: 2 * m + 1, order: n });
    }
    let half: Vec<T> = (0..=m).map(|k| proto.eval(T::from_usize_lossy(k) / ell)).collect();
    let taps: Vec<T> = half.iter().rev().chain(&half[1..]).copied().collect();
    DiscreteFilter::normalized(taps, ell, group.clone())
}

/// Transfer function of a filter and the location of its first zero.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterSpectrumInfo<T> {
    pub spectrum: Vec<T>,
    pub first_zero_index: usize,
    pub first_zero_freq: T,
}

/// Transfer function of a 1-D filter with its first spectral zero.
///
/// Returns [`FifError::NoSpectralZero`] when the transfer function stays
/// above the zero tolerance up to Nyquist.
pub fn filter_spectrum_info<T: Real>(
    filter: &DiscreteFilter<T>,
    sample_rate: T,
) -> Result<FilterSpectrumInfo<T>> {
    let transform = Transform::new(filter.group());
    let full = transform.forward_real(&filter.embed());
    let residue = full.iter().fold(T::zero(), |m, c| m.max(c.im.abs()));
    let residue_tol = T::lit(1e-10).max(T::residue_tolerance());
    if residue > residue_tol {
        return Err(FifError::ImaginaryResidue {
            residue: residue.to_f64().unwrap_or(f64::NAN),
            tolerance: residue_tol.to_f64().unwrap_or(f64::NAN),
        });
    }
    let spectrum: Vec<T> = full.into_iter().map(|c| c.re).collect();
    let n = spectrum.len();
    let k = first_zero(&spectrum, n / 2).ok_or(FifError::NoSpectralZero)?;
    Ok(FilterSpectrumInfo {
        first_zero_freq: T::from_usize_lossy(k) * sample_rate / T::from_usize_lossy(n),
        first_zero_index: k,
        spectrum,
    })
}

/// Smallest `k` in `1..=last` where `profile[k]` drops to the zero tolerance
/// (which also catches a sign change from positive to negative).
pub(crate) fn first_zero<T: Real>(profile: &[T], last: usize) -> Option<usize> {
    let tau = T::lit(SPECTRAL_ZERO_TOLERANCE);
    (1..=last.min(profile.len().saturating_sub(1))).find(|&k| {
        profile[k] <= tau || (profile[k - 1] > T::zero()) != (profile[k] > T::zero())
    })
}

/// Local extrema of a 1-D signal on `Z_N`.
///
/// An index is an extremum where the circular first difference changes sign
/// strictly. A plateau between differences of opposite sign contributes its
/// midpoint (the lower middle for runs of even length). Constant signals
/// have no extrema.
pub fn find_local_extrema<T: Real>(signal: &Signal<T>) -> Result<Vec<usize>> {
    signal.require_dims(1)?;
    Ok(circular_extrema(signal.values()))
}

pub(crate) fn circular_extrema<T: Real>(values: &[T]) -> Vec<usize> {
    let n = values.len();
    let sign = |i: usize| {
        let d = values[(i + 1) % n] - values[i];
        if d > T::zero() {
            1i8
        } else if d < T::zero() {
            -1
        } else {
            0
        }
    };
    let Some(start) = (0..n).find(|&i| sign(i) != 0) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    let mut prev = sign(start);
    let mut last_step = 0usize;
    for step in 1..=n {
        let s = sign((start + step) % n);
        if s == 0 {
            continue;
        }
        if s != prev {
            // values start+last_step+1 ..= start+step are equal
            let run = step - last_step;
            out.push((start + last_step + 1 + (run - 1) / 2) % n);
        }
        prev = s;
        last_step = step;
    }
    out.sort_unstable();
    out
}

/// Gaps between consecutive extrema on the circle, including the wrap gap.
pub(crate) fn circular_gaps(extrema: &[usize], n: usize) -> Vec<usize> {
    if extrema.len() < 2 {
        return Vec::new();
    }
    let mut gaps: Vec<usize> = extrema.windows(2).map(|w| w[1] - w[0]).collect();
    gaps.push(n - extrema[extrema.len() - 1] + extrema[0]);
    gaps
}

/// Median of the gaps (mean of the middle pair for even counts).
pub(crate) fn median_gap<T: Real>(gaps: &mut [usize]) -> T {
    gaps.sort_unstable();
    let k = gaps.len();
    if k % 2 == 1 {
        T::from_usize_lossy(gaps[k / 2])
    } else {
        T::from_usize_lossy(gaps[k / 2 - 1] + gaps[k / 2]) / T::lit(2.0)
    }
}

pub(crate) fn length_from_gaps<T: Real>(gaps: &mut [usize], nu: T) -> T {
    (nu * median_gap::<T>(gaps)).max(T::lit(2.0))
}

pub(crate) fn check_nu<T: Real>(nu: T) -> Result<()> {
    if nu.is_finite() && nu > T::zero() {
        Ok(())
    } else {
        Err(FifError::InvalidParameter(format!("nu must be positive, got {nu}")))
    }
}

/// `nu` times the median distance between consecutive local extrema,
/// clamped below at 2.
pub fn estimate_filter_length<T: Real>(signal: &Signal<T>, nu: T) -> Result<T> {
    check_nu(nu)?;
    let extrema = find_local_extrema(signal)?;
    if extrema.len() < 2 {
        return Err(FifError::TooFewExtrema { found: extrema.len() });
    }
    let mut gaps = circular_gaps(&extrema, signal.len());
    Ok(length_from_gaps(&mut gaps, nu))
}
