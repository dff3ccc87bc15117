//! Iterative filtering on the torus `Z_rows x Z_cols`.
//!
//! Grids wrap in both directions; detrend or pad non-periodic data before
//! decomposing it.

use crate::decompose::{run_decomposition, DecompositionConfig, DecompositionResult, Geometry};
use crate::error::{FifError, Result};
use crate::filter::{
    check_nu, circular_extrema, circular_gaps, first_zero, length_from_gaps, FilterPrototype,
    GroupFilter,
};
use crate::fourier::Transform;
use crate::group::{GroupSpec, Signal};
use crate::scalar::Real;

/// Square, isotropic 2-D filter with odd extent, centered at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Filter2D<T> {
    taps: Vec<T>,
    extent: usize,
    length: T,
    group: GroupSpec,
}

impl<T: Real> Filter2D<T> {
    /// Row-major `extent x extent` taps; the center is at `(extent/2, extent/2)`.
    pub fn taps(&self) -> &[T] {
        &self.taps
    }

    pub fn extent(&self) -> usize {
        self.extent
    }

    pub fn length(&self) -> T {
        self.length
    }

    pub fn tap(&self, i: isize, j: isize) -> T {
        let h = (self.extent / 2) as isize;
        if i.abs() > h || j.abs() > h {
            return T::zero();
        }
        self.taps[(i + h) as usize * self.extent + (j + h) as usize]
    }
}

impl<T: Real> GroupFilter<T> for Filter2D<T> {
    fn group(&self) -> &GroupSpec {
        &self.group
    }

    fn embed(&self) -> Vec<T> {
        let h = (self.extent / 2) as isize;
        let mut out = vec![T::zero(); self.group.order()];
        for i in -h..=h {
            for j in -h..=h {
                out[self.group.wrap_index(&[i, j])] += self.tap(i, j);
            }
        }
        out
    }
}

/// Radius in samples of the half filter `v` for length `ell`.
fn half_radius(ell: f64) -> usize {
    (ell / 4.0).floor() as usize
}

fn extent_for(ell: f64) -> usize {
    4 * half_radius(ell) + 1
}

/// Isotropic filter of diameter at most `ell`.
///
/// The taps are the self-convolution `v * v` of the radial sampling
/// `v(i, j) ∝ w0(r / (ell/2))`, `r = sqrt(i^2 + j^2)`, so the transfer
/// function is `(F v)^2` and stays in `[0, 1]`. The result is nonnegative,
/// even in each index, symmetric under transposition, and sums to one.
pub fn make_radial_filter<T: Real>(
    proto: &FilterPrototype<T>,
    ell: T,
    group: &GroupSpec,
) -> Result<Filter2D<T>> {
    let &[rows, cols] = group.moduli() else {
        return Err(FifError::Dimension { expected: 2, actual: group.dims() });
    };
    let ell_f = ell.to_f64().unwrap_or(f64::NAN);
    if !(ell_f.is_finite() && ell_f > 0.0) {
        return Err(FifError::FilterTooShort { ell: ell_f });
    }
    let extent = extent_for(ell_f);
    if extent > rows.min(cols) {
        return Err(FifError::FilterTooLong { taps: extent, order: rows.min(cols) });
    }
    let m = half_radius(ell_f) as isize;
    let half_ell = ell / T::lit(2.0);

    // radial half filter embedded on the group
    let transform = Transform::new(group);
    let mut half = vec![T::zero(); group.order()];
    let mut mass = T::zero();
    for i in -m..=m {
        for j in -m..=m {
            let r = T::from_isize(i * i + j * j).unwrap_or_else(T::zero).sqrt();
            let v = proto.eval(r / half_ell);
            half[group.wrap_index(&[i, j])] = v;
            mass += v;
        }
    }
    if !(mass > T::zero()) {
        return Err(FifError::InvalidPrototype("prototype vanishes on the sampling grid".into()));
    }

    // v * v via the transfer (F v)^2; the support 4m + 1 fits, so no wrap
    let spectrum = transform.forward_real(&half);
    let squared = spectrum.iter().map(|c| *c * *c).collect();
    let (full, _) = transform.inverse_to_real(squared);

    let h = 2 * m;
    let mut quadrant = vec![T::zero(); ((h + 1) * (h + 1)) as usize];
    for a in 0..=h {
        for b in a..=h {
            let v = full[group.wrap_index(&[a, b])].max(T::zero());
            quadrant[(a * (h + 1) + b) as usize] = v;
            quadrant[(b * (h + 1) + a) as usize] = v;
        }
    }
    let mut taps = Vec::with_capacity(extent * extent);
    for i in -h..=h {
        for j in -h..=h {
            taps.push(quadrant[(i.abs() * (h + 1) + j.abs()) as usize]);
        }
    }
    let sum = taps.iter().fold(T::zero(), |acc, &t| acc + t);
    taps.iter_mut().for_each(|t| *t /= sum);
    Ok(Filter2D { taps, extent, length: ell, group: group.clone() })
}

fn lines<T: Real>(values: &[T], rows: usize, cols: usize) -> impl Iterator<Item = Vec<T>> + '_ {
    let row_iter = (0..rows).map(move |r| values[r * cols..(r + 1) * cols].to_vec());
    let col_iter = (0..cols).map(move |c| (0..rows).map(|r| values[r * cols + c]).collect());
    row_iter.chain(col_iter)
}

/// Total extremum count and pooled gaps over every row and column.
fn pooled_gaps<T: Real>(values: &[T], rows: usize, cols: usize) -> (usize, Vec<usize>) {
    let mut count = 0;
    let mut gaps = Vec::new();
    for line in lines(values, rows, cols) {
        let extrema = circular_extrema(&line);
        count += extrema.len();
        gaps.extend(circular_gaps(&extrema, line.len()));
    }
    (count, gaps)
}

/// `nu` times the median of the circular extrema gaps pooled over all rows
/// and columns, clamped below at 2.
pub fn estimate_filter_length_2d<T: Real>(grid: &Signal<T>, nu: T) -> Result<T> {
    grid.require_dims(2)?;
    check_nu(nu)?;
    let &[rows, cols] = grid.group().moduli() else { unreachable!() };
    let (count, mut gaps) = pooled_gaps(grid.values(), rows, cols);
    if gaps.is_empty() {
        return Err(FifError::TooFewExtrema { found: count });
    }
    Ok(length_from_gaps(&mut gaps, nu))
}

struct Torus<T> {
    rows: usize,
    cols: usize,
    rate: T,
}

impl<T: Real> Geometry<T> for Torus<T> {
    fn extrema_count(&self, values: &[T]) -> usize {
        pooled_gaps(values, self.rows, self.cols).0
    }

    fn estimate_length(&self, values: &[T], nu: T) -> Option<T> {
        let (_, mut gaps) = pooled_gaps(values, self.rows, self.cols);
        (!gaps.is_empty()).then(|| length_from_gaps(&mut gaps, nu))
    }

    fn fits(&self, ell: T) -> bool {
        extent_for(ell.to_f64().unwrap_or(f64::INFINITY)) <= self.rows.min(self.cols)
    }

    fn transfer(&self, proto: &FilterPrototype<T>, ell: T, transform: &Transform<T>) -> Result<Vec<T>> {
        Ok(make_radial_filter(proto, ell, transform.group())?.transfer(transform))
    }

    fn first_zero_freq(&self, transfer: &[T]) -> T {
        // profile along the first axis, H(k, 0)
        let profile: Vec<T> = (0..self.rows).map(|k| transfer[k * self.cols]).collect();
        first_zero(&profile, self.rows / 2)
            .map(|k| T::from_usize_lossy(k) * self.rate / T::from_usize_lossy(self.rows))
            .unwrap_or(self.rate / T::lit(2.0))
    }
}

/// Decomposes a grid into 2-D IMFs with the same loop and safeguards as the
/// 1-D [`crate::decompose::decompose`].
pub fn decompose_2d<T: Real>(
    grid: &Signal<T>,
    config: &DecompositionConfig<T>,
) -> Result<DecompositionResult<T>> {
    grid.require_dims(2)?;
    let &[rows, cols] = grid.group().moduli() else { unreachable!() };
    let geometry = Torus { rows, cols, rate: grid.sample_rate()[0] };
    run_decomposition(grid, config, &geometry)
}
