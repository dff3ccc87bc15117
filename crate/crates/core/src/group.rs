//! Finite abelian groups `Z_N` and `Z_N1 x Z_N2`, and real signals living on them.

use std::fmt;

use num_complex::Complex;

use crate::error::{FifError, Result};
use crate::scalar::{l2_norm, Real};

/// A product of one or two cyclic groups. Elements are stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    moduli: Vec<usize>,
}

impl GroupSpec {
    pub fn new(moduli: Vec<usize>) -> Result<Self> {
        if moduli.is_empty() || moduli.len() > 2 {
            return Err(FifError::InvalidGroup(format!(
                "expected 1 or 2 cyclic factors, got {}",
                moduli.len()
            )));
        }
        if let Some(m) = moduli.iter().find(|&&m| m < 2) {
            return Err(FifError::InvalidGroup(format!("modulus {m} is below 2")));
        }
        Ok(Self { moduli })
    }

    /// The cyclic group `Z_n`.
    pub fn cyclic(n: usize) -> Result<Self> {
        Self::new(vec![n])
    }

    /// The torus `Z_rows x Z_cols`.
    pub fn product(rows: usize, cols: usize) -> Result<Self> {
        Self::new(vec![rows, cols])
    }

    pub fn moduli(&self) -> &[usize] {
        &self.moduli
    }

    pub fn dims(&self) -> usize {
        self.moduli.len()
    }

    /// Group order, the product of the moduli.
    pub fn order(&self) -> usize {
        self.moduli.iter().product()
    }

    /// Maps signed per-axis coordinates to the row-major flat index.
    pub fn wrap_index(&self, coords: &[isize]) -> usize {
        debug_assert_eq!(coords.len(), self.dims());
        coords
            .iter()
            .zip(&self.moduli)
            .fold(0usize, |acc, (&c, &m)| acc * m + c.rem_euclid(m as isize) as usize)
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.moduli.iter().map(|m| format!("Z_{m}")).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

/// Real samples over a finite abelian group, with a sampling rate per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal<T> {
    group: GroupSpec,
    values: Vec<T>,
    sample_rate: Vec<T>,
}

impl<T: Real> Signal<T> {
    pub fn new(group: GroupSpec, values: Vec<T>, sample_rate: Vec<T>) -> Result<Self> {
        if values.len() != group.order() {
            return Err(FifError::InvalidSignal(format!(
                "{} values do not fill group {group} of order {}",
                values.len(),
                group.order()
            )));
        }
        if sample_rate.len() != group.dims() {
            return Err(FifError::InvalidSignal(format!(
                "{} sample rates given for a {}-dimensional group",
                sample_rate.len(),
                group.dims()
            )));
        }
        if sample_rate.iter().any(|r| !(r.is_finite() && *r > T::zero())) {
            return Err(FifError::InvalidSignal("sample rate must be positive and finite".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(FifError::InvalidSignal(format!("non-finite value at index {i}")));
        }
        Ok(Self { group, values, sample_rate })
    }

    /// A time series on `Z_N`, `N = values.len()`.
    pub fn from_samples(values: Vec<T>, sample_rate: T) -> Result<Self> {
        let group = GroupSpec::cyclic(values.len())?;
        Self::new(group, values, vec![sample_rate])
    }

    /// A row-major grid on `Z_rows x Z_cols` with unit sample spacing.
    pub fn from_grid(rows: usize, cols: usize, values: Vec<T>) -> Result<Self> {
        let group = GroupSpec::product(rows, cols)?;
        Self::new(group, values, vec![T::one(), T::one()])
    }

    /// A signal with the same group and sampling as `self` but new values.
    pub fn with_values(&self, values: Vec<T>) -> Result<Self> {
        Self::new(self.group.clone(), values, self.sample_rate.clone())
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn sample_rate(&self) -> &[T] {
        &self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn norm(&self) -> T {
        l2_norm(&self.values)
    }

    pub fn require_dims(&self, expected: usize) -> Result<()> {
        if self.group.dims() == expected {
            Ok(())
        } else {
            Err(FifError::Dimension { expected, actual: self.group.dims() })
        }
    }

    pub fn require_same_group(&self, other: &GroupSpec) -> Result<()> {
        if &self.group == other {
            Ok(())
        } else {
            Err(FifError::GroupMismatch {
                left: self.group.to_string(),
                right: other.to_string(),
            })
        }
    }

    /// Circular translation: `result(g) = self(g - shift)`.
    pub fn shifted(&self, shift: &[isize]) -> Self {
        assert_eq!(shift.len(), self.group.dims(), "one shift per axis");
        let mut out = vec![T::zero(); self.values.len()];
        match self.group.moduli() {
            [_] => {
                for (i, &v) in self.values.iter().enumerate() {
                    out[self.group.wrap_index(&[i as isize + shift[0]])] = v;
                }
            }
            [rows, cols] => {
                for r in 0..*rows {
                    for c in 0..*cols {
                        let dst = self
                            .group
                            .wrap_index(&[r as isize + shift[0], c as isize + shift[1]]);
                        out[dst] = self.values[r * cols + c];
                    }
                }
            }
            _ => unreachable!("groups have one or two factors"),
        }
        Self { values: out, ..self.clone() }
    }

    /// Entrywise `self - other`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        other.require_same_group(&self.group)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| a - b).collect();
        Ok(Self { values, ..self.clone() })
    }

    pub fn scaled(&self, factor: T) -> Self {
        Self {
            values: self.values.iter().map(|&v| v * factor).collect(),
            ..self.clone()
        }
    }

    /// Duration of a 1-D signal in time units (`N / B`).
    pub fn duration(&self) -> T {
        T::from_usize_lossy(self.group.moduli()[0]) / self.sample_rate[0]
    }
}

/// Complex values over the dual group, indexed like the signal it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    pub(crate) group: GroupSpec,
    pub(crate) values: Vec<Complex<T>>,
    pub(crate) sample_rate: Vec<T>,
}

impl<T: Real> Spectrum<T> {
    pub fn new(group: GroupSpec, values: Vec<Complex<T>>, sample_rate: Vec<T>) -> Result<Self> {
        if values.len() != group.order() {
            return Err(FifError::InvalidSignal(format!(
                "{} spectrum values do not fill group {group}",
                values.len()
            )));
        }
        if sample_rate.len() != group.dims() {
            return Err(FifError::InvalidSignal("one sample rate per axis required".into()));
        }
        Ok(Self { group, values, sample_rate })
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn sample_rate(&self) -> &[T] {
        &self.sample_rate
    }

    pub fn norm(&self) -> T {
        self.values.iter().fold(T::zero(), |acc, v| acc + v.norm_sqr()).sqrt()
    }
}
