//! Time-frequency views of a decomposition.
//!
//! Each IMF `f` produced with filter length `ell` gets a local energy (mean
//! of `f^2` over a centered window of half-width `eta * ell` samples) and a
//! local frequency (zero crossings in the same window divided by four times
//! the window half-width in time units). The IMFogram accumulates, per
//! rectangle of a uniform time-frequency partition, the time-averaged local
//! energy of every IMF whose local frequency falls in the rectangle's band.
//!
//! A Hann-windowed short-time spectrogram is provided on the same [`TFGrid`]
//! type for side-by-side comparison.

use std::fmt::Write as _;

use crate::decompose::{DecompositionResult, ImfRecord};
use crate::error::{FifError, Result};
use crate::fourier::Transform;
use crate::group::{GroupSpec, Signal};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct ImfogramConfig<T> {
    /// Window half-width in units of the IMF's filter length.
    pub eta: T,
    /// Width of a time bin in time units; `None` uses `ell(w_1) / B`.
    pub time_bin_len: Option<T>,
    pub freq_bin_count: usize,
    /// Upper edge of the frequency axis; `None` uses Nyquist.
    pub freq_max: Option<T>,
    /// IMFs carrying less than this fraction of the total IMF energy are
    /// skipped.
    pub min_imf_energy_frac: T,
}

impl<T: Real> Default for ImfogramConfig<T> {
    fn default() -> Self {
        Self {
            eta: T::lit(10.0),
            time_bin_len: None,
            freq_bin_count: 64,
            freq_max: None,
            min_imf_energy_frac: T::zero(),
        }
    }
}

/// Local energy and local frequency of one IMF at every sample.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalTrack<T> {
    pub imf_index: usize,
    pub energy: Vec<T>,
    pub frequency: Vec<T>,
}

/// Energy per rectangle of a time-frequency partition, row-major with one
/// row per time bin.
#[derive(Debug, Clone, PartialEq)]
pub struct TFGrid<T> {
    pub time_edges: Vec<T>,
    pub freq_edges: Vec<T>,
    pub energy: Vec<T>,
}

impl<T: Real> TFGrid<T> {
    pub fn new(time_edges: Vec<T>, freq_edges: Vec<T>, energy: Vec<T>) -> Result<Self> {
        let ascending = |e: &[T]| e.len() >= 2 && e.windows(2).all(|w| w[0] < w[1]);
        if !ascending(&time_edges) || !ascending(&freq_edges) {
            return Err(FifError::InvalidParameter("grid edges must be ascending".into()));
        }
        if energy.len() != (time_edges.len() - 1) * (freq_edges.len() - 1) {
            return Err(FifError::InvalidParameter("energy matrix does not match edges".into()));
        }
        Ok(Self { time_edges, freq_edges, energy })
    }

    fn zeros(time_edges: Vec<T>, freq_edges: Vec<T>) -> Self {
        let size = (time_edges.len() - 1) * (freq_edges.len() - 1);
        Self { time_edges, freq_edges, energy: vec![T::zero(); size] }
    }

    pub fn time_bins(&self) -> usize {
        self.time_edges.len() - 1
    }

    pub fn freq_bins(&self) -> usize {
        self.freq_edges.len() - 1
    }

    pub fn at(&self, time_bin: usize, freq_bin: usize) -> T {
        self.energy[time_bin * self.freq_bins() + freq_bin]
    }

    pub fn row(&self, time_bin: usize) -> &[T] {
        let f = self.freq_bins();
        &self.energy[time_bin * f..(time_bin + 1) * f]
    }

    /// Frequency bin of maximal energy per time bin (lowest bin on ties).
    pub fn ridge(&self) -> Vec<usize> {
        (0..self.time_bins())
            .map(|t| {
                self.row(t)
                    .iter()
                    .enumerate()
                    .fold((0, T::neg_infinity()), |best, (k, &v)| if v > best.1 { (k, v) } else { best })
                    .0
            })
            .collect()
    }

    /// Index of the frequency bin containing `freq` (half-open bins, top
    /// bin closed), if any.
    pub fn freq_bin_of(&self, freq: T) -> Option<usize> {
        freq_bin(&self.freq_edges, freq)
    }

    pub fn total(&self) -> T {
        self.energy.iter().fold(T::zero(), |a, &v| a + v)
    }

    /// Text form: a `time_edges` line, a `freq_edges` line, then one line of
    /// energies per time bin.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let join = |v: &[T]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        let _ = writeln!(out, "time_edges {}", join(&self.time_edges));
        let _ = writeln!(out, "freq_edges {}", join(&self.freq_edges));
        for t in 0..self.time_bins() {
            let _ = writeln!(out, "{}", join(self.row(t)));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |m: String| FifError::InvalidParameter(format!("grid text: {m}"));
        let parse_row = |line: &str, lineno: usize| -> Result<Vec<T>> {
            line.split_whitespace()
                .map(|f| f.parse::<f64>().map(T::lit).map_err(|_| bad(format!("line {lineno}: {f:?}"))))
                .collect()
        };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let mut header = |key: &str| -> Result<Vec<T>> {
            let (i, line) = lines.next().ok_or_else(|| bad(format!("missing {key}")))?;
            let rest = line
                .trim()
                .strip_prefix(key)
                .ok_or_else(|| bad(format!("line {}: expected {key}", i + 1)))?;
            parse_row(rest, i + 1)
        };
        let time_edges = header("time_edges")?;
        let freq_edges = header("freq_edges")?;
        let mut energy = Vec::new();
        for (i, line) in lines {
            let row = parse_row(line, i + 1)?;
            if row.len() + 1 != freq_edges.len() {
                return Err(bad(format!("line {}: expected {} values", i + 1, freq_edges.len() - 1)));
            }
            energy.extend(row);
        }
        Self::new(time_edges, freq_edges, energy)
    }
}

fn freq_bin<T: Real>(edges: &[T], freq: T) -> Option<usize> {
    let last = edges.len() - 1;
    if freq < edges[0] || freq > edges[last] {
        return None;
    }
    let k = edges.partition_point(|&e| e <= freq);
    Some(k.saturating_sub(1).min(last - 1))
}

/// Window half-width in samples, or `None` when the window covers the
/// whole circle.
fn window_half_width<T: Real>(imf: &ImfRecord<T>, eta: T) -> Result<Option<usize>> {
    imf.values.require_dims(1)?;
    let h = (eta * imf.filter_length).round();
    if !(h >= T::one()) || !h.is_finite() {
        return Err(FifError::InvalidParameter(format!(
            "window eta * ell = {} is below one sample",
            eta * imf.filter_length
        )));
    }
    let h = h.to_usize().unwrap_or(usize::MAX);
    let n = imf.values.len();
    if h >= n || 2 * h + 1 > n {
        log::info!("IMF {}: window of half-width {h} exceeds {n} samples, using the full circle", imf.index);
        return Ok(None);
    }
    Ok(Some(h))
}

/// Circular sums `sum_{k = i - before}^{i + after} x[k]` for every `i`.
fn window_sums<T: Real>(x: &[T], before: usize, after: usize) -> Vec<T> {
    let n = x.len();
    let mut prefix = Vec::with_capacity(3 * n + 1);
    prefix.push(T::zero());
    for k in 0..3 * n {
        let last = prefix[k];
        prefix.push(last + x[k % n]);
    }
    (0..n).map(|i| prefix[n + i + after + 1] - prefix[n + i - before]).collect()
}

/// Mean of `f^2` over the window `[i - h, i + h]`.
pub fn local_energy<T: Real>(imf: &ImfRecord<T>, eta: T) -> Result<Vec<T>> {
    let values = imf.values.values();
    let squares: Vec<T> = values.iter().map(|&v| v * v).collect();
    let n = values.len();
    Ok(match window_half_width(imf, eta)? {
        Some(h) => {
            let width = T::from_usize_lossy(2 * h + 1);
            window_sums(&squares, h, h).into_iter().map(|s| (s / width).max(T::zero())).collect()
        }
        None => {
            let mean = squares.iter().fold(T::zero(), |a, &v| a + v) / T::from_usize_lossy(n);
            vec![mean; n]
        }
    })
}

/// Zero crossings between consecutive samples; a zero sample takes the sign
/// of the next nonzero sample.
fn crossings<T: Real>(values: &[T]) -> Vec<T> {
    let n = values.len();
    let Some(anchor) = (0..n).rev().find(|&i| values[i] != T::zero()) else {
        return vec![T::zero(); n];
    };
    let mut sign = vec![false; n];
    let mut next = values[anchor] > T::zero();
    for step in 0..n {
        let i = (anchor + n - step) % n;
        if values[i] != T::zero() {
            next = values[i] > T::zero();
        }
        sign[i] = next;
    }
    (0..n)
        .map(|k| if sign[k] != sign[(k + 1) % n] { T::one() } else { T::zero() })
        .collect()
}

/// Zero-crossing count in the window divided by four times the window
/// half-width, in cycles per time unit.
pub fn local_frequency<T: Real>(imf: &ImfRecord<T>, eta: T) -> Result<Vec<T>> {
    let rate = imf.values.sample_rate()[0];
    let cross = crossings(imf.values.values());
    let n = cross.len();
    Ok(match window_half_width(imf, eta)? {
        // the 2h pairs (k, k+1) for k in [i - h, i + h - 1]
        Some(h) => {
            let scale = rate / T::from_usize_lossy(4 * h);
            window_sums(&cross, h, h - 1).into_iter().map(|c| c.round() * scale).collect()
        }
        None => {
            let total = cross.iter().fold(T::zero(), |a, &v| a + v);
            vec![total * rate / T::from_usize_lossy(2 * n); n]
        }
    })
}

pub fn local_track<T: Real>(imf: &ImfRecord<T>, eta: T) -> Result<LocalTrack<T>> {
    Ok(LocalTrack {
        imf_index: imf.index,
        energy: local_energy(imf, eta)?,
        frequency: local_frequency(imf, eta)?,
    })
}

/// Time bin per sample and the resulting time edges.
fn time_partition<T: Real>(n: usize, rate: T, bin_len: T) -> (Vec<usize>, Vec<T>) {
    let bins: Vec<usize> = (0..n)
        .map(|i| (T::from_usize_lossy(i) / rate / bin_len).floor().to_usize().unwrap_or(0))
        .collect();
    let count = bins[n - 1] + 1;
    let mut edges: Vec<T> = (0..count).map(|k| T::from_usize_lossy(k) * bin_len).collect();
    edges.push(T::from_usize_lossy(n) / rate);
    (bins, edges)
}

/// Aggregates the local tracks of a decomposition onto a uniform
/// time-frequency partition.
pub fn imfogram<T: Real>(result: &DecompositionResult<T>, config: &ImfogramConfig<T>) -> Result<TFGrid<T>> {
    let first = result.imfs.first().ok_or(FifError::EmptyDecomposition)?;
    first.values.require_dims(1)?;
    let n = first.values.len();
    let rate = first.values.sample_rate()[0];
    let nyquist = rate / T::lit(2.0);

    let bin_len = config.time_bin_len.unwrap_or(first.filter_length / rate);
    if !(bin_len > T::zero() && bin_len.is_finite()) {
        return Err(FifError::InvalidParameter("time bin length must be positive".into()));
    }
    let freq_max = config.freq_max.unwrap_or(nyquist);
    if !(freq_max > T::zero()) || freq_max > nyquist * (T::one() + T::epsilon()) {
        return Err(FifError::InvalidParameter(format!("freq_max must lie in (0, {nyquist}]")));
    }
    if config.freq_bin_count == 0 {
        return Err(FifError::InvalidParameter("at least one frequency bin required".into()));
    }

    let (bin_of, time_edges) = time_partition(n, rate, bin_len);
    let mut counts = vec![0usize; time_edges.len() - 1];
    bin_of.iter().for_each(|&b| counts[b] += 1);
    let nf = config.freq_bin_count;
    let freq_edges: Vec<T> = (0..=nf)
        .map(|k| freq_max * T::from_usize_lossy(k) / T::from_usize_lossy(nf))
        .collect();
    let mut grid = TFGrid::zeros(time_edges, freq_edges);

    let norms: Vec<T> = result.imfs.iter().map(|imf| imf.values.norm().powi(2)).collect();
    let total = norms.iter().fold(T::zero(), |a, &v| a + v);
    for (imf, &energy) in result.imfs.iter().zip(&norms) {
        if imf.values.group() != first.values.group() {
            return Err(FifError::GroupMismatch {
                left: first.values.group().to_string(),
                right: imf.values.group().to_string(),
            });
        }
        if energy < config.min_imf_energy_frac * total {
            continue;
        }
        let track = local_track(imf, config.eta)?;
        for i in 0..n {
            if let Some(k) = freq_bin(&grid.freq_edges, track.frequency[i]) {
                let t = bin_of[i];
                grid.energy[t * nf + k] += track.energy[i] / T::from_usize_lossy(counts[t]);
            }
        }
    }
    Ok(grid)
}

/// Short-time power spectrum with a periodic Hann window.
///
/// Frame `k` is centered at sample `k * hop + hop / 2` and wraps around the
/// circle; frequency bins are centered on the DFT frequencies of the window
/// and span `[0, B/2]`. Each frame is normalized so its bins sum to the
/// window-weighted mean square of the signal, which makes a unit-hop
/// spectrogram sum to `||s||^2`.
pub fn spectrogram<T: Real>(signal: &Signal<T>, window_len: usize, hop: usize) -> Result<TFGrid<T>> {
    signal.require_dims(1)?;
    let n = signal.len();
    if window_len < 2 || window_len > n {
        return Err(FifError::InvalidParameter(format!("window length must lie in [2, {n}]")));
    }
    if hop == 0 {
        return Err(FifError::InvalidParameter("hop must be at least 1".into()));
    }
    let rate = signal.sample_rate()[0];
    let w = window_len;
    let window: Vec<T> = (0..w)
        .map(|i| {
            let x = T::PI() * T::from_usize_lossy(i) / T::from_usize_lossy(w);
            x.sin().powi(2)
        })
        .collect();
    let window_power = window.iter().fold(T::zero(), |a, &v| a + v * v);
    let norm = T::from_usize_lossy(w) * window_power;

    let frames = n.div_ceil(hop);
    let bins = w / 2 + 1;
    let mut time_edges: Vec<T> = (0..frames).map(|k| T::from_usize_lossy(k * hop) / rate).collect();
    time_edges.push(T::from_usize_lossy(n) / rate);
    let df = rate / T::from_usize_lossy(w);
    let mut freq_edges = vec![T::zero()];
    freq_edges.extend((1..bins).map(|j| (T::from_usize_lossy(j) - T::lit(0.5)) * df));
    freq_edges.push(rate / T::lit(2.0));

    let transform = Transform::new(&GroupSpec::cyclic(w)?);
    let values = signal.values();
    let mut energy = Vec::with_capacity(frames * bins);
    let mut frame = vec![T::zero(); w];
    for k in 0..frames {
        let center = (k * hop + hop / 2).min(n - 1);
        for (i, slot) in frame.iter_mut().enumerate() {
            let idx = (center + n + i - w / 2) % n;
            *slot = values[idx] * window[i];
        }
        let spectrum = transform.forward_real(&frame);
        for (j, c) in spectrum.iter().take(bins).enumerate() {
            let fold = if j == 0 || (w.is_multiple_of(2) && j == w / 2) { T::one() } else { T::lit(2.0) };
            energy.push(c.norm_sqr() * fold / norm);
        }
    }
    TFGrid::new(time_edges, freq_edges, energy)
}
