//! Signal and grid files.
//!
//! CSV values are written with Rust's shortest round-trip formatting, so a
//! save followed by a load reproduces every `f64` exactly.

use std::fs;
use std::path::Path;

use fif::{Signal64, TFGrid64};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Wav,
    GridCsv,
}

impl Format {
    pub fn from_extension(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("wav") => Format::Wav,
            _ => Format::Csv,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WavEncoding {
    Pcm16,
    Pcm24,
    Pcm32,
    Float32,
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn parse_number(path: &Path, field: &str, line: usize) -> CliResult<f64> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| CliError::parse(path, format!("line {line}: cannot parse {:?} as a number", field.trim())))?;
    if !v.is_finite() {
        return Err(CliError::parse(path, format!("line {line}: non-finite value {v}")));
    }
    Ok(v)
}

/// One value per line (first comma-separated field by default), with an
/// optional non-numeric header line.
pub fn read_csv_column(path: &Path, column: usize) -> CliResult<Vec<f64>> {
    let text = read_text(path)?;
    let mut values = Vec::new();
    let lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    for (k, (i, line)) in lines.enumerate() {
        let field = line
            .split(',')
            .nth(column)
            .ok_or_else(|| CliError::parse(path, format!("line {}: no column {column}", i + 1)))?;
        if k == 0 && field.trim().parse::<f64>().is_err() {
            continue;
        }
        values.push(parse_number(path, field, i + 1)?);
    }
    if values.is_empty() {
        return Err(CliError::parse(path, "file contains no samples"));
    }
    Ok(values)
}

/// A rectangular comma-separated matrix without header.
pub fn read_grid_csv(path: &Path) -> CliResult<(usize, usize, Vec<f64>)> {
    let text = read_text(path)?;
    let mut cols = None;
    let mut rows = 0;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|f| parse_number(path, f, i + 1))
            .collect::<CliResult<Vec<f64>>>()?;
        match cols {
            None => cols = Some(row.len()),
            Some(c) if c != row.len() => {
                return Err(CliError::parse(
                    path,
                    format!("ragged row at line {}: {} values, expected {c}", i + 1, row.len()),
                ))
            }
            _ => {}
        }
        rows += 1;
        values.extend(row);
    }
    match cols {
        Some(c) => Ok((rows, c, values)),
        None => Err(CliError::parse(path, "file contains no rows")),
    }
}

pub fn read_wav(path: &Path) -> CliResult<(Vec<f64>, f64)> {
    let mut reader = hound::WavReader::open(path).map_err(|e| wav_error(path, e))?;
    let spec = reader.spec();
    if spec.channels != 1 {
        return Err(CliError::parse(
            path,
            format!("{} channels found; only mono WAV is supported, mix down first (e.g. sox in.wav -c 1 out.wav)", spec.channels),
        ));
    }
    let values: Vec<f64> = match spec.sample_format {
        hound::SampleFormat::Float => reader
            .samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<Result<_, _>>()
            .map_err(|e| wav_error(path, e))?,
        hound::SampleFormat::Int => {
            let scale = 2f64.powi(i32::from(spec.bits_per_sample) - 1);
            reader
                .samples::<i32>()
                .map(|s| s.map(|v| f64::from(v) / scale))
                .collect::<Result<_, _>>()
                .map_err(|e| wav_error(path, e))?
        }
    };
    if values.is_empty() {
        return Err(CliError::parse(path, "WAV file contains no samples"));
    }
    Ok((values, f64::from(spec.sample_rate)))
}

fn wav_error(path: &Path, e: hound::Error) -> CliError {
    match e {
        hound::Error::IoError(io) => CliError::io(path, io),
        other => CliError::parse(path, format!("invalid WAV: {other}")),
    }
}

/// Writes a mono WAV; integer encodings clip to `[-1, 1)`.
pub fn write_wav(path: &Path, values: &[f64], sample_rate: f64, encoding: WavEncoding) -> CliResult<()> {
    if sample_rate.fract() != 0.0 || !(1.0..=f64::from(u32::MAX)).contains(&sample_rate) {
        return Err(CliError::Usage(format!("WAV needs an integer sample rate, got {sample_rate}")));
    }
    let (bits, format) = match encoding {
        WavEncoding::Pcm16 => (16, hound::SampleFormat::Int),
        WavEncoding::Pcm24 => (24, hound::SampleFormat::Int),
        WavEncoding::Pcm32 => (32, hound::SampleFormat::Int),
        WavEncoding::Float32 => (32, hound::SampleFormat::Float),
    };
    let spec = hound::WavSpec { channels: 1, sample_rate: sample_rate as u32, bits_per_sample: bits, sample_format: format };
    let mut writer = hound::WavWriter::create(path, spec).map_err(|e| wav_error(path, e))?;
    for &v in values {
        let written = if format == hound::SampleFormat::Float {
            writer.write_sample(v as f32)
        } else {
            let scale = 2f64.powi(i32::from(bits) - 1);
            let q = (v * scale).round().clamp(-scale, scale - 1.0) as i32;
            writer.write_sample(q)
        };
        written.map_err(|e| wav_error(path, e))?;
    }
    writer.finalize().map_err(|e| wav_error(path, e))
}

pub fn load_signal(path: &Path, format: Format, sample_rate: Option<f64>, column: usize) -> CliResult<Signal64> {
    if !path.exists() {
        return Err(CliError::io(path, std::io::Error::new(std::io::ErrorKind::NotFound, "no such file")));
    }
    let (values, rate) = match format {
        Format::Csv => (read_csv_column(path, column)?, sample_rate.unwrap_or(1.0)),
        Format::Wav => {
            if sample_rate.is_some() {
                return Err(CliError::Usage("--sample-rate cannot be combined with WAV input".into()));
            }
            read_wav(path)?
        }
        Format::GridCsv => {
            return Err(CliError::Usage("grid input is only accepted by decompose-2d".into()));
        }
    };
    if values.len() < 2 {
        return Err(CliError::parse(path, "need at least two samples"));
    }
    Ok(Signal64::from_samples(values, rate)?)
}

pub fn load_grid(path: &Path) -> CliResult<Signal64> {
    let (rows, cols, values) = read_grid_csv(path)?;
    if rows < 2 || cols < 2 {
        return Err(CliError::parse(path, format!("grid is {rows} x {cols}; both sides must be at least 2")));
    }
    Ok(Signal64::from_grid(rows, cols, values)?)
}

/// Shortest text that parses back to exactly `v`, switching to exponent
/// form for very small or large magnitudes.
pub fn format_value(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

/// Columns of equal length under a header line.
pub fn columns_to_csv(header: &[String], columns: &[&[f64]]) -> String {
    let rows = columns.first().map_or(0, |c| c.len());
    let mut out = header.join(",");
    out.push('\n');
    for r in 0..rows {
        for (k, col) in columns.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            out.push_str(&format_value(col[r]));
        }
        out.push('\n');
    }
    out
}

pub fn grid_to_csv(values: &[f64], cols: usize) -> String {
    let mut out = String::new();
    for row in values.chunks(cols) {
        let line: Vec<String> = row.iter().map(|&v| format_value(v)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn write_tfgrid(path: &Path, grid: &TFGrid64) -> CliResult<()> {
    write_text(path, &grid.to_text())
}

pub fn read_tfgrid(path: &Path) -> CliResult<TFGrid64> {
    TFGrid64::from_text(&read_text(path)?).map_err(|e| CliError::parse(path, e.to_string()))
}

/// Least-squares line through `(i, values[i])`.
pub fn linear_trend(values: &[f64]) -> Vec<f64> {
    let n = values.len() as f64;
    let mean_x = (n - 1.0) / 2.0;
    let mean_y = values.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, &y) in values.iter().enumerate() {
        let dx = i as f64 - mean_x;
        sxy += dx * (y - mean_y);
        sxx += dx * dx;
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (0..values.len()).map(|i| mean_y + slope * (i as f64 - mean_x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trend_of_a_line_is_the_line() {
        let v: Vec<f64> = (0..10).map(|i| 3.0 - 0.5 * i as f64).collect();
        let t = linear_trend(&v);
        for (a, b) in v.iter().zip(&t) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn csv_layout() {
        let text = columns_to_csv(&["a".into(), "b".into()], &[&[1.0, 0.1], &[-2.5, 1e-300]]);
        assert_eq!(text, "a,b\n1,-2.5\n0.1,1e-300\n");
        assert_eq!(grid_to_csv(&[1.0, 2.0, 3.0, 4.0], 2), "1,2\n3,4\n");
    }

    #[test]
    fn formatted_values_round_trip() {
        for v in [0.0, -0.0, 1.0, 0.1, 1e-4, 9.99e-5, 1.8390244105739e-15, 123456.789, 1e15, f64::MAX, f64::MIN_POSITIVE, 5e-324] {
            let text = format_value(v);
            assert_eq!(text.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{text}");
        }
        assert_eq!(format_value(2.5e-7), "2.5e-7");
    }

    #[test]
    fn extension_picks_format() {
        assert_eq!(Format::from_extension(Path::new("a/b.WAV")), Format::Wav);
        assert_eq!(Format::from_extension(Path::new("a/b.csv")), Format::Csv);
        assert_eq!(Format::from_extension(Path::new("noext")), Format::Csv);
    }
}
