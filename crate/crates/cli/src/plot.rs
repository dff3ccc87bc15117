//! PNG renderings of decompositions and time-frequency grids.

use std::path::Path;

use fif::{forward_transform, DecompositionResult64, Signal64, TFGrid64};
use image::{Rgb, RgbImage};

use crate::error::{CliError, CliResult};

const BACKGROUND: Rgb<u8> = Rgb([255, 255, 255]);
const INK: Rgb<u8> = Rgb([20, 60, 140]);
const AXIS: Rgb<u8> = Rgb([180, 180, 180]);

fn save(image: &RgbImage, path: &Path) -> CliResult<()> {
    image.save(path).map_err(|e| match e {
        image::ImageError::IoError(io) => CliError::io(path, io),
        other => CliError::parse(path, format!("cannot encode PNG: {other}")),
    })
}

/// Piecewise-linear perceptual colormap from dark blue through green to yellow.
fn colormap(t: f64) -> Rgb<u8> {
    const STOPS: [[f64; 3]; 5] = [
        [68.0, 1.0, 84.0],
        [59.0, 82.0, 139.0],
        [33.0, 145.0, 140.0],
        [94.0, 201.0, 98.0],
        [253.0, 231.0, 37.0],
    ];
    let x = t.clamp(0.0, 1.0) * (STOPS.len() - 1) as f64;
    let i = (x.floor() as usize).min(STOPS.len() - 2);
    let f = x - i as f64;
    let c = |k: usize| (STOPS[i][k] + f * (STOPS[i + 1][k] - STOPS[i][k])).round() as u8;
    Rgb([c(0), c(1), c(2)])
}

/// Maps values to `[0, 1]` on a log scale spanning `decades` below the maximum.
fn log_scale(values: &[f64], decades: f64) -> Vec<f64> {
    let max = values.iter().copied().fold(0.0, f64::max);
    if max <= 0.0 {
        return vec![0.0; values.len()];
    }
    let floor = max.log10() - decades;
    values.iter().map(|&v| if v > 0.0 { (v.log10() - floor) / decades } else { 0.0 }).collect()
}

/// Time runs left to right and frequency bottom to top; colour is log energy
/// over four decades.
pub fn heat_map(grid: &TFGrid64, path: &Path) -> CliResult<()> {
    let (tb, fb) = (grid.time_bins(), grid.freq_bins());
    let cell_w = (720 / tb).max(1) as u32;
    let cell_h = (360 / fb).max(1) as u32;
    let levels = log_scale(&grid.energy, 4.0);
    let mut img = RgbImage::new(cell_w * tb as u32, cell_h * fb as u32);
    for t in 0..tb {
        for f in 0..fb {
            let colour = colormap(levels[t * fb + f]);
            let y0 = (fb - 1 - f) as u32 * cell_h;
            for dx in 0..cell_w {
                for dy in 0..cell_h {
                    img.put_pixel(t as u32 * cell_w + dx, y0 + dy, colour);
                }
            }
        }
    }
    save(&img, path)
}

fn draw_line(img: &mut RgbImage, (x0, y0): (i64, i64), (x1, y1): (i64, i64), colour: Rgb<u8>) {
    let (dx, dy) = ((x1 - x0).abs(), -(y1 - y0).abs());
    let (sx, sy) = (if x0 < x1 { 1 } else { -1 }, if y0 < y1 { 1 } else { -1 });
    let (mut x, mut y, mut err) = (x0, y0, dx + dy);
    loop {
        if x >= 0 && y >= 0 && (x as u32) < img.width() && (y as u32) < img.height() {
            img.put_pixel(x as u32, y as u32, colour);
        }
        if x == x1 && y == y1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
}

/// Polyline of `values` scaled into the box `(x, y, w, h)`, column-decimated
/// to min/max envelopes when there are more samples than pixels.
fn trace(img: &mut RgbImage, values: &[f64], (x, y, w, h): (u32, u32, u32, u32), symmetric: bool) {
    let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let (lo, hi) = if symmetric {
        let m = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
        (-m, m)
    } else if hi > lo {
        (lo, hi)
    } else {
        (lo - 1.0, lo + 1.0)
    };
    let to_y = |v: f64| y as i64 + ((hi - v) / (hi - lo) * (h - 1) as f64).round() as i64;
    draw_line(img, (x as i64, to_y(0.0f64.clamp(lo, hi))), ((x + w - 1) as i64, to_y(0.0f64.clamp(lo, hi))), AXIS);
    let n = values.len();
    let mut prev: Option<(i64, i64)> = None;
    for px in 0..w {
        let a = px as usize * n / w as usize;
        let b = (((px + 1) as usize * n) / w as usize).max(a + 1).min(n);
        let (mn, mx) = values[a..b].iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(p, q), &v| (p.min(v), q.max(v)));
        let col = (x + px) as i64;
        draw_line(img, (col, to_y(mn)), (col, to_y(mx)), INK);
        if let Some(p) = prev {
            draw_line(img, p, (col, to_y(values[a])), INK);
        }
        prev = Some((col, to_y(values[b - 1])));
    }
}

/// Power per nonnegative frequency bin, in decibels relative to the peak.
fn periodogram(signal: &Signal64) -> Vec<f64> {
    let spectrum = forward_transform(signal);
    let n = signal.len();
    let power: Vec<f64> = spectrum.values()[..=n / 2].iter().map(|c| c.norm_sqr()).collect();
    let peak = power.iter().copied().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    power.iter().map(|&p| 10.0 * (p / peak).max(1e-12).log10()).collect()
}

/// One row per IMF and a final row for the remainder: the waveform on the
/// left, its periodogram on the right.
pub fn imf_panels(result: &DecompositionResult64, path: &Path) -> CliResult<()> {
    const ROW: u32 = 90;
    const PAD: u32 = 6;
    const WAVE: u32 = 640;
    const SPEC: u32 = 300;
    let rows: Vec<&Signal64> = result.imfs.iter().map(|i| &i.values).chain([&result.remainder]).collect();
    let mut img = RgbImage::from_pixel(WAVE + SPEC + 3 * PAD, rows.len() as u32 * (ROW + PAD) + PAD, BACKGROUND);
    for (k, s) in rows.iter().enumerate() {
        let top = PAD + k as u32 * (ROW + PAD);
        trace(&mut img, s.values(), (PAD, top, WAVE, ROW), true);
        trace(&mut img, &periodogram(s), (2 * PAD + WAVE, top, SPEC, ROW), false);
    }
    save(&img, path)
}

/// Grayscale image of a grid, symmetric around zero.
pub fn grid_image(values: &[f64], rows: usize, cols: usize, path: &Path) -> CliResult<()> {
    let m = values.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
    let img = RgbImage::from_fn(cols as u32, rows as u32, |x, y| {
        let v = values[y as usize * cols + x as usize];
        let g = (127.5 + 127.5 * v / m).round() as u8;
        Rgb([g, g, g])
    });
    save(&img, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colormap_endpoints() {
        assert_eq!(colormap(0.0), Rgb([68, 1, 84]));
        assert_eq!(colormap(1.0), Rgb([253, 231, 37]));
        assert_eq!(colormap(7.0), colormap(1.0));
    }

    #[test]
    fn log_scale_floor() {
        assert_eq!(log_scale(&[0.0, 0.0], 4.0), vec![0.0, 0.0]);
        let s = log_scale(&[1.0, 1e-2, 1e-6, 0.0], 4.0);
        assert_eq!(s[0], 1.0);
        assert!((s[1] - 0.5).abs() < 1e-12);
        assert!(s[2] < 0.0);
        assert_eq!(s[3], 0.0);
    }
}
