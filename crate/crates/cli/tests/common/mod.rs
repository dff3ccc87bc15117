#![allow(dead_code)]

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fif_command(cwd: &Path) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_fif"));
    cmd.current_dir(cwd);
    cmd
}

pub fn fif(cwd: &Path, args: &[&str]) -> Output {
    fif_command(cwd).args(args).output().expect("binary runs")
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

pub fn expect_success(out: &Output) {
    assert!(out.status.success(), "exit {:?}: {}", out.status.code(), stderr(out));
}

/// Header plus columns of a CSV written by the CLI.
pub fn read_columns(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header: Vec<String> = lines.next().unwrap().split(',').map(str::to_string).collect();
    let mut columns = vec![Vec::new(); header.len()];
    for line in lines {
        for (col, field) in columns.iter_mut().zip(line.split(',')) {
            col.push(field.parse().unwrap());
        }
    }
    (header, columns)
}

/// Every regular file under `dir`, keyed by relative path.
pub fn snapshot(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.insert(path.strip_prefix(dir).unwrap().to_path_buf(), fs::read(&path).unwrap());
            }
        }
    }
    out
}

/// A manifest with its `[timing]` table removed.
pub fn manifest_without_timing(bytes: &[u8]) -> toml::Table {
    let mut table: toml::Table = toml::from_str(std::str::from_utf8(bytes).unwrap()).unwrap();
    table.remove("timing").expect("manifest has a timing table");
    table
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_values(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Unitary DFT by direct summation.
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

pub fn direct_idft(x: &[Complex64]) -> Vec<f64> {
    let n = x.len();
    let scale = 1.0 / (n as f64).sqrt();
    (0..n)
        .map(|j| {
            x.iter()
                .enumerate()
                .map(|(k, c)| (c * Complex64::from_polar(1.0, 2.0 * PI * ((j * k) % n) as f64 / n as f64)).re)
                .sum::<f64>()
                * scale
        })
        .collect()
}

pub fn direct_convolve(u: &[f64], v: &[f64]) -> Vec<f64> {
    let n = u.len();
    (0..n).map(|g| (0..n).map(|h| u[(g + n - h) % n] * v[h]).sum()).collect()
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
