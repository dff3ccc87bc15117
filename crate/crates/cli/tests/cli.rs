mod common;

use std::fs;

use common::*;
use fif_cli::io::{read_csv_column, read_wav, write_wav, WavEncoding};
use tempfile::tempdir;

fn two_tone_csv(dir: &std::path::Path) {
    let s: Vec<f64> = sine(1024, 1024.0, 50.0, 1.0).iter().zip(sine(1024, 1024.0, 5.0, 1.0)).map(|(a, b)| a + b).collect();
    let text: String = s.iter().map(|v| format!("{v}\n")).collect();
    fs::write(dir.join("two_tone.csv"), text).unwrap();
}

#[test]
fn two_tone_columns_reconstruct_the_input() {
    let tmp = tempdir().unwrap();
    two_tone_csv(tmp.path());
    let out = fif(tmp.path(), &["decompose", "--input", "two_tone.csv", "--sample-rate", "1024", "--out", "run", "--no-plot"]);
    expect_success(&out);
    let (header, columns) = read_columns(&tmp.path().join("run/imfs.csv"));
    assert!(columns.len() >= 3, "{header:?}");
    assert_eq!(header[0], "imf_1");
    assert_eq!(header.last().unwrap(), "remainder");
    let input = read_csv_column(&tmp.path().join("two_tone.csv"), 0).unwrap();
    let sum: Vec<f64> = (0..input.len()).map(|i| columns.iter().map(|c| c[i]).sum()).collect();
    assert!(rel_err(&sum, &input) < 1e-8);
    assert!(!tmp.path().join("run/imfs.png").exists());
    let summary = fs::read_to_string(tmp.path().join("run/imfs_summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), columns.len());
}

#[test]
fn detrended_run_adds_a_trend_column() {
    let tmp = tempdir().unwrap();
    let values: Vec<f64> = sine(512, 512.0, 40.0, 1.0).iter().enumerate().map(|(i, v)| v + 0.01 * i as f64).collect();
    fs::write(tmp.path().join("ramp.csv"), values.iter().map(|v| format!("{v}\n")).collect::<String>()).unwrap();
    let out = fif(tmp.path(), &["decompose", "--input", "ramp.csv", "--detrend", "linear", "--out", "run"]);
    expect_success(&out);
    let (header, columns) = read_columns(&tmp.path().join("run/imfs.csv"));
    assert_eq!(header.last().unwrap(), "trend");
    let sum: Vec<f64> = (0..values.len()).map(|i| columns.iter().map(|c| c[i]).sum()).collect();
    assert!(rel_err(&sum, &values) < 1e-8);
    assert!(tmp.path().join("run/imfs.png").exists());
}

#[test]
fn missing_input_names_the_path() {
    let tmp = tempdir().unwrap();
    let out = fif(tmp.path(), &["decompose", "--input", "absent/signal.csv", "--out", "run"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("absent/signal.csv"), "{err}");
    assert_eq!(err.lines().count(), 1);
}

#[test]
fn unparsable_csv_reports_the_line() {
    let tmp = tempdir().unwrap();
    fs::write(tmp.path().join("bad.csv"), "value\n1.0\n2.0\nabc\n").unwrap();
    let out = fif(tmp.path(), &["decompose", "--input", "bad.csv", "--out", "run"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 4"), "{}", stderr(&out));
}

#[test]
fn ragged_grid_is_rejected() {
    let tmp = tempdir().unwrap();
    fs::write(tmp.path().join("grid.csv"), "1,2,3\n4,5,6\n7,8\n").unwrap();
    let out = fif(tmp.path(), &["decompose-2d", "--input", "grid.csv", "--out", "run"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("ragged row at line 3"), "{}", stderr(&out));
}

#[test]
fn grid_run_writes_every_component() {
    let tmp = tempdir().unwrap();
    let n = 32;
    let mut text = String::new();
    for i in 0..n {
        let row: Vec<String> = (0..n)
            .map(|j| {
                let (x, y) = (i as f64 / n as f64, j as f64 / n as f64);
                let v = (2.0 * std::f64::consts::PI * 8.0 * x).sin() * (2.0 * std::f64::consts::PI * 8.0 * y).sin() + x;
                v.to_string()
            })
            .collect();
        text.push_str(&row.join(","));
        text.push('\n');
    }
    fs::write(tmp.path().join("grid.csv"), text).unwrap();
    let out = fif(tmp.path(), &["decompose-2d", "--input", "grid.csv", "--out", "run"]);
    expect_success(&out);
    let run = tmp.path().join("run");
    assert!(run.join("imf_01.csv").exists());
    assert!(run.join("imf_01.png").exists());
    assert!(run.join("remainder.csv").exists());
    let manifest: toml::Table = toml::from_str(&fs::read_to_string(run.join("manifest.toml")).unwrap()).unwrap();
    assert_eq!(manifest["command"].as_str(), Some("decompose-2d"));
    assert_eq!(manifest["config"]["rows"].as_integer(), Some(32));
}

#[test]
fn pcm16_round_trip_is_within_one_step() {
    let tmp = tempdir().unwrap();
    let path = tmp.path().join("tone.wav");
    let values: Vec<f64> = sine(2000, 8000.0, 440.0, 0.9).iter().chain(&[-1.0, 0.99997]).copied().collect();
    write_wav(&path, &values, 8000.0, WavEncoding::Pcm16).unwrap();
    let (back, rate) = read_wav(&path).unwrap();
    assert_eq!(rate, 8000.0);
    assert_eq!(back.len(), values.len());
    let step = 2f64.powi(-15);
    assert!(values.iter().zip(&back).all(|(a, b)| (a - b).abs() <= step));
}

#[test]
fn float_wav_is_exact_in_single_precision() {
    let tmp = tempdir().unwrap();
    let path = tmp.path().join("tone.wav");
    let values = sine(300, 1000.0, 30.0, 0.5);
    write_wav(&path, &values, 1000.0, WavEncoding::Float32).unwrap();
    let (back, _) = read_wav(&path).unwrap();
    assert!(values.iter().zip(&back).all(|(a, b)| *b == f64::from(*a as f32)));
}

#[test]
fn wav_input_feeds_the_decomposition() {
    let tmp = tempdir().unwrap();
    expect_success(&fif(tmp.path(), &["synth", "--kind", "two-tone", "--wav", "pcm24", "--out", "syn"]));
    let out = fif(tmp.path(), &["decompose", "--input", "syn/signal.wav", "--out", "run", "--no-plot"]);
    expect_success(&out);
    let manifest: toml::Table = toml::from_str(&fs::read_to_string(tmp.path().join("run/manifest.toml")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["sample_rate"].as_float(), Some(1024.0));
    assert_eq!(manifest["config"]["format"].as_str(), Some("wav"));
    let clash = fif(tmp.path(), &["decompose", "--input", "syn/signal.wav", "--sample-rate", "10", "--out", "run2"]);
    assert_eq!(clash.status.code(), Some(1));
}

#[test]
fn csv_round_trip_is_exact() {
    let tmp = tempdir().unwrap();
    let values: Vec<f64> = random_values(&mut rng(5), 200).iter().map(|v| v * 1e-9).chain([0.1, -7e22, 5e-324]).collect();
    let text = fif_cli::io::columns_to_csv(&["a".into(), "b".into()], &[&values, &values]);
    let path = tmp.path().join("x.csv");
    fs::write(&path, text).unwrap();
    for column in [0, 1] {
        let back = read_csv_column(&path, column).unwrap();
        assert_eq!(back, values);
    }
}

#[test]
fn synth_csv_matches_the_library() {
    let tmp = tempdir().unwrap();
    expect_success(&fif(tmp.path(), &["synth", "--kind", "chirp", "--samples", "2048", "--seed", "3", "--out", "syn"]));
    let back = read_csv_column(&tmp.path().join("syn/signal.csv"), 0).unwrap();
    let params = fif::synth::ChirpInNoise { seed: 3, ..Default::default() };
    let direct: fif::Signal64 = fif::synth::chirp_in_noise(2048, 1024.0, &params).unwrap();
    assert_eq!(back, direct.values());
}

#[test]
fn spectrogram_window_is_clipped_to_the_signal() {
    let tmp = tempdir().unwrap();
    let values = sine(100, 100.0, 10.0, 1.0);
    fs::write(tmp.path().join("s.csv"), values.iter().map(|v| format!("{v}\n")).collect::<String>()).unwrap();
    let out = fif(tmp.path(), &["spectrogram", "--input", "s.csv", "--sample-rate", "100", "--out", "run", "--no-plot"]);
    expect_success(&out);
    let grid = fif_cli::io::read_tfgrid(&tmp.path().join("run/spectrogram.txt")).unwrap();
    let manifest: toml::Table = toml::from_str(&fs::read_to_string(tmp.path().join("run/manifest.toml")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["window"].as_integer(), Some(100));
    assert_eq!(manifest["config"]["hop"].as_integer(), Some(25));
    assert!(grid.ridge().iter().all(|&k| k == grid.freq_bin_of(10.0).unwrap()));
}

#[test]
fn busy_output_directory_is_refused() {
    let tmp = tempdir().unwrap();
    two_tone_csv(tmp.path());
    fs::create_dir(tmp.path().join("run")).unwrap();
    fs::write(tmp.path().join("run/.fif.lock"), "").unwrap();
    let out = fif(tmp.path(), &["decompose", "--input", "two_tone.csv", "--out", "run"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("in use"));
    fs::remove_file(tmp.path().join("run/.fif.lock")).unwrap();
    expect_success(&fif(tmp.path(), &["decompose", "--input", "two_tone.csv", "--out", "run", "--no-plot"]));
    assert!(!tmp.path().join("run/.fif.lock").exists());
}

#[test]
fn tabulated_prototype_from_file() {
    let tmp = tempdir().unwrap();
    two_tone_csv(tmp.path());
    fs::write(tmp.path().join("proto.txt"), "-0.5 0\n-0.25 1\n0 2\n0.25 1\n0.5 0\n").unwrap();
    let out = fif(
        tmp.path(),
        &["decompose", "--input", "two_tone.csv", "--prototype", "file:proto.txt", "--out", "run", "--no-plot"],
    );
    expect_success(&out);
    let bad = fif(tmp.path(), &["decompose", "--input", "two_tone.csv", "--prototype", "gaussian", "--out", "run2"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn invalid_numbers_exit_with_usage_status() {
    let tmp = tempdir().unwrap();
    two_tone_csv(tmp.path());
    let out = fif(tmp.path(), &["decompose", "--input", "two_tone.csv", "--delta", "-1", "--out", "run"]);
    assert_eq!(out.status.code(), Some(1));
    let out = fif(tmp.path(), &["synth", "--kind", "tone", "--freq", "900", "--out", "syn"]);
    assert_eq!(out.status.code(), Some(1));
    let help = fif(tmp.path(), &["--help"]);
    assert_eq!(help.status.code(), Some(0));
}

#[test]
fn identical_runs_differ_only_in_timing() {
    let tmp = tempdir().unwrap();
    two_tone_csv(tmp.path());
    let args = ["imfogram", "--input", "two_tone.csv", "--sample-rate", "1024", "--out", "run"];
    expect_success(&fif(tmp.path(), &args));
    let first = snapshot(&tmp.path().join("run"));
    expect_success(&fif(tmp.path(), &args));
    let second = snapshot(&tmp.path().join("run"));
    assert_eq!(first.keys().collect::<Vec<_>>(), second.keys().collect::<Vec<_>>());
    for (name, bytes) in &first {
        if name.ends_with("manifest.toml") {
            assert_eq!(manifest_without_timing(bytes), manifest_without_timing(&second[name]));
        } else {
            assert!(bytes == &second[name], "{} differs", name.display());
        }
    }
}

#[test]
fn four_line_csv_with_rate() {
    let tmp = tempdir().unwrap();
    let path = tmp.path().join("four.csv");
    fs::write(&path, "1\n2\n3\n4").unwrap();
    let s = fif_cli::io::load_signal(&path, fif_cli::io::Format::Csv, Some(4.0), 0).unwrap();
    assert_eq!(s.values(), &[1.0, 2.0, 3.0, 4.0]);
    assert_eq!(s.sample_rate(), &[4.0]);
}

#[test]
fn load_errors_are_distinct() {
    let tmp = tempdir().unwrap();
    let empty = tmp.path().join("empty.csv");
    fs::write(&empty, "signal\n\n").unwrap();
    let stereo = tmp.path().join("stereo.wav");
    let spec = hound::WavSpec { channels: 2, sample_rate: 8000, bits_per_sample: 16, sample_format: hound::SampleFormat::Int };
    let mut w = hound::WavWriter::create(&stereo, spec).unwrap();
    for v in [0i16, 1, 2, 3] {
        w.write_sample(v).unwrap();
    }
    w.finalize().unwrap();
    let ragged = tmp.path().join("ragged.csv");
    fs::write(&ragged, "1,2\n3\n").unwrap();
    let messages = [
        fif_cli::io::load_signal(&empty, fif_cli::io::Format::Csv, None, 0).unwrap_err().to_string(),
        fif_cli::io::load_signal(&stereo, fif_cli::io::Format::Wav, None, 0).unwrap_err().to_string(),
        fif_cli::io::load_grid(&ragged).unwrap_err().to_string(),
    ];
    assert!(messages[0].contains("no samples"), "{}", messages[0]);
    assert!(messages[1].contains("mono") && messages[1].contains("mix down"), "{}", messages[1]);
    assert!(messages[2].contains("ragged row at line 2"), "{}", messages[2]);
}

#[test]
fn chirp_imfogram_file_has_a_rising_ridge() {
    let tmp = tempdir().unwrap();
    expect_success(&fif(tmp.path(), &["synth", "--kind", "chirp", "--samples", "4096", "--out", "syn"]));
    let out = fif(
        tmp.path(),
        &["imfogram", "--input", "syn/signal.csv", "--sample-rate", "1024", "--eta", "5", "--time-bin", "0.125", "--out", "tf", "--no-plot"],
    );
    expect_success(&out);
    let grid = fif_cli::io::read_tfgrid(&tmp.path().join("tf/imfogram.txt")).unwrap();
    let ridge = grid.ridge();
    assert_eq!(ridge.len(), 32);
    assert!(ridge.windows(2).all(|w| w[0] <= w[1]), "{ridge:?}");
    assert!(ridge.last() > ridge.first());
    assert!(tmp.path().join("tf/spectrogram.txt").exists());
}
