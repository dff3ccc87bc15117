mod common;

use common::*;
use fif::{
    decompose, imfogram, local_energy, local_frequency, local_track, spectrogram, DecompositionConfig64,
    DecompositionResult64, ImfRecord, ImfogramConfig64, Signal64, StopReason, TFGrid64,
};
use proptest::prelude::*;

const RATE: f64 = 1024.0;

fn record(values: Vec<f64>, ell: f64) -> ImfRecord<f64> {
    ImfRecord {
        index: 1,
        values: Signal64::from_samples(values, RATE).unwrap(),
        filter_length: ell,
        power: 1,
        first_zero_freq: 0.0,
    }
}

/// `A sin(2 pi f t + 0.3)`: the phase keeps samples off the zeros.
fn tone(n: usize, freq: f64, amp: f64) -> Vec<f64> {
    (0..n).map(|i| amp * (2.0 * std::f64::consts::PI * freq * i as f64 / RATE + 0.3).sin()).collect()
}

fn single(imf: ImfRecord<f64>) -> DecompositionResult64 {
    let remainder = imf.values.with_values(vec![0.0; imf.values.len()]).unwrap();
    DecompositionResult64 { imfs: vec![imf], remainder, log: vec![], stop: StopReason::TrendOnly }
}

#[test]
fn tone_energy_is_half_amplitude_squared() {
    let r = record(tone(1024, 32.0, 2.0), 64.0);
    let e = local_energy(&r, 1.0).unwrap();
    assert!(e.iter().all(|&v| (v - 2.0).abs() < 0.05 * 2.0));
}

#[test]
fn tone_frequency_within_one_quantum() {
    let r = record(tone(1024, 32.0, 1.0), 64.0);
    let quantum = RATE / (4.0 * 64.0);
    for eta in [0.5, 1.0, 1.7] {
        let f = local_frequency(&r, eta).unwrap();
        assert!(f.iter().all(|&v| (v - 32.0).abs() <= quantum * (1.0 + 1e-12)), "eta {eta}");
    }
}

#[test]
fn frequency_is_bounded_by_nyquist() {
    let alt: Vec<f64> = (0..256).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
    let r = record(alt, 4.0);
    let f = local_frequency(&r, 1.0).unwrap();
    assert!(f.iter().all(|&v| (v - RATE / 2.0).abs() < 1e-9));
    let mut r = rng(41);
    let noisy = record(random_values(&mut r, 300), 3.0);
    for eta in [0.4, 1.0, 5.0, 80.0] {
        let t = local_track(&noisy, eta).unwrap();
        assert!(t.frequency.iter().all(|&v| (0.0..=RATE / 2.0).contains(&v)));
        assert!(t.energy.iter().all(|&v| v >= 0.0));
    }
}

#[test]
fn energy_is_homogeneous() {
    let base = random_values(&mut rng(42), 500);
    let a = -2.5;
    let e1 = local_energy(&record(base.clone(), 7.0), 3.0).unwrap();
    let e2 = local_energy(&record(base.iter().map(|v| a * v).collect(), 7.0), 3.0).unwrap();
    for (x, y) in e1.iter().zip(&e2) {
        assert!((y - a * a * x).abs() <= 1e-12 * y.abs().max(1e-300));
    }
}

#[test]
fn tone_imfogram_concentrates_in_one_bin() {
    let r = single(record(tone(1024, 32.0, 2.0), 64.0));
    let config = ImfogramConfig64 { eta: 1.0, freq_bin_count: 64, ..Default::default() };
    let g = imfogram(&r, &config).unwrap();
    // default time bins are ell / B long
    assert_eq!(g.time_bins(), 16);
    assert!((g.time_edges[1] - 64.0 / RATE).abs() < 1e-15);
    let k = g.freq_bin_of(32.0).unwrap();
    assert_eq!(k, 4);
    for t in 0..g.time_bins() {
        for f in 0..g.freq_bins() {
            if f == k {
                assert!((g.at(t, f) - 2.0).abs() < 0.05 * 2.0);
            } else {
                assert_eq!(g.at(t, f), 0.0);
            }
        }
    }
}

#[test]
fn zero_imf_gives_zero_grid() {
    let r = single(record(vec![0.0; 256], 8.0));
    let g = imfogram(&r, &ImfogramConfig64::default()).unwrap();
    assert!(g.energy.iter().all(|&v| v == 0.0));
}

#[test]
fn frequency_bins_partition_the_energy() {
    let mut r = rng(43);
    let s = Signal64::from_samples(random_values(&mut r, 2000), RATE).unwrap();
    let result = decompose(&s, &DecompositionConfig64 { nu: 2.0, ..Default::default() }).unwrap();
    let config = ImfogramConfig64 { eta: 2.0, time_bin_len: Some(0.1), freq_bin_count: 37, ..Default::default() };
    let g = imfogram(&result, &config).unwrap();
    let n = s.len();
    let bin_of: Vec<usize> = (0..n).map(|i| ((i as f64 / RATE) / 0.1).floor() as usize).collect();
    assert_eq!(g.time_bins(), bin_of[n - 1] + 1);
    let mut expected = vec![0.0; g.time_bins()];
    for imf in &result.imfs {
        let e = local_energy(imf, 2.0).unwrap();
        for t in 0..g.time_bins() {
            let members: Vec<usize> = (0..n).filter(|&i| bin_of[i] == t).collect();
            expected[t] += members.iter().map(|&i| e[i]).sum::<f64>() / members.len() as f64;
        }
    }
    for t in 0..g.time_bins() {
        let row: f64 = g.row(t).iter().sum();
        assert!((row - expected[t]).abs() <= 1e-10 * expected[t].max(1e-300));
    }
}

#[test]
fn small_imfs_can_be_skipped() {
    let big = record(tone(1024, 32.0, 2.0), 64.0);
    let mut small = record(tone(1024, 200.0, 0.01), 8.0);
    small.index = 2;
    let remainder = big.values.with_values(vec![0.0; 1024]).unwrap();
    let r = DecompositionResult64 { imfs: vec![small, big], remainder, log: vec![], stop: StopReason::TrendOnly };
    let keep = imfogram(&r, &ImfogramConfig64 { eta: 1.0, time_bin_len: Some(0.125), ..Default::default() }).unwrap();
    let drop = imfogram(
        &r,
        &ImfogramConfig64 { eta: 1.0, time_bin_len: Some(0.125), min_imf_energy_frac: 0.01, ..Default::default() },
    )
    .unwrap();
    assert!(keep.total() > drop.total());
    let high = keep.freq_bin_of(200.0).unwrap();
    assert!((0..drop.time_bins()).all(|t| drop.at(t, high) == 0.0));
}

#[test]
fn invalid_configs_are_rejected() {
    let r = single(record(tone(256, 32.0, 1.0), 16.0));
    for bad in [
        ImfogramConfig64 { freq_bin_count: 0, ..Default::default() },
        ImfogramConfig64 { freq_max: Some(600.0), ..Default::default() },
        ImfogramConfig64 { time_bin_len: Some(-1.0), ..Default::default() },
        ImfogramConfig64 { eta: 0.01, ..Default::default() },
    ] {
        assert!(imfogram(&r, &bad).is_err());
    }
}

#[test]
fn spectrogram_tone_ridge() {
    for freq in [104.0, 101.0, 250.5] {
        let s = Signal64::from_samples(tone(2048, freq, 1.0), RATE).unwrap();
        let g = spectrogram(&s, 128, 32).unwrap();
        let k = g.freq_bin_of(freq).unwrap();
        assert_eq!(g.freq_edges[0], 0.0);
        assert_eq!(*g.freq_edges.last().unwrap(), RATE / 2.0);
        assert!(g.ridge().iter().all(|&r| r == k), "{freq}");
    }
}

#[test]
fn spectrogram_of_zero_is_zero() {
    let s = Signal64::from_samples(vec![0.0; 300], RATE).unwrap();
    let g = spectrogram(&s, 64, 7).unwrap();
    assert!(g.energy.iter().all(|&v| v == 0.0));
}

/// Sum over frames of the window-weighted mean square, computed directly.
fn weighted_energy(x: &[f64], w: usize, hop: usize) -> f64 {
    let n = x.len();
    let window: Vec<f64> = (0..w).map(|i| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / w as f64).cos()).collect();
    let power: f64 = window.iter().map(|v| v * v).sum();
    (0..n.div_ceil(hop))
        .map(|k| {
            let c = (k * hop + hop / 2).min(n - 1);
            (0..w).map(|i| (window[i] * x[(c + n + i - w / 2) % n]).powi(2)).sum::<f64>() / power
        })
        .sum()
}

#[test]
fn spectrogram_parseval() {
    let x = random_values(&mut rng(44), 700);
    let s = Signal64::from_samples(x.clone(), RATE).unwrap();
    for (w, hop) in [(64, 1), (65, 1), (128, 5), (31, 13)] {
        let g = spectrogram(&s, w, hop).unwrap();
        let oracle = weighted_energy(&x, w, hop);
        assert!((g.total() - oracle).abs() <= 1e-10 * oracle);
        if hop == 1 {
            let energy = norm(&x).powi(2);
            assert!((g.total() - energy).abs() <= 0.01 * energy);
        }
    }
}

#[test]
fn grid_text_round_trip() {
    let s = Signal64::from_samples(random_values(&mut rng(45), 256), RATE).unwrap();
    let g = spectrogram(&s, 32, 16).unwrap();
    assert_eq!(TFGrid64::from_text(&g.to_text()).unwrap(), g);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn tracks_follow_shifts(seed in any::<u64>(), n in 16usize..400, k in -500isize..500, eta in 0.3f64..4.0, ell in 2.0f64..20.0) {
        let r = record(random_values(&mut rng(seed), n), ell);
        let mut moved = r.clone();
        moved.values = r.values.shifted(&[k]);
        let (a, b) = (local_track(&r, eta).unwrap(), local_track(&moved, eta).unwrap());
        let shift = |v: &[f64]| Signal64::from_samples(v.to_vec(), RATE).unwrap().shifted(&[k]).into_values();
        prop_assert_eq!(shift(&a.frequency), b.frequency);
        for (x, y) in shift(&a.energy).iter().zip(&b.energy) {
            prop_assert!((x - y).abs() <= 1e-12 * (1.0 + x.abs()));
        }
    }
}
