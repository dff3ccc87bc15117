use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use fif::{
    decompose, decompose_2d, imfogram, spectrogram, synth, DecompositionConfig64, DecompositionResult64,
    FilterPrototype64, ImfogramConfig64, LoopEvent, Signal64, StopReason,
};

use crate::error::{CliError, CliResult};
use crate::io::{self, Format, WavEncoding};
use crate::manifest::{OutputDir, RunManifest};
use crate::plot;

#[derive(Debug, Parser)]
#[command(name = "fif", version, about = "Fast iterative filtering, IMFograms and spectrograms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Split a 1-D signal into intrinsic mode functions.
    Decompose(DecomposeArgs),
    /// Split a 2-D grid into intrinsic mode functions.
    #[command(name = "decompose-2d")]
    Decompose2d(Decompose2dArgs),
    /// Decompose, then write the IMFogram and a spectrogram of the input.
    Imfogram(ImfogramArgs),
    /// Short-time Hann spectrogram.
    Spectrogram(SpectrogramArgs),
    /// Write a synthetic test signal.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Detrend {
    Linear,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Signal file (CSV with one value per line, or mono WAV).
    #[arg(long)]
    pub input: PathBuf,
    /// Input format; guessed from the extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Samples per time unit for CSV input [default: 1].
    #[arg(long)]
    pub sample_rate: Option<f64>,
    /// Zero-based CSV column to read.
    #[arg(long, default_value_t = 0)]
    pub column: usize,
    /// Subtract a least-squares line before processing; the signal is
    /// otherwise treated as periodic.
    #[arg(long, value_enum)]
    pub detrend: Option<Detrend>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output directory (created if missing, locked while in use).
    #[arg(long)]
    pub out: PathBuf,
    /// Write PNG plots next to the data files.
    #[arg(long, overrides_with = "no_plot")]
    pub plot: bool,
    /// Skip PNG plots.
    #[arg(long, overrides_with = "plot")]
    pub no_plot: bool,
}

impl OutputArgs {
    fn plots(&self) -> bool {
        !self.no_plot
    }
}

#[derive(Debug, Args)]
pub struct FifArgs {
    /// Stopping tolerance for the inner power and the significance test.
    #[arg(long, default_value_t = 1e-3)]
    pub delta: f64,
    /// Filter length as a multiple of the median extrema spacing.
    #[arg(long, default_value_t = 8.0)]
    pub nu: f64,
    #[arg(long, default_value_t = 64)]
    pub max_imfs: usize,
    /// Filter shape: triangle, double-hann, or file:<path> with "x y" rows.
    #[arg(long, default_value = "double-hann")]
    pub prototype: String,
    /// Factor applied when a filter length has to grow.
    #[arg(long, default_value_t = 1.1)]
    pub growth: f64,
    /// Cap on the inner power [default: ceil(1 / (e * delta))].
    #[arg(long)]
    pub max_power: Option<usize>,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub fif: FifArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct Decompose2dArgs {
    /// Comma-separated grid, one row per line.
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub fif: FifArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ImfogramArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub fif: FifArgs,
    /// Local window half-width in units of each IMF's filter length.
    #[arg(long, default_value_t = 10.0)]
    pub eta: f64,
    /// Time bin width in time units [default: first filter length / rate].
    #[arg(long)]
    pub time_bin: Option<f64>,
    #[arg(long, default_value_t = 64)]
    pub freq_bins: usize,
    /// Top of the frequency axis [default: Nyquist].
    #[arg(long)]
    pub freq_max: Option<f64>,
    /// Skip IMFs below this fraction of the total IMF energy.
    #[arg(long, default_value_t = 0.0)]
    pub min_imf_energy_frac: f64,
    #[command(flatten)]
    pub window: WindowArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct WindowArgs {
    /// Spectrogram window length in samples [default: min(256, N)].
    #[arg(long)]
    pub window: Option<usize>,
    /// Spectrogram hop in samples [default: window / 4].
    #[arg(long)]
    pub hop: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SpectrogramArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub window: WindowArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SynthKind {
    Tone,
    TwoTone,
    Chirp,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum)]
    pub kind: SynthKind,
    #[arg(long, default_value_t = 1024)]
    pub samples: usize,
    #[arg(long, default_value_t = 1024.0)]
    pub sample_rate: f64,
    /// Tone frequency (first tone of two-tone).
    #[arg(long, default_value_t = 50.0)]
    pub freq: f64,
    #[arg(long, default_value_t = 1.0)]
    pub amplitude: f64,
    /// Phase in radians.
    #[arg(long, default_value_t = 0.0)]
    pub phase: f64,
    #[arg(long, default_value_t = 5.0)]
    pub freq2: f64,
    #[arg(long, default_value_t = 1.0)]
    pub amplitude2: f64,
    /// Chirp start frequency.
    #[arg(long, default_value_t = 30.0)]
    pub f0: f64,
    /// Chirp end frequency.
    #[arg(long, default_value_t = 230.0)]
    pub f1: f64,
    #[arg(long, default_value_t = 300.0)]
    pub noise_low: f64,
    #[arg(long, default_value_t = 400.0)]
    pub noise_high: f64,
    #[arg(long, default_value_t = 0.3)]
    pub noise_amplitude: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write a WAV with this encoding instead of CSV.
    #[arg(long, value_enum)]
    pub wav: Option<WavEncoding>,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(cli: Cli, arguments: Vec<String>) -> CliResult<()> {
    match cli.command {
        Command::Decompose(a) => run_decompose(&a, arguments),
        Command::Decompose2d(a) => run_decompose_2d(&a, arguments),
        Command::Imfogram(a) => run_imfogram(&a, arguments),
        Command::Spectrogram(a) => run_spectrogram(&a, arguments),
        Command::Synth(a) => run_synth(&a, arguments),
    }
}

fn parse_prototype(spec: &str) -> CliResult<FilterPrototype64> {
    match spec {
        "triangle" => Ok(FilterPrototype64::triangle()),
        "double-hann" => Ok(FilterPrototype64::double_hann()),
        other => {
            let Some(file) = other.strip_prefix("file:") else {
                return Err(CliError::Usage(format!(
                    "unknown prototype {other:?}; expected triangle, double-hann or file:<path>"
                )));
            };
            let path = Path::new(file);
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            let (xs, ys) = FilterPrototype64::parse_table(&text).map_err(|e| CliError::parse(path, e.to_string()))?;
            FilterPrototype64::tabulated_normalized(xs, ys).map_err(|e| CliError::parse(path, e.to_string()))
        }
    }
}

fn fif_config(args: &FifArgs, manifest: &mut RunManifest) -> CliResult<DecompositionConfig64> {
    let config = DecompositionConfig64 {
        delta: args.delta,
        nu: args.nu,
        max_imfs: args.max_imfs,
        max_inner_power: args.max_power,
        growth_factor: args.growth,
        prototype: parse_prototype(&args.prototype)?,
    };
    config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    manifest.set("delta", args.delta);
    manifest.set("nu", args.nu);
    manifest.set("max_imfs", args.max_imfs as i64);
    manifest.set("prototype", args.prototype.clone());
    manifest.set("growth_factor", args.growth);
    manifest.set("max_inner_power", config.inner_power_cap() as i64);
    Ok(config)
}

/// Loads the input and applies detrending; returns the processed signal and
/// the removed trend.
fn load_input(args: &InputArgs, manifest: &mut RunManifest) -> CliResult<(Signal64, Option<Vec<f64>>)> {
    let format = args.format.unwrap_or_else(|| Format::from_extension(&args.input));
    let signal = io::load_signal(&args.input, format, args.sample_rate, args.column)?;
    manifest.inputs.push(args.input.display().to_string());
    manifest.set("format", format!("{format:?}").to_lowercase());
    manifest.set("sample_rate", signal.sample_rate()[0]);
    manifest.set("column", args.column as i64);
    manifest.set("samples", signal.len() as i64);
    match args.detrend {
        None => {
            manifest.set("detrend", "none");
            Ok((signal, None))
        }
        Some(Detrend::Linear) => {
            manifest.set("detrend", "linear");
            let trend = io::linear_trend(signal.values());
            let rest = signal.values().iter().zip(&trend).map(|(a, b)| a - b).collect();
            Ok((signal.with_values(rest)?, Some(trend)))
        }
    }
}

fn stop_name(stop: StopReason) -> &'static str {
    match stop {
        StopReason::TrendOnly => "trend-only",
        StopReason::SupportExceeded => "support-exceeded",
        StopReason::MaxImfs => "max-imfs",
    }
}

fn event_text(event: &LoopEvent<f64>) -> String {
    match *event {
        LoopEvent::ForcedGrowth { imf, estimated, previous, forced } => {
            format!("imf {imf}: forced growth, estimate {estimated} <= previous {previous}, using {forced}")
        }
        LoopEvent::InsignificantRetry { imf, length, next_length } => {
            format!("imf {imf}: insignificant at length {length}, retrying with {next_length}")
        }
        LoopEvent::PowerCapped { imf, power } => format!("imf {imf}: inner power capped at {power}"),
    }
}

fn record_result(result: &DecompositionResult64, manifest: &mut RunManifest) {
    manifest.record("imf_count", result.imfs.len() as i64);
    manifest.record("stop", stop_name(result.stop));
    let lengths: Vec<f64> = result.imfs.iter().map(|i| i.filter_length).collect();
    let powers: Vec<i64> = result.imfs.iter().map(|i| i.power as i64).collect();
    manifest.record("filter_lengths", lengths);
    manifest.record("powers", powers);
    manifest.record("log", result.log.iter().map(event_text).collect::<Vec<_>>());
}

fn summary_csv(result: &DecompositionResult64) -> String {
    let mut out = String::from("imf,filter_length,power,first_zero_freq\n");
    for imf in &result.imfs {
        out.push_str(&format!("{},{},{},{}\n", imf.index, imf.filter_length, imf.power, imf.first_zero_freq));
    }
    out
}

fn write_imfs(
    dir: &mut OutputDir,
    result: &DecompositionResult64,
    trend: Option<&Vec<f64>>,
) -> CliResult<()> {
    let mut header: Vec<String> = (1..=result.imfs.len()).map(|k| format!("imf_{k}")).collect();
    let mut columns: Vec<&[f64]> = result.imfs.iter().map(|i| i.values.values()).collect();
    header.push("remainder".into());
    columns.push(result.remainder.values());
    if let Some(t) = trend {
        header.push("trend".into());
        columns.push(t);
    }
    dir.write("imfs.csv", &io::columns_to_csv(&header, &columns))?;
    dir.write("imfs_summary.csv", &summary_csv(result))
}

fn run_decompose(args: &DecomposeArgs, arguments: Vec<String>) -> CliResult<()> {
    let mut manifest = RunManifest::new("decompose", arguments);
    let config = fif_config(&args.fif, &mut manifest)?;
    let (signal, trend) = load_input(&args.input, &mut manifest)?;
    let mut dir = OutputDir::acquire(&args.output.out)?;
    let result = decompose(&signal, &config)?;
    record_result(&result, &mut manifest);
    write_imfs(&mut dir, &result, trend.as_ref())?;
    if args.output.plots() {
        plot::imf_panels(&result, &dir.path("imfs.png"))?;
        dir.note("imfs.png");
    }
    manifest.set("plot", args.output.plots());
    dir.finish(manifest)
}

fn run_decompose_2d(args: &Decompose2dArgs, arguments: Vec<String>) -> CliResult<()> {
    let mut manifest = RunManifest::new("decompose-2d", arguments);
    let config = fif_config(&args.fif, &mut manifest)?;
    let grid = io::load_grid(&args.input)?;
    manifest.inputs.push(args.input.display().to_string());
    let (rows, cols) = (grid.group().moduli()[0], grid.group().moduli()[1]);
    manifest.set("rows", rows as i64);
    manifest.set("cols", cols as i64);
    let mut dir = OutputDir::acquire(&args.output.out)?;
    let result = decompose_2d(&grid, &config)?;
    record_result(&result, &mut manifest);
    let named: Vec<(String, &Signal64)> = result
        .imfs
        .iter()
        .map(|i| (format!("imf_{:02}", i.index), &i.values))
        .chain([("remainder".to_string(), &result.remainder)])
        .collect();
    for (name, s) in &named {
        dir.write(&format!("{name}.csv"), &io::grid_to_csv(s.values(), cols))?;
        if args.output.plots() {
            plot::grid_image(s.values(), rows, cols, &dir.path(&format!("{name}.png")))?;
            dir.note(&format!("{name}.png"));
        }
    }
    dir.write("imfs_summary.csv", &summary_csv(&result))?;
    manifest.set("plot", args.output.plots());
    dir.finish(manifest)
}

fn window_params(args: &WindowArgs, n: usize, manifest: &mut RunManifest) -> (usize, usize) {
    let window = args.window.unwrap_or(256.min(n));
    let hop = args.hop.unwrap_or((window / 4).max(1));
    manifest.set("window", window as i64);
    manifest.set("hop", hop as i64);
    (window, hop)
}

fn write_spectrogram(
    dir: &mut OutputDir,
    signal: &Signal64,
    window: usize,
    hop: usize,
    plots: bool,
) -> CliResult<()> {
    let grid = spectrogram(signal, window, hop).map_err(|e| CliError::Usage(e.to_string()))?;
    dir.write("spectrogram.txt", &grid.to_text())?;
    if plots {
        plot::heat_map(&grid, &dir.path("spectrogram.png"))?;
        dir.note("spectrogram.png");
    }
    Ok(())
}

fn run_imfogram(args: &ImfogramArgs, arguments: Vec<String>) -> CliResult<()> {
    let mut manifest = RunManifest::new("imfogram", arguments);
    let config = fif_config(&args.fif, &mut manifest)?;
    let (signal, trend) = load_input(&args.input, &mut manifest)?;
    let tf = ImfogramConfig64 {
        eta: args.eta,
        time_bin_len: args.time_bin,
        freq_bin_count: args.freq_bins,
        freq_max: args.freq_max,
        min_imf_energy_frac: args.min_imf_energy_frac,
    };
    if !(tf.eta > 0.0) || args.freq_bins == 0 || !(tf.min_imf_energy_frac >= 0.0) {
        return Err(CliError::Usage("--eta and --freq-bins must be positive, --min-imf-energy-frac nonnegative".into()));
    }
    manifest.set("eta", args.eta);
    manifest.set("freq_bins", args.freq_bins as i64);
    manifest.set("min_imf_energy_frac", args.min_imf_energy_frac);
    if let Some(t) = args.time_bin {
        manifest.set("time_bin", t);
    }
    if let Some(f) = args.freq_max {
        manifest.set("freq_max", f);
    }
    let (window, hop) = window_params(&args.window, signal.len(), &mut manifest);
    let mut dir = OutputDir::acquire(&args.output.out)?;
    let result = decompose(&signal, &config)?;
    record_result(&result, &mut manifest);
    write_imfs(&mut dir, &result, trend.as_ref())?;
    let grid = imfogram(&result, &tf)?;
    dir.write("imfogram.txt", &grid.to_text())?;
    if args.output.plots() {
        plot::imf_panels(&result, &dir.path("imfs.png"))?;
        dir.note("imfs.png");
        plot::heat_map(&grid, &dir.path("imfogram.png"))?;
        dir.note("imfogram.png");
    }
    write_spectrogram(&mut dir, &signal, window, hop, args.output.plots())?;
    manifest.set("plot", args.output.plots());
    dir.finish(manifest)
}

fn run_spectrogram(args: &SpectrogramArgs, arguments: Vec<String>) -> CliResult<()> {
    let mut manifest = RunManifest::new("spectrogram", arguments);
    let (signal, _) = load_input(&args.input, &mut manifest)?;
    let (window, hop) = window_params(&args.window, signal.len(), &mut manifest);
    let mut dir = OutputDir::acquire(&args.output.out)?;
    write_spectrogram(&mut dir, &signal, window, hop, args.output.plots())?;
    manifest.set("plot", args.output.plots());
    dir.finish(manifest)
}

fn run_synth(args: &SynthArgs, arguments: Vec<String>) -> CliResult<()> {
    let mut manifest = RunManifest::new("synth", arguments);
    let (n, rate) = (args.samples, args.sample_rate);
    let first = synth::Tone { freq: args.freq, amplitude: args.amplitude, phase: args.phase };
    let signal: Signal64 = match args.kind {
        SynthKind::Tone => synth::tone(n, rate, first),
        SynthKind::TwoTone => synth::two_tone(n, rate, first, synth::Tone::new(args.freq2, args.amplitude2)),
        SynthKind::Chirp => synth::chirp_in_noise(
            n,
            rate,
            &synth::ChirpInNoise {
                f0: args.f0,
                f1: args.f1,
                amplitude: args.amplitude,
                noise_band: (args.noise_low, args.noise_high),
                noise_amplitude: args.noise_amplitude,
                seed: args.seed,
            },
        ),
    }
    .map_err(|e| CliError::Usage(e.to_string()))?;
    manifest.set("kind", format!("{:?}", args.kind).to_lowercase());
    manifest.set("samples", n as i64);
    manifest.set("sample_rate", rate);
    match args.kind {
        SynthKind::Tone => {
            manifest.set("freq", args.freq);
            manifest.set("amplitude", args.amplitude);
            manifest.set("phase", args.phase);
        }
        SynthKind::TwoTone => {
            manifest.set("freq", args.freq);
            manifest.set("amplitude", args.amplitude);
            manifest.set("phase", args.phase);
            manifest.set("freq2", args.freq2);
            manifest.set("amplitude2", args.amplitude2);
        }
        SynthKind::Chirp => {
            manifest.set("f0", args.f0);
            manifest.set("f1", args.f1);
            manifest.set("amplitude", args.amplitude);
            manifest.set("noise_low", args.noise_low);
            manifest.set("noise_high", args.noise_high);
            manifest.set("noise_amplitude", args.noise_amplitude);
            manifest.set("seed", args.seed as i64);
        }
    }
    let mut dir = OutputDir::acquire(&args.out)?;
    match args.wav {
        Some(encoding) => {
            io::write_wav(&dir.path("signal.wav"), signal.values(), rate, encoding)?;
            dir.note("signal.wav");
            manifest.set("wav", format!("{encoding:?}").to_lowercase());
        }
        None => dir.write("signal.csv", &io::columns_to_csv(&["signal".into()], &[signal.values()]))?,
    }
    dir.finish(manifest)
}
