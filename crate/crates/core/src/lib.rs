//! Fast iterative filtering on finite abelian groups.
//!
//! Signals live on `Z_N` (periodic sequences) or `Z_N1 x Z_N2` (periodic
//! grids). A nonnegative, even, unit-sum filter `w` acts on a signal by
//! group convolution; in the Fourier domain this is multiplication by the
//! real transfer function `H = F w`. The intrinsic mode function (IMF)
//! operator `(1 - H)^p` strips the slow part of a signal in a single
//! forward/inverse transform pair, and the decomposition loop repeats it
//! with growing filter lengths until only a trend is left.
//!
//! ```
//! use fif::{decompose, synth, DecompositionConfig64, Signal64};
//!
//! let low = synth::Tone::new(5.0, 1.0);
//! let high = synth::Tone::new(80.0, 1.0);
//! let s: Signal64 = synth::two_tone(1024, 1024.0, low, high).unwrap();
//! let result = decompose(&s, &DecompositionConfig64::default()).unwrap();
//! let back = s.with_values(result.reconstruct()).unwrap();
//! assert!(back.sub(&s).unwrap().norm() < 1e-9 * s.norm());
//! ```
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the `*64` and `*32`
//! aliases below fix the scalar type.

pub mod decompose;
pub mod error;
pub mod filter;
pub mod fourier;
pub mod grid;
pub mod group;
pub mod imfogram;
pub mod scalar;
pub mod synth;

pub use decompose::{
    decompose, default_power_cap, fluctuation, imf_apply, moving_average, projection_limit,
    select_power, DecompositionConfig, DecompositionResult, ImfRecord, LoopEvent, StopReason,
};
pub use error::{FifError, Result};
pub use filter::{
    dilate_and_sample, estimate_filter_length, filter_spectrum_info, find_local_extrema,
    make_prototype, DiscreteFilter, FilterPrototype, FilterSpectrumInfo, GroupFilter,
    PrototypeKind, SPECTRAL_ZERO_TOLERANCE,
};
pub use fourier::{convolve, forward_transform, inverse_transform, Transform};
pub use grid::{decompose_2d, estimate_filter_length_2d, make_radial_filter, Filter2D};
pub use group::{GroupSpec, Signal, Spectrum};
pub use imfogram::{
    imfogram, local_energy, local_frequency, local_track, spectrogram, ImfogramConfig,
    LocalTrack, TFGrid,
};
pub use scalar::Real;

pub type Signal64 = Signal<f64>;
pub type Spectrum64 = Spectrum<f64>;
pub type DiscreteFilter64 = DiscreteFilter<f64>;
pub type FilterPrototype64 = FilterPrototype<f64>;
pub type DecompositionConfig64 = DecompositionConfig<f64>;
pub type DecompositionResult64 = DecompositionResult<f64>;
pub type ImfogramConfig64 = ImfogramConfig<f64>;
pub type TFGrid64 = TFGrid<f64>;

pub type Signal32 = Signal<f32>;
pub type Spectrum32 = Spectrum<f32>;
pub type DiscreteFilter32 = DiscreteFilter<f32>;
pub type FilterPrototype32 = FilterPrototype<f32>;
pub type DecompositionConfig32 = DecompositionConfig<f32>;
pub type DecompositionResult32 = DecompositionResult<f32>;
pub type ImfogramConfig32 = ImfogramConfig<f32>;
pub type TFGrid32 = TFGrid<f32>;
