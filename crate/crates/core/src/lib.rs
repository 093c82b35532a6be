//! Random series parametrised by binary strings.
//!
//! A single string α ∈ {−1,+1}^ω drives every object in this crate:
//!
//! * [`rademacher`]: series Σ ε_n u_n with ε_n read from the bits of α,
//!   maximal deviations, contraction and the divergence-block search.
//! * [`fourier`]: random trigonometric series Σ ε_n x_n cos(2πnt + φ_n),
//!   their Fejér sums, L¹ estimates and dyadic block polynomials.
//! * [`gaussian`]: the inverse Gaussian CDF and the normal sequence
//!   ξ_n = g(β_n) extracted from interleaved subsequences of α.
//! * [`brownian`]: the Fourier–Wiener series for Brownian motion, its block
//!   bounds and the piecewise-linear C_n codes.
//! * [`verify`]: Monte Carlo and deterministic checks of the inequalities the
//!   constructions depend on.
//!
//! Monte Carlo loops and grid sweeps run through [`exec::Exec`], which uses
//! rayon when the `parallel` feature is enabled and a plain loop otherwise.
//! Results are identical either way.

pub mod bits;
pub mod brownian;
mod error;
pub mod exec;
pub mod fourier;
pub mod gaussian;
pub mod rademacher;
mod trig;
pub mod verify;

pub use bits::{BitSource, BitString, Origin, SeededBits};
pub use brownian::{FourierWienerSeries, PathSample, PiecewiseLinearPath};
pub use error::{Error, Result};
pub use exec::Exec;
pub use fourier::{BlockIndex, TrigSeriesConfig};
pub use gaussian::NormalSequence;
pub use rademacher::{CoefficientSequence, RademacherSeries};
pub use verify::TrialReport;
