//! Cubic nonlinear squeezing of collective-spin states.
//!
//! The crate builds the Dicke-basis spin operators for `N` atoms, the cubic
//! witness operator `O_c(χ) = U_c(χ) Jy U_c(χ)†`, the twist-and-turn family of
//! Gaussian-like benchmark states, and the squeezing parameters obtained by
//! comparing the witness variance of a tested state against the benchmark
//! minimum. A harmonic-oscillator module provides the large-`N` limit.
//!
//! All numerics are generic over the real scalar (`f32` or `f64`); the
//! aliases at the crate root fix the scalar to `f64`, which is what the
//! reported tolerances assume.

pub mod benchmark;
pub mod calibration;
pub mod cubic;
pub mod error;
pub mod husimi;
pub mod linalg;
pub mod minimize;
pub mod oscillator;
pub mod rotation;
pub mod spin;
pub mod squeezing;

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

pub use error::{Error, Result};

/// Real scalar usable throughout the crate.
pub trait Real: RealField + Copy + Default + FromPrimitive + ToPrimitive {}

impl<T> Real for T where T: RealField + Copy + Default + FromPrimitive + ToPrimitive {}

/// Converts an `f64` literal into the working scalar.
#[inline]
pub fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("scalar conversion from f64")
}

/// Converts the working scalar back to `f64` (for reporting).
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().expect("scalar conversion to f64")
}

/// Absolute tolerance `base`, widened for low-precision scalars.
#[inline]
pub fn tol<T: Real>(base: f64) -> T {
    let eps = to_f64(T::default_epsilon());
    real(base.max(64.0 * eps))
}

pub type C64 = nalgebra::Complex<f64>;

pub type SpinSystem = spin::SpinSystem<f64>;
pub type SpinOperator = spin::SpinOperator<f64>;
pub type QuantumState = spin::QuantumState<f64>;
pub type RotationSpec = rotation::RotationSpec<f64>;
pub type CubicParams = cubic::CubicParams<f64>;
pub type TwistTurnParams = benchmark::TwistTurnParams<f64>;
pub type BenchmarkFamily = benchmark::BenchmarkFamily<f64>;
pub type BenchmarkResult = benchmark::BenchmarkResult<f64>;
pub type CalibrationReport = calibration::CalibrationReport<f64>;
pub type SqueezingResult = squeezing::SqueezingResult<f64>;
pub type Squeezer = squeezing::Squeezer<f64>;
pub type SpinContext = calibration::SpinContext<f64>;
pub type FockSpace = oscillator::FockSpace<f64>;
pub type GaussianMoments = oscillator::GaussianMoments<f64>;

pub type SpinSystemF32 = spin::SpinSystem<f32>;
pub type SpinOperatorF32 = spin::SpinOperator<f32>;
pub type QuantumStateF32 = spin::QuantumState<f32>;
pub type RotationSpecF32 = rotation::RotationSpec<f32>;

pub use spin::Axis;
pub use calibration::RotationMode;
pub use squeezing::{AmplitudeConvention, Settings, UseCase};
