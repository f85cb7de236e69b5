//! Controllability Gramians, minimum control energy and information/entropy
//! metrics for linear time-invariant systems, with closed forms for the
//! damped harmonic oscillator.
//!
//! Everything is generic over a [`Scalar`] (`f32` or `f64`). The aliases at
//! the crate root fix the scalar for callers that do not need the generality.

// `!(x > 0)` is used on purpose so that NaN takes the failure branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod energy;
pub mod error;
pub mod expm;
pub mod gramian;
pub mod info_entropy;
pub mod lti;
pub mod quadrature;
pub mod scalar;
pub mod simulate;

pub use energy::{
    min_control_energy, synthesize_min_energy_control, unit_target_energy_bounds, verify_control,
};
pub use error::{Error, Result};
pub use expm::{matrix_exponential, oscillator_closed_form, scaling_and_squaring};
pub use gramian::{
    finite_horizon_gramian, gramian_determinant, gramian_spectrum, infinite_horizon_gramian_lyapunov,
    oscillator_gramian_closed_form, FiniteHorizonMethod, GramianMethod, Horizon,
};
pub use info_entropy::{
    boltzmann_entropy, fisher_dual_determinant, gaussian_differential_entropy, info_entropy_report,
    oscillator_entropy_index, shannon_entropy, thermodynamic_entropy, GaussianDeterminant,
};
pub use lti::{classify_regime, controllability_rank, make_oscillator, DampingRegime};
pub use scalar::Scalar;
pub use simulate::{simulate, simulate_free};

pub use nalgebra::{DMatrix, DVector};

pub type OscillatorParams = lti::OscillatorParams<f64>;
pub type StateSpaceModel = lti::StateSpaceModel<f64>;
pub type Trajectory = simulate::Trajectory<f64>;
pub type GramianResult = gramian::GramianResult<f64>;
pub type GramianSpectrum = gramian::GramianSpectrum<f64>;
pub type ControlProfile = energy::ControlProfile<f64>;
pub type EnergyVerificationReport = energy::EnergyVerificationReport<f64>;
pub type InfoEntropyReport = info_entropy::InfoEntropyReport<f64>;

pub type OscillatorParamsF32 = lti::OscillatorParams<f32>;
pub type StateSpaceModelF32 = lti::StateSpaceModel<f32>;
pub type TrajectoryF32 = simulate::Trajectory<f32>;
pub type GramianResultF32 = gramian::GramianResult<f32>;
pub type GramianSpectrumF32 = gramian::GramianSpectrum<f32>;
pub type ControlProfileF32 = energy::ControlProfile<f32>;
pub type EnergyVerificationReportF32 = energy::EnergyVerificationReport<f32>;
pub type InfoEntropyReportF32 = info_entropy::InfoEntropyReport<f32>;
