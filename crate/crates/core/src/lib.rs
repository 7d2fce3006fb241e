//! Criticality of Schrödinger forms and recurrence of Dirichlet forms,
//! computed on finite truncations.
//!
//! The form, spectral and potential routines are generic over [`Scalar`]
//! (`f32` or `f64`); the aliases below fix `f64`, which is what the model
//! recipes and the Monte Carlo engines use.

pub mod error;
pub mod extrapolate;
pub mod feynman_kac;
pub mod forms;
pub mod io;
pub mod linalg;
pub mod models;
pub mod potential;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Model = forms::DiscreteModel<f64>;
pub type Potential = forms::PotentialMeasure<f64>;
pub type ModelExhaustion = forms::Exhaustion<f64>;
pub type Report = spectral::SpectralReport<f64>;
