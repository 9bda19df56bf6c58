//! Dynamical analyses of the perturbed families: closed-form circles,
//! periodicity conditions, Floquet multipliers, shift operators, escape from
//! the origin and Lyapunov spectra.

mod floquet;
mod instability;
mod integral;
mod lyapunov;
mod orbit;
mod shift;

pub use floquet::{floquet, floquet_at, ComplexValue, FloquetReport, Stability, TRIVIAL_TOL};
pub use instability::{
    derivative_factors, escape_time, instability_probe, sample_starts, EscapeRecord, InstabilityCase,
    InstabilityReport, ESCAPE_CAP,
};
pub use integral::{check_integral_condition, IntegralConditionReport, IntegralTheorem, CONDITION_TOL};
pub use lyapunov::{lyapunov_spectrum, LyapunovSpectrum};
pub use orbit::{closed_form_point, orbit_residual, ClosedFormOrbit, OrbitFamily};
pub use shift::{shift_operator_compare, ShiftComparison};

use crate::langford::ModelError;
use crate::ode::IntegrationError;
use crate::signal::SignalError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DynamicsError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Integration(#[from] IntegrationError),
    #[error(transparent)]
    Signal(#[from] SignalError),
    /// A hypothesis of the analysis does not hold for the given input.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

fn norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    norm([a[0] - b[0], a[1] - b[1], a[2] - b[2]])
}
