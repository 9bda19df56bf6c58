//! Admissible perturbations of the generalized Langford system.
//!
//! * [`algebra`]: exact rational polynomials, vector fields and nullspaces.
//! * [`perturbation`]: the admissibility residual and basis discovery.
//! * [`langford`]: the base system, the perturbed families and equilibria.
//! * [`ode`]: Runge-Kutta integration with optional tangent flow.
//! * [`dynamics`]: closed-form orbits, periodicity conditions, Floquet
//!   multipliers, shift operators, instability and Lyapunov exponents.

pub mod algebra;
pub mod dynamics;
pub mod langford;
pub mod ode;
pub mod perturbation;
pub mod signal;
