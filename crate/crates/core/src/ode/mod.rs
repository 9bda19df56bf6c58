//! Numerical integration of perturbed systems, optionally together with
//! the variational equation `M' = J(t, x(t)) M`, `M(t0) = I`.

mod stepper;
mod trajectory;

pub use trajectory::Trajectory;

use serde::{Deserialize, Serialize};

use crate::langford::PerturbedSystem;

pub type Mat3 = [[f64; 3]; 3];

pub const IDENTITY: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IntegrationError {
    #[error("solution blew up near t = {t}; last good state {state:?}")]
    BlowUp { t: f64, state: Vec<f64> },
    #[error("step limit reached after {steps} steps at t = {t}; last state {state:?}")]
    StepLimit { t: f64, state: Vec<f64>, steps: u64 },
    #[error("non-finite initial time or state")]
    NonFiniteInput,
    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),
}

impl IntegrationError {
    /// Last good `(t, state)` when the integration itself failed.
    pub fn last_good(&self) -> Option<(f64, &[f64])> {
        match self {
            IntegrationError::BlowUp { t, state } | IntegrationError::StepLimit { t, state, .. } => {
                Some((*t, state))
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Rk4Fixed,
    Dopri45Adaptive,
}

/// Integration settings. `step` is the fixed step of RK4; `rtol`/`atol`
/// drive the adaptive Dormand-Prince method.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorConfig {
    pub method: Method,
    pub step: f64,
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: u64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            method: Method::Dopri45Adaptive,
            step: 1e-2,
            rtol: 1e-9,
            atol: 1e-12,
            max_steps: 10_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn rk4(step: f64) -> Self {
        Self {
            method: Method::Rk4Fixed,
            step,
            ..Self::default()
        }
    }

    pub fn dopri(rtol: f64, atol: f64) -> Self {
        Self {
            rtol,
            atol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), IntegrationError> {
        let bad = |what: &str, v: f64| {
            Err(IntegrationError::InvalidConfig(format!("{what} must be positive and finite, got {v}")))
        };
        if !(self.step > 0.0 && self.step.is_finite()) {
            return bad("step", self.step);
        }
        if !(self.rtol > 0.0 && self.rtol.is_finite()) {
            return bad("rtol", self.rtol);
        }
        if !(self.atol > 0.0 && self.atol.is_finite()) {
            return bad("atol", self.atol);
        }
        if self.max_steps == 0 {
            return Err(IntegrationError::InvalidConfig("max_steps must be positive".into()));
        }
        Ok(())
    }
}

/// A time-dependent vector field on R^3 with its spatial Jacobian.
pub trait Dynamics {
    fn rhs(&self, t: f64, p: [f64; 3]) -> [f64; 3];
    fn jacobian(&self, t: f64, p: [f64; 3]) -> Mat3;
}

impl Dynamics for PerturbedSystem {
    fn rhs(&self, t: f64, p: [f64; 3]) -> [f64; 3] {
        PerturbedSystem::rhs(self, t, p)
    }

    fn jacobian(&self, t: f64, p: [f64; 3]) -> Mat3 {
        PerturbedSystem::jacobian(self, t, p)
    }
}

/// Packs state and row-major tangent matrix into one 12-vector.
pub(crate) fn pack(x: [f64; 3], m: &Mat3) -> [f64; 12] {
    let mut y = [0.0; 12];
    y[..3].copy_from_slice(&x);
    for r in 0..3 {
        y[3 + 3 * r..6 + 3 * r].copy_from_slice(&m[r]);
    }
    y
}

pub(crate) fn unpack(y: &[f64; 12]) -> ([f64; 3], Mat3) {
    let mut m = [[0.0; 3]; 3];
    for r in 0..3 {
        m[r].copy_from_slice(&y[3 + 3 * r..6 + 3 * r]);
    }
    ([y[0], y[1], y[2]], m)
}

/// Right-hand side of the combined state + variational system.
pub(crate) fn tangent_rhs<D: Dynamics + ?Sized>(sys: &D, t: f64, y: &[f64; 12]) -> [f64; 12] {
    let (x, m) = unpack(y);
    let f = sys.rhs(t, x);
    let j = sys.jacobian(t, x);
    let mut out = [0.0; 12];
    out[..3].copy_from_slice(&f);
    for r in 0..3 {
        for c in 0..3 {
            out[3 + 3 * r + c] = j[r][0] * m[0][c] + j[r][1] * m[1][c] + j[r][2] * m[2][c];
        }
    }
    out
}

fn state_rhs<D: Dynamics + ?Sized>(sys: &D) -> impl Fn(f64, &[f64; 3]) -> [f64; 3] + '_ {
    move |t, y| sys.rhs(t, *y)
}

/// Integrates from `(t0, x0)` to `t1`, recording every accepted step.
pub fn integrate<D: Dynamics + ?Sized>(
    sys: &D,
    x0: [f64; 3],
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory, IntegrationError> {
    let f = state_rhs(sys);
    let mut traj = Trajectory::start(t0, x0, sys.rhs(t0, x0), None);
    stepper::solve(&f, t0, x0, t1, cfg, None, |t, y, dy| {
        traj.push(t, *y, *dy, None);
        true
    })?;
    Ok(traj)
}

/// Like [`integrate`] with the tangent matrix recorded at every sample.
pub fn integrate_with_tangent<D: Dynamics + ?Sized>(
    sys: &D,
    x0: [f64; 3],
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory, IntegrationError> {
    let f = |t: f64, y: &[f64; 12]| tangent_rhs(sys, t, y);
    let mut traj = Trajectory::start(t0, x0, sys.rhs(t0, x0), Some(IDENTITY));
    stepper::solve(&f, t0, pack(x0, &IDENTITY), t1, cfg, None, |t, y, dy| {
        let (x, m) = unpack(y);
        traj.push(t, x, [dy[0], dy[1], dy[2]], Some(m));
        true
    })?;
    Ok(traj)
}

/// End state of the flow map `x0 -> phi(t1; t0, x0)` without storage.
pub fn flow<D: Dynamics + ?Sized>(
    sys: &D,
    x0: [f64; 3],
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
) -> Result<[f64; 3], IntegrationError> {
    let f = state_rhs(sys);
    Ok(stepper::solve(&f, t0, x0, t1, cfg, None, |_, _, _| true)?.y)
}

/// End state and tangent matrix of the flow map.
pub fn flow_with_tangent<D: Dynamics + ?Sized>(
    sys: &D,
    x0: [f64; 3],
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
) -> Result<([f64; 3], Mat3), IntegrationError> {
    let f = |t: f64, y: &[f64; 12]| tangent_rhs(sys, t, y);
    let out = stepper::solve(&f, t0, pack(x0, &IDENTITY), t1, cfg, None, |_, _, _| true)?;
    Ok(unpack(&out.y))
}

/// Integrates until `stop(t, x)` holds after an accepted step or `t1` is
/// reached. Returns the final time, state and whether `stop` fired.
pub fn integrate_until<D, S>(
    sys: &D,
    x0: [f64; 3],
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
    mut stop: S,
) -> Result<(f64, [f64; 3], bool), IntegrationError>
where
    D: Dynamics + ?Sized,
    S: FnMut(f64, &[f64; 3]) -> bool,
{
    let f = state_rhs(sys);
    let out = stepper::solve(&f, t0, x0, t1, cfg, None, |t, y, _| !stop(t, y))?;
    Ok((out.t, out.y, out.stopped))
}

/// Advances a state with its tangent matrix from `t0` to `t1`, seeding
/// the adaptive step with `h_hint`; returns the new state, tangent and a
/// step hint for the next segment.
pub(crate) fn advance_tangent<D: Dynamics + ?Sized>(
    sys: &D,
    x0: [f64; 3],
    m0: &Mat3,
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
    h_hint: Option<f64>,
) -> Result<([f64; 3], Mat3, f64), IntegrationError> {
    let f = |t: f64, y: &[f64; 12]| tangent_rhs(sys, t, y);
    let out = stepper::solve(&f, t0, pack(x0, m0), t1, cfg, h_hint, |_, _, _| true)?;
    let (x, m) = unpack(&out.y);
    Ok((x, m, out.h_next))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{PolyVectorField, Polynomial};
    use crate::langford::{build_base_system, Params};

    struct Linear(f64);

    impl Dynamics for Linear {
        fn rhs(&self, _t: f64, p: [f64; 3]) -> [f64; 3] {
            p.map(|v| self.0 * v)
        }
        fn jacobian(&self, _t: f64, _p: [f64; 3]) -> Mat3 {
            [[self.0, 0.0, 0.0], [0.0, self.0, 0.0], [0.0, 0.0, self.0]]
        }
    }

    #[test]
    fn zero_field_is_constant() {
        let sys = PerturbedSystem::autonomous(PolyVectorField::zero());
        let traj = integrate_with_tangent(&sys, [0.3, -1.0, 2.0], 0.0, 5.0, &IntegratorConfig::default()).unwrap();
        assert!(traj.states().iter().all(|s| *s == [0.3, -1.0, 2.0]));
        assert_eq!(*traj.tangents().unwrap().last().unwrap(), IDENTITY);
    }

    #[test]
    fn linear_tangent_is_exponential() {
        let a = -0.7;
        let (x, m) = flow_with_tangent(&Linear(a), [1.0, 2.0, 3.0], 0.0, 2.0, &IntegratorConfig::default()).unwrap();
        let g = (a * 2.0f64).exp();
        for r in 0..3 {
            for c in 0..3 {
                let expected = if r == c { g } else { 0.0 };
                assert!((m[r][c] - expected).abs() < 1e-9, "{m:?}");
            }
        }
        assert!((x[2] - 3.0 * g).abs() < 1e-9);
    }

    #[test]
    fn backward_integration() {
        let x = flow(&Linear(1.0), [1.0, 0.0, 0.0], 0.0, -1.0, &IntegratorConfig::default()).unwrap();
        assert!((x[0] - (-1.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn periodic_orbit_returns() {
        // a=-1, b=1, c=-1, d=-1, e=3: circle radius sqrt(2) at z = 1, period 2 pi
        let params = Params::new(
            crate::algebra::int(-1),
            crate::algebra::int(1),
            crate::algebra::int(-1),
            crate::algebra::int(-1),
            crate::algebra::int(3),
        );
        let sys = build_base_system(&params, vec![]).unwrap();
        let x0 = [0.0, 2f64.sqrt(), 1.0];
        let x1 = flow(&sys, x0, 0.0, 2.0 * std::f64::consts::PI, &IntegratorConfig::default()).unwrap();
        let gap: f64 = x0.iter().zip(&x1).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        assert!(gap < 1e-8, "gap {gap}");
    }

    #[test]
    fn blow_up_is_reported_with_last_state() {
        // z' = z^2 from z = 1 blows up at t = 1
        let sys = PerturbedSystem::autonomous(PolyVectorField::new(
            Polynomial::zero(),
            Polynomial::zero(),
            Polynomial::z().pow(2),
        ));
        let err = flow(&sys, [0.0, 0.0, 1.0], 0.0, 2.0, &IntegratorConfig::default()).unwrap_err();
        let (t, state) = err.last_good().expect("blow-up carries state");
        assert!(t < 1.0 && t > 0.9, "t = {t}");
        assert!(state[2].is_finite() && state[2] > 1.0);
    }

    #[test]
    fn rejects_bad_config() {
        let cfg = IntegratorConfig { rtol: 0.0, ..IntegratorConfig::default() };
        assert!(matches!(
            flow(&Linear(1.0), [1.0; 3], 0.0, 1.0, &cfg),
            Err(IntegrationError::InvalidConfig(_))
        ));
        assert_eq!(
            flow(&Linear(1.0), [f64::NAN, 0.0, 0.0], 0.0, 1.0, &IntegratorConfig::default()),
            Err(IntegrationError::NonFiniteInput)
        );
    }

    #[test]
    fn step_limit() {
        let cfg = IntegratorConfig { max_steps: 3, ..IntegratorConfig::default() };
        let err = flow(&Linear(1.0), [1.0; 3], 0.0, 100.0, &cfg).unwrap_err();
        assert!(matches!(err, IntegrationError::StepLimit { .. }));
    }
}
