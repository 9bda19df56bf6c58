use num_traits::Zero;
use rand::Rng;
use serde::Serialize;

use super::{norm, DynamicsError};
use crate::algebra::{int, Polynomial, Rational};
use crate::langford::{Family, ParamsDescription, PerturbedSystem};
use crate::ode::{integrate_until, IntegratorConfig};

/// Longest time a start is followed before it counts as not escaping.
pub const ESCAPE_CAP: f64 = 1e4;

/// Grid used to bound `1 + sum c_i alpha_i(t)` from below.
const FACTOR_GRID: (f64, usize) = (200.0, 20_001);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InstabilityCase {
    /// Three-generator family with `e = 0`: factor `1 + alpha_1 + alpha_2`.
    Eq5ZeroE,
    /// Quintic family with `a = 0`: factor `1 + alpha_1 + alpha_2`.
    Eq6ZeroA,
    /// Diagonal family with `a = 0`: factor `1 + alpha_1`.
    Eq7ZeroA,
}

impl InstabilityCase {
    pub fn of(system: &PerturbedSystem) -> Result<Self, DynamicsError> {
        let p = system
            .params()
            .ok_or_else(|| DynamicsError::InvalidArgument("system has no parameters".into()))?;
        let zero = int(0);
        let (case, ok, what) = match system.family() {
            Family::Eq5 => (Self::Eq5ZeroE, p.e == zero, "e = 0"),
            Family::Eq6 => (Self::Eq6ZeroA, p.a == zero, "a = 0"),
            Family::Eq7 => (Self::Eq7ZeroA, p.a == zero, "a = 0"),
            f => return Err(DynamicsError::Hypothesis(format!("no instability statement for family {f}"))),
        };
        if !ok {
            return Err(DynamicsError::Hypothesis(format!("{} requires {what}", system.family())));
        }
        Ok(case)
    }

    /// Expected weight of each `alpha_i` in the derivative factor.
    pub fn expected_factors(self) -> Vec<i64> {
        match self {
            Self::Eq5ZeroE => vec![1, 1, 0],
            Self::Eq6ZeroA => vec![1, 1, 0, 0],
            Self::Eq7ZeroA => vec![1, 0, 0, 0, 0],
        }
    }
}

/// `3 z^2 (x^2 + y^2 + z^2)`.
fn definite_part() -> Polynomial {
    let (x, y, z) = (Polynomial::x(), Polynomial::y(), Polynomial::z());
    let r2 = &(&x.pow(2) + &y.pow(2)) + &z.pow(2);
    &z.pow(2).scale(&int(3)) * &r2
}

/// Exact factors `(c_0, c_1, ...)` with `grad(-z^3) . F_i = c_i P` for the
/// base field (`i = 0`) and each perturbation field, `P` the definite part.
/// `None` if some field is not a multiple of `P`.
pub fn derivative_factors(system: &PerturbedSystem) -> Option<Vec<Rational>> {
    let p = definite_part();
    let grad_z = Polynomial::z().pow(2).scale(&int(-3));
    let fields = std::iter::once(system.base()).chain(system.terms().iter().map(|t| &t.delta));
    fields
        .map(|f| {
            let g = &grad_z * &f.pz;
            if g.is_zero() {
                return Some(int(0));
            }
            let (m, lead) = g.terms().next_back()?;
            let pm = p.coefficient(m);
            if pm.is_zero() {
                return None;
            }
            let c = lead / pm;
            (p.scale(&c) == g).then_some(c)
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct EscapeRecord {
    pub start: [f64; 3],
    /// Time to leave the outer ball, `None` if it stayed within the cap.
    pub time: Option<f64>,
    pub final_radius: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct InstabilityReport {
    pub case: InstabilityCase,
    pub params: ParamsDescription,
    /// Weights of `1, alpha_1, alpha_2, ...` in the derivative of `-z^3`.
    pub factors: Vec<String>,
    pub identity_holds: bool,
    /// Minimum of `1 + sum c_i alpha_i(t)` over the sampled grid.
    pub min_signal_factor: f64,
    pub radius_in: f64,
    pub radius_out: f64,
    pub cap: f64,
    pub escapes: Vec<EscapeRecord>,
    pub escaped: usize,
    pub excluded_equilibria: usize,
    pub all_escaped: bool,
}

/// Starts on the sphere of radius `r` in the lower half with `z <= -r/2`.
pub fn sample_starts<R: Rng + ?Sized>(rng: &mut R, n: usize, r: f64) -> Vec<[f64; 3]> {
    (0..n)
        .map(|_| {
            let z = -r * rng.gen_range(0.5..=1.0);
            let phi = rng.gen_range(0.0..std::f64::consts::TAU);
            let rho = (r * r - z * z).max(0.0).sqrt();
            [rho * phi.cos(), rho * phi.sin(), z]
        })
        .collect()
}

/// Time for the trajectory from `x0` at `t = 0` to reach `|x| >= radius_out`.
pub fn escape_time(
    system: &PerturbedSystem,
    x0: [f64; 3],
    radius_out: f64,
    cap: f64,
    cfg: &IntegratorConfig,
) -> Result<EscapeRecord, DynamicsError> {
    let (t, x, hit) = integrate_until(system, x0, 0.0, cap, cfg, |_, x| norm(*x) >= radius_out)?;
    Ok(EscapeRecord {
        start: x0,
        time: hit.then_some(t),
        final_radius: norm(x),
    })
}

/// Checks the derivative identity of `V = -z^3` exactly, bounds the signal
/// factor on a grid, then follows every start until it leaves the ball of
/// radius `radius_out` (or the time cap passes). The origin is excluded.
pub fn instability_probe(
    system: &PerturbedSystem,
    radius_in: f64,
    radius_out: f64,
    starts: &[[f64; 3]],
    cfg: &IntegratorConfig,
) -> Result<InstabilityReport, DynamicsError> {
    let case = InstabilityCase::of(system)?;
    if !(radius_in > 0.0 && radius_out > radius_in && radius_out.is_finite()) {
        return Err(DynamicsError::InvalidArgument(format!(
            "need 0 < radius_in < radius_out, got {radius_in} and {radius_out}"
        )));
    }
    let factors = derivative_factors(system);
    let expected: Vec<Rational> = std::iter::once(1).chain(case.expected_factors()).map(int).collect();
    let identity_holds = factors.as_ref() == Some(&expected);
    let weights = case.expected_factors();
    let (span, n) = FACTOR_GRID;
    let min_signal_factor = (0..n)
        .map(|i| {
            let t = span * i as f64 / (n - 1) as f64;
            1.0 + weights
                .iter()
                .enumerate()
                .map(|(k, &w)| w as f64 * system.alpha(k + 1).map_or(0.0, |s| s.eval(t)))
                .sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min);
    if min_signal_factor <= 0.0 {
        return Err(DynamicsError::Hypothesis(format!(
            "signal factor drops to {min_signal_factor}, must stay positive"
        )));
    }
    let mut escapes = Vec::new();
    let mut excluded_equilibria = 0;
    for &x0 in starts {
        if x0 == [0.0; 3] {
            excluded_equilibria += 1;
            continue;
        }
        escapes.push(escape_time(system, x0, radius_out, ESCAPE_CAP, cfg)?);
    }
    let escaped = escapes.iter().filter(|e| e.time.is_some()).count();
    Ok(InstabilityReport {
        case,
        params: ParamsDescription::from_params(system.params().expect("checked by case")),
        factors: factors.map_or_else(Vec::new, |f| f.iter().map(|c| c.to_string()).collect()),
        identity_holds,
        min_signal_factor,
        radius_in,
        radius_out,
        cap: ESCAPE_CAP,
        all_escaped: escaped == escapes.len(),
        escaped,
        excluded_equilibria,
        escapes,
    })
}
