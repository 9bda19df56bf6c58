use std::f64::consts::PI;

use serde::Serialize;

use super::DynamicsError;
use crate::algebra::to_f64;
use crate::langford::{Params, ParamsDescription};
use crate::signal::{Signal, TrigSignal};

/// Satisfaction tolerance for the `2 pi k` and zero-integral conditions.
pub const CONDITION_TOL: f64 = 1e-9;

/// Which periodicity condition to evaluate. `*i` variants concern the
/// three-generator family (`b alpha_1 + alpha_3`), `*ii` the quintic family
/// (`b alpha_1 + alpha_3 + a^4 alpha_4`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IntegralTheorem {
    /// `int_0^{-2 pi/|b|} = 2 pi k`, odd signals, `b != 0`.
    T4i,
    T4ii,
    /// `int_0^{2 pi/b} = 0`, `b != 0`.
    T5i,
    T5ii,
    /// `int_0^omega = 2 pi k`, `b = 0`.
    T6i,
    T6ii,
}

impl IntegralTheorem {
    pub const ALL: [IntegralTheorem; 6] = [Self::T4i, Self::T4ii, Self::T5i, Self::T5ii, Self::T6i, Self::T6ii];

    fn quintic(self) -> bool {
        matches!(self, Self::T4ii | Self::T5ii | Self::T6ii)
    }

    pub fn signal_count(self) -> usize {
        if self.quintic() {
            4
        } else {
            3
        }
    }
}

impl std::str::FromStr for IntegralTheorem {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|t| format!("{t:?}").eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown condition `{s}` (expected one of T4i, T4ii, T5i, T5ii, T6i, T6ii)"))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IntegralConditionReport {
    pub theorem: IntegralTheorem,
    pub params: ParamsDescription,
    pub combination: TrigSignal,
    pub upper_limit: f64,
    pub value: f64,
    /// Target is `2 pi k` with this `k`, or zero when absent.
    pub k: Option<i64>,
    pub target: f64,
    pub residual: f64,
    pub tol: f64,
    pub satisfied: bool,
    /// The integrand is odd by construction, which substitutes for the
    /// integral condition in the zero-target and `b = 0` cases.
    pub combination_is_odd: bool,
}

/// Evaluates the chosen periodicity integral exactly from the closed-form
/// antiderivative of the signal combination. `signals` are
/// `alpha_1, alpha_2, alpha_3 (, alpha_4)`; `omega` is the period for the
/// `b = 0` conditions.
pub fn check_integral_condition(
    theorem: IntegralTheorem,
    params: &Params,
    signals: &[Signal],
    omega: Option<f64>,
) -> Result<IntegralConditionReport, DynamicsError> {
    if signals.len() < theorem.signal_count() {
        return Err(DynamicsError::InvalidArgument(format!(
            "{theorem:?} needs {} signals, got {}",
            theorem.signal_count(),
            signals.len()
        )));
    }
    let exact: Vec<&TrigSignal> = signals
        .iter()
        .map(|s| s.exact())
        .collect::<Result<_, _>>()?;
    let [a, b, ..] = params.as_f64();
    let b_zero = params.b == num_traits::Zero::zero();
    let upper = match theorem {
        IntegralTheorem::T4i | IntegralTheorem::T4ii | IntegralTheorem::T5i | IntegralTheorem::T5ii if b_zero => {
            return Err(DynamicsError::Hypothesis(format!("{theorem:?} requires b != 0")))
        }
        IntegralTheorem::T4i | IntegralTheorem::T4ii => -2.0 * PI / b.abs(),
        IntegralTheorem::T5i | IntegralTheorem::T5ii => 2.0 * PI / b,
        IntegralTheorem::T6i | IntegralTheorem::T6ii => {
            if !b_zero {
                return Err(DynamicsError::Hypothesis(format!("{theorem:?} requires b = 0, got b = {}", params.b)));
            }
            match omega {
                Some(w) if w > 0.0 && w.is_finite() => w,
                _ => return Err(DynamicsError::InvalidArgument("a positive finite omega is required".into())),
            }
        }
    };
    let mut parts = vec![(to_f64(&params.b), exact[0]), (1.0, exact[2])];
    if theorem.quintic() {
        parts.push((a.powi(4), exact[3]));
    }
    let combination = TrigSignal::combine(&parts);
    let value = combination.antiderivative(upper);
    let k = match theorem {
        IntegralTheorem::T5i | IntegralTheorem::T5ii => None,
        _ => Some((value / (2.0 * PI)).round_ties_even() as i64),
    };
    let target = k.map_or(0.0, |k| 2.0 * PI * k as f64);
    let residual = (value - target).abs();
    Ok(IntegralConditionReport {
        theorem,
        params: ParamsDescription::from_params(params),
        combination_is_odd: combination.is_odd(),
        combination,
        upper_limit: upper,
        value,
        k,
        target,
        residual,
        tol: CONDITION_TOL,
        satisfied: residual <= CONDITION_TOL,
    })
}
