use serde::Serialize;

use super::{dist, DynamicsError};
use crate::langford::PerturbedSystem;
use crate::ode::{flow, IntegratorConfig};

#[derive(Debug, Clone, Serialize)]
pub struct ShiftComparison {
    pub half_width: f64,
    pub points: Vec<[f64; 3]>,
    pub distances: Vec<f64>,
    pub max_distance: f64,
}

/// `max |phi_A(T; -T, x0) - phi_B(T; -T, x0)|` over `points`.
///
/// Both systems must share the base field and carry only odd signals.
pub fn shift_operator_compare(
    a: &PerturbedSystem,
    b: &PerturbedSystem,
    half_width: f64,
    points: &[[f64; 3]],
    cfg: &IntegratorConfig,
) -> Result<ShiftComparison, DynamicsError> {
    if a.base() != b.base() {
        return Err(DynamicsError::Hypothesis("systems do not share a base field".into()));
    }
    for (name, s) in [("first", a), ("second", b)] {
        if let Some(i) = s.terms().iter().position(|t| !t.signal.is_odd()) {
            return Err(DynamicsError::Hypothesis(format!(
                "signal alpha_{} of the {name} system is not odd",
                i + 1
            )));
        }
    }
    if !(half_width >= 0.0 && half_width.is_finite()) {
        return Err(DynamicsError::InvalidArgument(format!("T must be non-negative, got {half_width}")));
    }
    let mut distances = Vec::with_capacity(points.len());
    for &x0 in points {
        let d = if half_width == 0.0 {
            0.0
        } else {
            let pa = flow(a, x0, -half_width, half_width, cfg)?;
            let pb = flow(b, x0, -half_width, half_width, cfg)?;
            dist(pa, pb)
        };
        distances.push(d);
    }
    Ok(ShiftComparison {
        half_width,
        points: points.to_vec(),
        max_distance: distances.iter().copied().fold(0.0, f64::max),
        distances,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::langford::{build_base_system, build_eq5, Params};
    use crate::signal::Signal;

    fn params() -> Params {
        Params::from_ints(-1, 1, -1, -1, 3)
    }

    #[test]
    fn base_and_eq5_agree() {
        let base = build_base_system(&params(), vec![]).unwrap();
        let eq5 = build_eq5(&params(), Signal::harmonics(3).try_into().unwrap()).unwrap();
        let r = shift_operator_compare(&base, &eq5, 1.0, &[[0.1, 0.2, 0.3]], &IntegratorConfig::default()).unwrap();
        assert!(r.max_distance <= 1e-6, "{}", r.max_distance);
    }

    #[test]
    fn identical_systems_and_zero_width() {
        let base = build_base_system(&params(), vec![]).unwrap();
        let eq5 = build_eq5(&params(), [Signal::zero(), Signal::zero(), Signal::zero()]).unwrap();
        let pts = [[0.1, 0.2, 0.3], [-0.4, 0.0, 0.2]];
        let r = shift_operator_compare(&base, &eq5, 1.5, &pts, &IntegratorConfig::default()).unwrap();
        assert!(r.max_distance <= 1e-12);
        let busy = build_eq5(&params(), Signal::harmonics(3).try_into().unwrap()).unwrap();
        let r = shift_operator_compare(&base, &busy, 0.0, &pts, &IntegratorConfig::default()).unwrap();
        assert_eq!(r.max_distance, 0.0);
    }

    #[test]
    fn refuses_even_signals() {
        let base = build_base_system(&params(), vec![]).unwrap();
        let eq5 = build_eq5(&params(), [Signal::cos(1.0, 1.0).unwrap(), Signal::zero(), Signal::zero()]).unwrap();
        assert!(matches!(
            shift_operator_compare(&base, &eq5, 1.0, &[[0.1; 3]], &IntegratorConfig::default()),
            Err(DynamicsError::Hypothesis(_))
        ));
    }

    #[test]
    fn even_signal_breaks_equality() {
        // the oddness guard is not vacuous: a cosine really changes the map
        let base = build_base_system(&params(), vec![]).unwrap();
        let eq5 = build_eq5(&params(), [Signal::cos(0.5, 1.0).unwrap(), Signal::zero(), Signal::zero()]).unwrap();
        let x0 = [0.1, 0.2, 0.3];
        let cfg = IntegratorConfig::default();
        let pa = flow(&base, x0, -1.0, 1.0, &cfg).unwrap();
        let pb = flow(&eq5, x0, -1.0, 1.0, &cfg).unwrap();
        assert!(dist(pa, pb) > 1e-3);
    }
}
