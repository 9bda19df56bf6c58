use serde::Serialize;

use super::{norm, DynamicsError};
use crate::algebra::{int, to_f64};
use crate::langford::{cycle_discriminant, Family, ModelError, Params, ParamsDescription, PerturbedSystem};
use crate::signal::{Signal, TrigSignal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitFamily {
    /// Unperturbed circle of the base field.
    Eq8,
    /// Circle of the three-generator family (or the base field with `alpha_1`).
    Eq9,
    /// Circle of the quintic family, radius `|a|`.
    Eq10,
}

/// The circle `(r sin theta, r cos theta, -a)` with
/// `theta(t) = b t + int_0^t phase(s) ds`.
#[derive(Debug, Clone)]
pub struct ClosedFormOrbit {
    pub family: OrbitFamily,
    pub params: Params,
    pub phase: TrigSignal,
    pub radius: f64,
    pub z_level: f64,
    b: f64,
}

fn rotational(p: &Params, family: Family) -> Result<(), DynamicsError> {
    if p.c != -p.b.clone() || p.d != p.a {
        return Err(ModelError::Constraint {
            family,
            constraint: "c = -b and d = a".into(),
        }
        .into());
    }
    Ok(())
}

fn circle_radius(p: &Params) -> Result<f64, DynamicsError> {
    let disc = cycle_discriminant(p);
    if disc >= int(0) {
        return Err(DynamicsError::Hypothesis(format!("a(a+e) = {disc} is not negative")));
    }
    Ok((-to_f64(&disc)).sqrt())
}

fn exact<'a>(signals: &[&'a Signal]) -> Result<Vec<&'a TrigSignal>, DynamicsError> {
    signals
        .iter()
        .map(|s| s.exact().map_err(DynamicsError::from))
        .collect()
}

impl ClosedFormOrbit {
    fn build(family: OrbitFamily, p: &Params, radius: f64, parts: &[(f64, &TrigSignal)]) -> Self {
        let [a, b, ..] = p.as_f64();
        Self {
            family,
            params: p.clone(),
            phase: TrigSignal::combine(parts),
            radius,
            z_level: -a,
            b,
        }
    }

    pub fn eq8(p: &Params) -> Result<Self, DynamicsError> {
        rotational(p, Family::Base)?;
        let r = circle_radius(p)?;
        Ok(Self::build(OrbitFamily::Eq8, p, r, &[]))
    }

    /// Phase `b alpha_1 + alpha_3`.
    pub fn eq9(p: &Params, alphas: [&Signal; 3]) -> Result<Self, DynamicsError> {
        rotational(p, Family::Eq5)?;
        let r = circle_radius(p)?;
        let s = exact(&alphas)?;
        let b = to_f64(&p.b);
        Ok(Self::build(OrbitFamily::Eq9, p, r, &[(b, s[0]), (1.0, s[2])]))
    }

    /// Phase `b alpha_1 + alpha_3 + a^4 alpha_4`.
    pub fn eq10(p: &Params, alphas: [&Signal; 4]) -> Result<Self, DynamicsError> {
        rotational(p, Family::Eq6)?;
        if p.e != -(int(2) * &p.a) {
            return Err(ModelError::Constraint {
                family: Family::Eq6,
                constraint: "e = -2a".into(),
            }
            .into());
        }
        let r = circle_radius(p)?;
        let s = exact(&alphas)?;
        let [a, b, ..] = p.as_f64();
        Ok(Self::build(
            OrbitFamily::Eq10,
            p,
            r,
            &[(b, s[0]), (1.0, s[2]), (a.powi(4), s[3])],
        ))
    }

    /// The circle carried by `system`, read off its family, parameters
    /// and signals.
    pub fn for_system(system: &PerturbedSystem) -> Result<Self, DynamicsError> {
        let p = system
            .params()
            .ok_or_else(|| DynamicsError::InvalidArgument("system has no parameters".into()))?;
        let s = system.signals();
        match system.family() {
            Family::Base if s.is_empty() => Self::eq8(p),
            Family::Base => {
                let zero = Signal::zero();
                Self::eq9(p, [s[0], &zero, &zero])
            }
            Family::Eq5 => Self::eq9(p, [s[0], s[1], s[2]]),
            Family::Eq6 => Self::eq10(p, [s[0], s[1], s[2], s[3]]),
            f => Err(DynamicsError::InvalidArgument(format!("no closed-form circle for family {f}"))),
        }
    }

    /// Same orbit with the circle moved to height `z`.
    pub fn with_z_level(mut self, z: f64) -> Self {
        self.z_level = z;
        self
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn angle(&self, t: f64) -> f64 {
        self.b * t + self.phase.antiderivative(t)
    }

    pub fn angular_velocity(&self, t: f64) -> f64 {
        self.b + self.phase.eval(t)
    }

    pub fn point(&self, t: f64) -> [f64; 3] {
        let (s, c) = self.angle(t).sin_cos();
        [self.radius * s, self.radius * c, self.z_level]
    }

    /// Analytic time derivative of [`Self::point`].
    pub fn velocity(&self, t: f64) -> [f64; 3] {
        let (s, c) = self.angle(t).sin_cos();
        let w = self.angular_velocity(t);
        [self.radius * c * w, -self.radius * s * w, 0.0]
    }

    /// Parameters as exact strings, for reports.
    pub fn describe_params(&self) -> ParamsDescription {
        ParamsDescription::from_params(&self.params)
    }
}

pub fn closed_form_point(orbit: &ClosedFormOrbit, t: f64) -> [f64; 3] {
    orbit.point(t)
}

/// `max_t |d/dt orbit(t) - rhs(t, orbit(t))|` over `samples` equally
/// spaced times in `[span.0, span.1]`.
pub fn orbit_residual(
    system: &PerturbedSystem,
    orbit: &ClosedFormOrbit,
    samples: usize,
    span: (f64, f64),
) -> Result<f64, DynamicsError> {
    let expected = ClosedFormOrbit::for_system(system)?;
    if expected.family != orbit.family || expected.params != orbit.params {
        return Err(DynamicsError::InvalidArgument(format!(
            "orbit {:?} with {} does not belong to a {} system with {}",
            orbit.family,
            orbit.params,
            system.family(),
            expected.params
        )));
    }
    if samples == 0 || !span.0.is_finite() || !span.1.is_finite() {
        return Err(DynamicsError::InvalidArgument("need at least one sample on a finite span".into()));
    }
    let mut worst: f64 = 0.0;
    for i in 0..samples {
        let t = if samples == 1 {
            span.0
        } else {
            span.0 + (span.1 - span.0) * i as f64 / (samples - 1) as f64
        };
        let p = orbit.point(t);
        let v = orbit.velocity(t);
        let f = system.rhs(t, p);
        worst = worst.max(norm([v[0] - f[0], v[1] - f[1], v[2] - f[2]]));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;
    use crate::langford::{build_base_system, build_eq5, build_eq6};
    use std::f64::consts::PI;

    fn cycle_params() -> Params {
        Params::from_ints(-1, 1, -1, -1, 3)
    }

    #[test]
    fn eq8_start_point() {
        let o = ClosedFormOrbit::eq8(&cycle_params()).unwrap();
        let p = o.point(0.0);
        assert!(p[0].abs() < 1e-15 && (p[1] - 2f64.sqrt()).abs() < 1e-15 && p[2] == 1.0);
    }

    #[test]
    fn eq9_without_signals_is_eq8() {
        let p = cycle_params();
        let z = Signal::zero();
        let a = ClosedFormOrbit::eq8(&p).unwrap();
        let b = ClosedFormOrbit::eq9(&p, [&z, &z, &z]).unwrap();
        for i in 0..50 {
            let t = 0.37 * i as f64;
            assert_eq!(a.point(t), b.point(t));
        }
    }

    #[test]
    fn eq10_quarter_turn() {
        let p = Params::from_ints(2, 1, -1, 2, -4);
        let z = Signal::zero();
        let o = ClosedFormOrbit::eq10(&p, [&z, &z, &z, &z]).unwrap();
        let q = o.point(PI / 2.0);
        assert!((q[0] - 2.0).abs() < 1e-15 && q[1].abs() < 1e-15 && q[2] == -2.0);
    }

    #[test]
    fn rejects_missing_circle() {
        let p = Params::from_ints(1, 1, -1, 1, 3);
        assert!(matches!(ClosedFormOrbit::eq8(&p), Err(DynamicsError::Hypothesis(_))));
        let q = Params::from_ints(-1, 1, 2, -1, 3);
        assert!(matches!(ClosedFormOrbit::eq8(&q), Err(DynamicsError::Model(_))));
    }

    #[test]
    fn residuals() {
        let p = cycle_params();
        let base = build_base_system(&p, vec![]).unwrap();
        let o8 = ClosedFormOrbit::eq8(&p).unwrap();
        assert!(orbit_residual(&base, &o8, 100, (0.0, 10.0)).unwrap() <= 1e-12);

        let sys = build_eq5(&p, Signal::harmonics(3).try_into().unwrap()).unwrap();
        let o9 = ClosedFormOrbit::for_system(&sys).unwrap();
        assert_eq!(o9.family, OrbitFamily::Eq9);
        assert!(orbit_residual(&sys, &o9, 100, (0.0, 10.0)).unwrap() <= 1e-10);

        let shifted = o9.clone().with_z_level(-to_f64(&p.a) + 0.1);
        assert!(orbit_residual(&sys, &shifted, 100, (0.0, 10.0)).unwrap() > 0.01);

        assert!(orbit_residual(&base, &o9, 10, (0.0, 1.0)).is_err());
    }

    #[test]
    fn eq10_residual_fractional_params() {
        let a = rat(-3, 2);
        let p = Params::new(a.clone(), rat(5, 3), rat(-5, 3), a.clone(), int(3));
        let sys = build_eq6(&p, Signal::harmonics(4).try_into().unwrap()).unwrap();
        let o = ClosedFormOrbit::for_system(&sys).unwrap();
        assert_eq!(o.radius, 1.5);
        assert!(orbit_residual(&sys, &o, 100, (-5.0, 5.0)).unwrap() <= 1e-10);
    }
}
