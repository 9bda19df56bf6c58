use nalgebra::Matrix3;
use serde::Serialize;

use super::{dist, ClosedFormOrbit, DynamicsError};
use crate::ode::{flow_with_tangent, Dynamics, IntegratorConfig, Mat3};

/// Tolerance on multiplier moduli around 1.
pub const TRIVIAL_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    AsymptoticallyStable,
    Unstable,
    Marginal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl ComplexValue {
    pub fn modulus(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FloquetReport {
    pub start: [f64; 3],
    pub t0: f64,
    pub period: f64,
    /// `|phi(t0 + period) - start|`.
    pub return_gap: f64,
    pub monodromy: Mat3,
    pub determinant: f64,
    pub multipliers: [ComplexValue; 3],
    /// Index of the multiplier closest to 1.
    pub trivial_index: usize,
    pub trivial_distance: f64,
    pub nontrivial_moduli: [f64; 2],
    pub classification: Stability,
    pub tol: f64,
}

/// Multipliers of the period map at `x0`, starting at time `t0`.
pub fn floquet_at<D: Dynamics + ?Sized>(
    system: &D,
    x0: [f64; 3],
    t0: f64,
    period: f64,
    cfg: &IntegratorConfig,
) -> Result<FloquetReport, DynamicsError> {
    if !(period > 0.0 && period.is_finite()) {
        return Err(DynamicsError::InvalidArgument(format!("period must be positive, got {period}")));
    }
    let (x1, m) = flow_with_tangent(system, x0, t0, t0 + period, cfg)?;
    let mat = Matrix3::from_fn(|r, c| m[r][c]);
    let eig = mat.complex_eigenvalues();
    let multipliers: [ComplexValue; 3] = std::array::from_fn(|i| ComplexValue { re: eig[i].re, im: eig[i].im });
    let distance = |z: &ComplexValue| (z.re - 1.0).hypot(z.im);
    let trivial_index = (0..3)
        .min_by(|&i, &j| distance(&multipliers[i]).total_cmp(&distance(&multipliers[j])))
        .expect("three multipliers");
    let mut others = (0..3).filter(|&i| i != trivial_index).map(|i| multipliers[i].modulus());
    let nontrivial_moduli = [others.next().unwrap(), others.next().unwrap()];
    let classification = if nontrivial_moduli.iter().all(|&r| r < 1.0 - TRIVIAL_TOL) {
        Stability::AsymptoticallyStable
    } else if nontrivial_moduli.iter().any(|&r| r > 1.0 + TRIVIAL_TOL) {
        Stability::Unstable
    } else {
        Stability::Marginal
    };
    Ok(FloquetReport {
        start: x0,
        t0,
        period,
        return_gap: dist(x0, x1),
        monodromy: m,
        determinant: mat.determinant(),
        trivial_distance: distance(&multipliers[trivial_index]),
        multipliers,
        trivial_index,
        nontrivial_moduli,
        classification,
        tol: TRIVIAL_TOL,
    })
}

/// Floquet analysis of the closed-form circle from its point at `t = 0`.
pub fn floquet<D: Dynamics + ?Sized>(
    system: &D,
    orbit: &ClosedFormOrbit,
    period: f64,
    cfg: &IntegratorConfig,
) -> Result<FloquetReport, DynamicsError> {
    floquet_at(system, orbit.point(0.0), 0.0, period, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{int, rat};
    use crate::langford::{build_base_system, build_eq5, Params};
    use crate::signal::Signal;
    use std::f64::consts::PI;

    fn run(e: crate::algebra::Rational) -> FloquetReport {
        let p = Params::new(int(-1), int(1), int(-1), int(-1), e);
        let sys = build_base_system(&p, vec![]).unwrap();
        let orbit = ClosedFormOrbit::eq8(&p).unwrap();
        floquet(&sys, &orbit, 2.0 * PI, &IntegratorConfig::default()).unwrap()
    }

    #[test]
    fn stable_circle() {
        let r = run(rat(3, 2));
        assert_eq!(r.classification, Stability::AsymptoticallyStable);
        assert!(r.trivial_distance < 1e-5);
        assert!(r.return_gap < 1e-7);
        // transverse pair: trace 2a+e = -1/2 over one turn
        for m in r.nontrivial_moduli {
            assert!((m - (-PI / 2.0).exp()).abs() < 1e-6, "{m}");
        }
    }

    #[test]
    fn unstable_circle() {
        let r = run(int(3));
        assert_eq!(r.classification, Stability::Unstable);
        assert!(r.trivial_distance < 1e-5);
        let product: f64 = r.multipliers.iter().map(|m| m.modulus()).product();
        assert!((product - r.determinant.abs()).abs() < 1e-8 * product);
        // Liouville: det = exp((a+d+e) T)
        assert!((r.determinant / (2.0 * PI).exp() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn perturbed_circle_keeps_its_type() {
        let p = Params::new(int(-1), int(1), int(-1), int(-1), rat(3, 2));
        let sys = build_eq5(&p, Signal::harmonics(3).try_into().unwrap()).unwrap();
        let orbit = ClosedFormOrbit::for_system(&sys).unwrap();
        let r = floquet(&sys, &orbit, 2.0 * PI, &IntegratorConfig::default()).unwrap();
        assert_eq!(r.classification, Stability::AsymptoticallyStable);
        assert!(r.return_gap < 1e-7);
    }

    #[test]
    fn rejects_bad_period() {
        let sys = build_base_system(&Params::from_ints(-1, 1, -1, -1, 3), vec![]).unwrap();
        assert!(floquet_at(&sys, [0.0; 3], 0.0, 0.0, &IntegratorConfig::default()).is_err());
    }
}
