use serde::Serialize;

use super::DynamicsError;
use crate::ode::{advance_tangent, flow, Dynamics, IntegratorConfig, Mat3, IDENTITY};

#[derive(Debug, Clone, Serialize)]
pub struct LyapunovSpectrum {
    /// Sorted in descending order.
    pub exponents: [f64; 3],
    pub sum: f64,
    pub x0: [f64; 3],
    pub transient: f64,
    pub total: f64,
    pub renorm: f64,
    pub renormalizations: u64,
    pub final_state: [f64; 3],
}

/// Modified Gram-Schmidt on the columns of `m`; returns the orthonormal
/// columns and the norms removed from each.
fn orthonormalize(m: &Mat3) -> (Mat3, [f64; 3]) {
    let mut cols: [[f64; 3]; 3] = std::array::from_fn(|c| [m[0][c], m[1][c], m[2][c]]);
    let mut norms = [0.0; 3];
    for j in 0..3 {
        for i in 0..j {
            let prev = cols[i];
            let d: f64 = cols[j].iter().zip(&prev).map(|(u, v)| u * v).sum();
            for (u, v) in cols[j].iter_mut().zip(&prev) {
                *u -= d * v;
            }
        }
        let n = cols[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        norms[j] = n;
        for v in &mut cols[j] {
            *v /= n;
        }
    }
    (std::array::from_fn(|r| std::array::from_fn(|c| cols[c][r])), norms)
}

/// Lyapunov exponents by the tangent-flow method: the state is carried from
/// `t = 0` to `transient`, then the tangent frame is integrated along and
/// re-orthonormalized every `renorm` time units until `total`; the
/// exponents are the averaged log growth of the frame vectors.
pub fn lyapunov_spectrum<D: Dynamics + ?Sized>(
    system: &D,
    x0: [f64; 3],
    transient: f64,
    total: f64,
    renorm: f64,
    cfg: &IntegratorConfig,
) -> Result<LyapunovSpectrum, DynamicsError> {
    if !(transient > 0.0 && total > transient && total.is_finite()) {
        return Err(DynamicsError::InvalidArgument(format!(
            "need 0 < transient < total, got {transient} and {total}"
        )));
    }
    if !(renorm > 0.0 && renorm.is_finite()) {
        return Err(DynamicsError::InvalidArgument(format!("renormalization interval must be positive, got {renorm}")));
    }
    let mut x = flow(system, x0, 0.0, transient, cfg)?;
    let mut q = IDENTITY;
    let mut sums = [0.0; 3];
    let mut hint = None;
    let mut count = 0u64;
    let segments = ((total - transient) / renorm).ceil() as u64;
    for i in 0..segments {
        let t = transient + i as f64 * renorm;
        let t_next = if i + 1 == segments { total } else { t + renorm };
        let (x1, m, h) = advance_tangent(system, x, &q, t, t_next, cfg, hint)?;
        let (q1, norms) = orthonormalize(&m);
        if norms.iter().any(|n| !(n.is_finite() && *n > 0.0)) {
            return Err(DynamicsError::InvalidArgument(format!("tangent frame degenerated at t = {t_next}")));
        }
        for k in 0..3 {
            sums[k] += norms[k].ln();
        }
        x = x1;
        q = q1;
        hint = Some(h);
        count += 1;
    }
    let span = total - transient;
    let mut exponents = sums.map(|s| s / span);
    exponents.sort_by(|a, b| b.total_cmp(a));
    Ok(LyapunovSpectrum {
        exponents,
        sum: exponents.iter().sum(),
        x0,
        transient,
        total,
        renorm,
        renormalizations: count,
        final_state: x,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::PolyVectorField;
    use crate::langford::PerturbedSystem;

    struct Diagonal([f64; 3]);

    impl Dynamics for Diagonal {
        fn rhs(&self, _t: f64, p: [f64; 3]) -> [f64; 3] {
            std::array::from_fn(|i| self.0[i] * p[i])
        }
        fn jacobian(&self, _t: f64, _p: [f64; 3]) -> Mat3 {
            std::array::from_fn(|r| std::array::from_fn(|c| if r == c { self.0[r] } else { 0.0 }))
        }
    }

    #[test]
    fn zero_field() {
        let sys = PerturbedSystem::autonomous(PolyVectorField::zero());
        let s = lyapunov_spectrum(&sys, [1.0, 2.0, 3.0], 1.0, 20.0, 0.5, &IntegratorConfig::default()).unwrap();
        assert_eq!(s.exponents, [0.0; 3]);
        assert_eq!(s.renormalizations, 38);
    }

    #[test]
    fn linear_rates() {
        let s = lyapunov_spectrum(&Diagonal([-2.0, 0.5, -0.1]), [1.0; 3], 0.5, 10.5, 0.3, &IntegratorConfig::default()).unwrap();
        for (got, want) in s.exponents.iter().zip([0.5, -0.1, -2.0]) {
            assert!((got - want).abs() < 1e-8, "{:?}", s.exponents);
        }
    }

    #[test]
    fn gram_schmidt() {
        let m = [[2.0, 1.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 3.0]];
        let (q, n) = orthonormalize(&m);
        assert_eq!(n, [2.0, 1.0, 3.0]);
        assert_eq!(q, IDENTITY);
    }

    #[test]
    fn rejects_bad_times() {
        let sys = Diagonal([1.0; 3]);
        let cfg = IntegratorConfig::default();
        assert!(lyapunov_spectrum(&sys, [1.0; 3], 0.0, 1.0, 0.1, &cfg).is_err());
        assert!(lyapunov_spectrum(&sys, [1.0; 3], 2.0, 1.0, 0.1, &cfg).is_err());
        assert!(lyapunov_spectrum(&sys, [1.0; 3], 0.5, 1.0, 0.0, &cfg).is_err());
    }
}
