//! Explicit Runge-Kutta steppers over fixed-size state arrays.

use super::{IntegrationError, IntegratorConfig, Method};

// Dormand-Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 5.0;

/// Where a call to [`solve`] ended.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Outcome<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    /// Suggested size of the next step (always positive).
    pub h_next: f64,
    /// The observer asked to stop before `t1`.
    pub stopped: bool,
}

#[inline]
fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        let hc = h * c;
        for i in 0..N {
            out[i] += hc * k[i];
        }
    }
    out
}

fn all_finite<const N: usize>(y: &[f64; N]) -> bool {
    y.iter().all(|v| v.is_finite())
}

fn err_norm<const N: usize>(y0: &[f64; N], y1: &[f64; N], e: &[f64; N], rtol: f64, atol: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..N {
        let sc = atol + rtol * y0[i].abs().max(y1[i].abs());
        acc += (e[i] / sc).powi(2);
    }
    (acc / N as f64).sqrt()
}

/// Initial step guess (Hairer, Norsett & Wanner, II.4).
fn initial_step<const N: usize, F>(f: &F, t0: f64, y0: &[f64; N], f0: &[f64; N], dir: f64, cfg: &IntegratorConfig) -> f64
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let sc = |i: usize| cfg.atol + cfg.rtol * y0[i].abs();
    let d0 = (y0.iter().enumerate().map(|(i, v)| (v / sc(i)).powi(2)).sum::<f64>() / N as f64).sqrt();
    let d1 = (f0.iter().enumerate().map(|(i, v)| (v / sc(i)).powi(2)).sum::<f64>() / N as f64).sqrt();
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1 = axpy(y0, dir * h0, &[(1.0, f0)]);
    let f1 = f(t0 + dir * h0, &y1);
    let d2 = (f1
        .iter()
        .zip(f0)
        .enumerate()
        .map(|(i, (a, b))| ((a - b) / sc(i)).powi(2))
        .sum::<f64>()
        / N as f64)
        .sqrt()
        / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(1.0 / 5.0)
    };
    (100.0 * h0).min(h1)
}

/// Integrates `y' = f(t, y)` from `(t0, y0)` towards `t1` (either direction).
///
/// `observer(t, y, f(t, y))` runs after every accepted step and may return
/// `false` to stop early. `h_hint` seeds the first step of the adaptive
/// method.
pub(crate) fn solve<const N: usize, F, O>(
    f: &F,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    cfg: &IntegratorConfig,
    h_hint: Option<f64>,
    mut observer: O,
) -> Result<Outcome<N>, IntegrationError>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    O: FnMut(f64, &[f64; N], &[f64; N]) -> bool,
{
    cfg.validate()?;
    if !t0.is_finite() || !t1.is_finite() || !all_finite(&y0) {
        return Err(IntegrationError::NonFiniteInput);
    }
    if t0 == t1 {
        return Ok(Outcome { t: t0, y: y0, h_next: h_hint.unwrap_or(cfg.step), stopped: false });
    }
    match cfg.method {
        Method::Rk4Fixed => rk4(f, t0, y0, t1, cfg, &mut observer),
        Method::Dopri45Adaptive => dopri(f, t0, y0, t1, cfg, h_hint, &mut observer),
    }
}

fn rk4<const N: usize, F, O>(
    f: &F,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    cfg: &IntegratorConfig,
    observer: &mut O,
) -> Result<Outcome<N>, IntegrationError>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    O: FnMut(f64, &[f64; N], &[f64; N]) -> bool,
{
    let span = t1 - t0;
    let n = (span.abs() / cfg.step).round().max(1.0) as u64;
    if n > cfg.max_steps {
        return Err(IntegrationError::StepLimit { t: t0, state: y0.to_vec(), steps: 0 });
    }
    let h = span / n as f64;
    let mut y = y0;
    let mut k1 = f(t0, &y);
    for i in 0..n {
        let t = t0 + i as f64 * h;
        let k2 = f(t + 0.5 * h, &axpy(&y, 0.5 * h, &[(1.0, &k1)]));
        let k3 = f(t + 0.5 * h, &axpy(&y, 0.5 * h, &[(1.0, &k2)]));
        let k4 = f(t + h, &axpy(&y, h, &[(1.0, &k3)]));
        let next = axpy(&y, h / 6.0, &[(1.0, &k1), (2.0, &k2), (2.0, &k3), (1.0, &k4)]);
        if !all_finite(&next) {
            return Err(IntegrationError::BlowUp { t, state: y.to_vec() });
        }
        y = next;
        let tn = if i + 1 == n { t1 } else { t0 + (i + 1) as f64 * h };
        k1 = f(tn, &y);
        if !observer(tn, &y, &k1) {
            return Ok(Outcome { t: tn, y, h_next: h.abs(), stopped: true });
        }
    }
    Ok(Outcome { t: t1, y, h_next: h.abs(), stopped: false })
}

fn dopri<const N: usize, F, O>(
    f: &F,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    cfg: &IntegratorConfig,
    h_hint: Option<f64>,
    observer: &mut O,
) -> Result<Outcome<N>, IntegrationError>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    O: FnMut(f64, &[f64; N], &[f64; N]) -> bool,
{
    let dir = (t1 - t0).signum();
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut h = match h_hint {
        Some(h) if h > 0.0 && h.is_finite() => h,
        _ => initial_step(f, t0, &y0, &k1, dir, cfg),
    };
    let mut steps = 0u64;
    let mut last_rejected = false;
    loop {
        let remaining = (t1 - t).abs();
        if remaining == 0.0 {
            return Ok(Outcome { t, y, h_next: h, stopped: false });
        }
        if steps >= cfg.max_steps {
            return Err(IntegrationError::StepLimit { t, state: y.to_vec(), steps });
        }
        let last = h >= remaining;
        let step = if last { remaining } else { h };
        if step < 1e-14 * t.abs().max(1.0) {
            return Err(IntegrationError::BlowUp { t, state: y.to_vec() });
        }
        let hs = dir * step;
        let k2 = f(t + C2 * hs, &axpy(&y, hs, &[(A21, &k1)]));
        let k3 = f(t + C3 * hs, &axpy(&y, hs, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(t + C4 * hs, &axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(
            t + C5 * hs,
            &axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            t + hs,
            &axpy(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y_new = axpy(&y, hs, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let t_new = if last { t1 } else { t + hs };
        let k7 = f(t_new, &y_new);
        let e = axpy(
            &[0.0; N],
            hs,
            &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)],
        );
        let err = err_norm(&y, &y_new, &e, cfg.rtol, cfg.atol);
        steps += 1;
        if err <= 1.0 && all_finite(&y_new) && all_finite(&k7) {
            let grow = if err == 0.0 { FAC_MAX } else { SAFETY * err.powf(-0.2) };
            let cap = if last_rejected { 1.0 } else { FAC_MAX };
            let proposed = step * grow.clamp(FAC_MIN, cap);
            // a final step clamped to `t1` says nothing about the natural step size
            h = if last { h.max(proposed) } else { proposed };
            t = t_new;
            y = y_new;
            k1 = k7;
            last_rejected = false;
            if !observer(t, &y, &k1) {
                return Ok(Outcome { t, y, h_next: h, stopped: true });
            }
        } else {
            let shrink = if err.is_finite() { SAFETY * err.powf(-0.2) } else { FAC_MIN };
            h = step * shrink.clamp(FAC_MIN, 1.0);
            last_rejected = true;
        }
    }
}
