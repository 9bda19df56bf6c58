use super::Mat3;

/// Samples of a solution at the accepted step times, with derivatives for
/// Hermite interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<[f64; 3]>,
    derivatives: Vec<[f64; 3]>,
    tangents: Option<Vec<Mat3>>,
}

impl Trajectory {
    pub(crate) fn start(t0: f64, x0: [f64; 3], dx0: [f64; 3], m0: Option<Mat3>) -> Self {
        Self {
            times: vec![t0],
            states: vec![x0],
            derivatives: vec![dx0],
            tangents: m0.map(|m| vec![m]),
        }
    }

    pub(crate) fn push(&mut self, t: f64, x: [f64; 3], dx: [f64; 3], m: Option<Mat3>) {
        self.times.push(t);
        self.states.push(x);
        self.derivatives.push(dx);
        if let (Some(ts), Some(m)) = (self.tangents.as_mut(), m) {
            ts.push(m);
        }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[[f64; 3]] {
        &self.states
    }

    pub fn derivatives(&self) -> &[[f64; 3]] {
        &self.derivatives
    }

    pub fn tangents(&self) -> Option<&[Mat3]> {
        self.tangents.as_deref()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory has a start point")
    }

    pub fn final_state(&self) -> [f64; 3] {
        *self.states.last().expect("trajectory has a start point")
    }

    /// State at time `t` by cubic Hermite interpolation between the
    /// bracketing steps; clamps outside the covered interval.
    pub fn state_at(&self, t: f64) -> [f64; 3] {
        let n = self.times.len();
        if n == 1 {
            return self.states[0];
        }
        let forward = self.times[n - 1] >= self.times[0];
        // index of the first sample at or beyond t in integration order
        let k = self
            .times
            .partition_point(|&s| if forward { s < t } else { s > t });
        if k == 0 {
            return self.states[0];
        }
        if k >= n {
            return self.states[n - 1];
        }
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        let (y0, y1) = (self.states[k - 1], self.states[k]);
        let (d0, d1) = (self.derivatives[k - 1], self.derivatives[k]);
        // written as an increment on y0 so constant segments stay exact
        std::array::from_fn(|i| y0[i] + h01 * (y1[i] - y0[i]) + h * (h10 * d0[i] + h11 * d1[i]))
    }

    /// `n` uniformly spaced samples (`n >= 2`) spanning the whole interval.
    pub fn resample(&self, n: usize) -> Vec<(f64, [f64; 3])> {
        let n = n.max(2);
        let (a, b) = (self.times[0], self.final_time());
        (0..n)
            .map(|i| {
                let t = if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 };
                (t, self.state_at(t))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_is_exact_for_cubics() {
        let f = |t: f64| [t * t * t - t, 2.0 * t, 1.0];
        let df = |t: f64| [3.0 * t * t - 1.0, 2.0, 0.0];
        let mut tr = Trajectory::start(0.0, f(0.0), df(0.0), None);
        for t in [0.4, 1.1, 2.0] {
            tr.push(t, f(t), df(t), None);
        }
        for t in [0.1, 0.77, 1.5, 1.99] {
            let p = tr.state_at(t);
            for (u, v) in p.iter().zip(f(t)) {
                assert!((u - v).abs() < 1e-12);
            }
        }
        let rs = tr.resample(5);
        assert_eq!(rs.len(), 5);
        assert_eq!(rs[4].0, 2.0);
        assert_eq!(rs[4].1, f(2.0));
    }

    #[test]
    fn backward_samples() {
        let f = |t: f64| [t * t, 0.0, 0.0];
        let mut tr = Trajectory::start(0.0, f(0.0), [0.0; 3], None);
        for t in [-0.5, -1.0] {
            tr.push(t, f(t), [2.0 * t, 0.0, 0.0], None);
        }
        assert!((tr.state_at(-0.7)[0] - 0.49).abs() < 1e-12);
    }
}
