//! Scalar time signals multiplying the perturbation fields.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SignalError {
    #[error("signal frequency must be finite and nonzero, got {0}")]
    BadFrequency(f64),
    #[error("signal amplitude must be finite, got {0}")]
    BadAmplitude(f64),
    #[error("signal `{0}` is not a finite trigonometric sum")]
    NotExact(String),
}

/// `amp * sin(freq * t)` or `amp * cos(freq * t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub amp: f64,
    pub freq: f64,
}

/// Finite trigonometric sum `sum a_i sin(w_i t) + sum b_j cos(v_j t) + c`.
///
/// Frequencies are stored positive; `sin(-w t)` is folded into a negative
/// amplitude.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrigSignal {
    pub sines: Vec<TrigTerm>,
    pub cosines: Vec<TrigTerm>,
    pub constant: f64,
}

impl TrigSignal {
    pub fn new(sines: Vec<TrigTerm>, cosines: Vec<TrigTerm>, constant: f64) -> Result<Self, SignalError> {
        if !constant.is_finite() {
            return Err(SignalError::BadAmplitude(constant));
        }
        let mut s = TrigSignal {
            sines: Vec::new(),
            cosines: Vec::new(),
            constant,
        };
        for t in sines {
            check_term(&t)?;
            s.sines.push(if t.freq < 0.0 {
                TrigTerm { amp: -t.amp, freq: -t.freq }
            } else {
                t
            });
        }
        for t in cosines {
            check_term(&t)?;
            s.cosines.push(TrigTerm { amp: t.amp, freq: t.freq.abs() });
        }
        Ok(s)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let s: f64 = self.sines.iter().map(|k| k.amp * (k.freq * t).sin()).sum();
        let c: f64 = self.cosines.iter().map(|k| k.amp * (k.freq * t).cos()).sum();
        s + c + self.constant
    }

    /// `d/dt` of the signal.
    pub fn derivative(&self, t: f64) -> f64 {
        let s: f64 = self.sines.iter().map(|k| k.amp * k.freq * (k.freq * t).cos()).sum();
        let c: f64 = self.cosines.iter().map(|k| k.amp * k.freq * (k.freq * t).sin()).sum();
        s - c
    }

    /// Exact `int_0^t`.
    pub fn antiderivative(&self, t: f64) -> f64 {
        let s: f64 = self
            .sines
            .iter()
            .map(|k| k.amp * (1.0 - (k.freq * t).cos()) / k.freq)
            .sum();
        let c: f64 = self
            .cosines
            .iter()
            .map(|k| k.amp * (k.freq * t).sin() / k.freq)
            .sum();
        s + c + self.constant * t
    }

    /// Odd after merging equal cosine frequencies.
    pub fn is_odd(&self) -> bool {
        self.constant == 0.0 && merge(&self.cosines).iter().all(|k| k.amp == 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.constant == 0.0
            && merge(&self.sines).iter().all(|k| k.amp == 0.0)
            && merge(&self.cosines).iter().all(|k| k.amp == 0.0)
    }

    /// `sum w_i s_i`, with like frequencies merged.
    pub fn combine(parts: &[(f64, &TrigSignal)]) -> TrigSignal {
        let mut sines = Vec::new();
        let mut cosines = Vec::new();
        let mut constant = 0.0;
        for (w, s) in parts {
            sines.extend(s.sines.iter().map(|k| TrigTerm { amp: w * k.amp, freq: k.freq }));
            cosines.extend(s.cosines.iter().map(|k| TrigTerm { amp: w * k.amp, freq: k.freq }));
            constant += w * s.constant;
        }
        TrigSignal {
            sines: merge(&sines),
            cosines: merge(&cosines),
            constant,
        }
    }
}

fn check_term(t: &TrigTerm) -> Result<(), SignalError> {
    if !t.amp.is_finite() {
        return Err(SignalError::BadAmplitude(t.amp));
    }
    if !t.freq.is_finite() || t.freq == 0.0 {
        return Err(SignalError::BadFrequency(t.freq));
    }
    Ok(())
}

/// Sums amplitudes of identical frequencies and drops zero amplitudes;
/// output is sorted by frequency.
fn merge(terms: &[TrigTerm]) -> Vec<TrigTerm> {
    let mut out: Vec<TrigTerm> = Vec::new();
    for t in terms {
        match out.iter_mut().find(|o| o.freq == t.freq) {
            Some(o) => o.amp += t.amp,
            None => out.push(*t),
        }
    }
    out.retain(|t| t.amp != 0.0);
    out.sort_by(|a, b| a.freq.total_cmp(&b.freq));
    out
}

/// Arbitrary scalar signal; accepted for evaluation only.
#[derive(Clone)]
pub struct CustomSignal {
    pub label: String,
    pub declared_odd: bool,
    func: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for CustomSignal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomSignal")
            .field("label", &self.label)
            .field("declared_odd", &self.declared_odd)
            .finish()
    }
}

/// Time factor `alpha(t)` of a perturbation term.
#[derive(Debug, Clone)]
pub enum Signal {
    Trig(TrigSignal),
    Custom(CustomSignal),
}

impl Signal {
    pub fn zero() -> Self {
        Signal::Trig(TrigSignal::default())
    }

    pub fn sin(amp: f64, freq: f64) -> Result<Self, SignalError> {
        TrigSignal::new(vec![TrigTerm { amp, freq }], vec![], 0.0).map(Signal::Trig)
    }

    pub fn cos(amp: f64, freq: f64) -> Result<Self, SignalError> {
        TrigSignal::new(vec![], vec![TrigTerm { amp, freq }], 0.0).map(Signal::Trig)
    }

    pub fn constant(c: f64) -> Result<Self, SignalError> {
        TrigSignal::new(vec![], vec![], c).map(Signal::Trig)
    }

    /// `alpha_i(t) = sin(i t)`, the standard family for `i = 1..=n`.
    pub fn harmonics(n: usize) -> Vec<Signal> {
        (1..=n)
            .map(|i| Signal::sin(1.0, i as f64).expect("positive frequency"))
            .collect()
    }

    pub fn custom<F>(label: impl Into<String>, declared_odd: bool, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Signal::Custom(CustomSignal {
            label: label.into(),
            declared_odd,
            func: Arc::new(f),
        })
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Signal::Trig(s) => s.eval(t),
            Signal::Custom(c) => (c.func)(t),
        }
    }

    pub fn is_odd(&self) -> bool {
        match self {
            Signal::Trig(s) => s.is_odd(),
            Signal::Custom(c) => c.declared_odd,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Signal::Trig(s) if s.is_zero())
    }

    pub fn as_trig(&self) -> Option<&TrigSignal> {
        match self {
            Signal::Trig(s) => Some(s),
            Signal::Custom(_) => None,
        }
    }

    /// Exact-class view, or an error naming the offending signal.
    pub fn exact(&self) -> Result<&TrigSignal, SignalError> {
        match self {
            Signal::Trig(s) => Ok(s),
            Signal::Custom(c) => Err(SignalError::NotExact(c.label.clone())),
        }
    }

    pub fn antiderivative(&self, t: f64) -> Option<f64> {
        self.as_trig().map(|s| s.antiderivative(t))
    }
}

impl From<TrigSignal> for Signal {
    fn from(s: TrigSignal) -> Self {
        Signal::Trig(s)
    }
}
