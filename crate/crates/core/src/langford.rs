//! The generalized Langford system and its admissibly perturbed families.
//!
//! Base field:
//!
//! ```text
//! x' = a x + b y + x z
//! y' = c x + d y + y z
//! z' = e z - (x^2 + y^2 + z^2)
//! ```

use std::fmt;
use std::str::FromStr;

use nalgebra::{Complex, Matrix3};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{
    int, to_f64, CompiledField, CompiledMatrix, PolyVectorField, Polynomial, Rational,
};
use crate::perturbation::is_admissible;
use crate::signal::{Signal, SignalError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("{family} requires {constraint}")]
    Constraint { family: Family, constraint: String },
    #[error("{family} takes {expected} signal(s), got {got}")]
    SignalCount {
        family: Family,
        expected: String,
        got: usize,
    },
    #[error("perturbation term {index} is not admissible for the base field")]
    NotAdmissible { index: usize },
    #[error("invalid parameter `{name}`: {reason}")]
    BadParam { name: String, reason: String },
    #[error(transparent)]
    Signal(#[from] SignalError),
}

/// System parameters `a, b, c, d, e`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Params {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub d: Rational,
    pub e: Rational,
}

impl Params {
    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational, e: Rational) -> Self {
        Self { a, b, c, d, e }
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64, e: i64) -> Self {
        Self::new(int(a), int(b), int(c), int(d), int(e))
    }

    /// `a = d = -3, b = -8, c = 8, e = 6`: the chaotic-attractor instance.
    pub fn attractor() -> Self {
        Self::from_ints(-3, -8, 8, -3, 6)
    }

    pub fn as_f64(&self) -> [f64; 5] {
        [
            to_f64(&self.a),
            to_f64(&self.b),
            to_f64(&self.c),
            to_f64(&self.d),
            to_f64(&self.e),
        ]
    }

    pub fn named(&self) -> [(&'static str, &Rational); 5] {
        [
            ("a", &self.a),
            ("b", &self.b),
            ("c", &self.c),
            ("d", &self.d),
            ("e", &self.e),
        ]
    }

    /// Constant divergence `a + d + e` of the base field.
    pub fn divergence(&self) -> Rational {
        &self.a + &self.d + &self.e
    }

    fn rotational(&self) -> bool {
        self.c == -self.b.clone() && self.d == self.a
    }

    fn heteroclinic(&self) -> bool {
        self.rotational() && self.e == -(int(2) * &self.a)
    }

    fn diagonal(&self) -> bool {
        self.b.is_zero() && self.c.is_zero() && self.d == self.a && self.e == -(int(2) * &self.a)
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "a={}, b={}, c={}, d={}, e={}",
            self.a, self.b, self.c, self.d, self.e
        )
    }
}

/// Parses `"-3"`, `"1/3"` or a finite decimal such as `"-0.25"` exactly.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    if let Some((int_part, frac)) = s.split_once('.') {
        if s.contains('/') || frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(format!("`{s}` is not a rational"));
        }
        let negative = int_part.starts_with('-');
        let digits = format!("{}{}", int_part.trim_start_matches(['-', '+']), frac);
        let numer: BigInt = digits
            .parse()
            .map_err(|_| format!("`{s}` is not a rational"))?;
        let denom = num_traits::pow(BigInt::from(10), frac.len());
        let q = Rational::new(numer, denom);
        return Ok(if negative { -q } else { q });
    }
    Rational::from_str(s).map_err(|_| format!("`{s}` is not a rational"))
}

/// Constraint classes on the parameters, one per admissible family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamClass {
    /// No constraint; only `delta = X` is listed.
    Generic,
    /// `c = -b, d = a`.
    Rotational,
    /// `c = -b, d = a, e = -2a`.
    Heteroclinic,
    /// `b = c = 0, d = a, e = -2a`.
    Diagonal,
}

impl ParamClass {
    pub const ALL: [ParamClass; 4] = [
        ParamClass::Generic,
        ParamClass::Rotational,
        ParamClass::Heteroclinic,
        ParamClass::Diagonal,
    ];

    pub fn holds(&self, p: &Params) -> bool {
        match self {
            ParamClass::Generic => true,
            ParamClass::Rotational => p.rotational(),
            ParamClass::Heteroclinic => p.heteroclinic(),
            ParamClass::Diagonal => p.diagonal(),
        }
    }

    /// Random parameters in this class; free values are rationals with
    /// `|numerator| <= 100` and `1 <= denominator <= 100`.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Params {
        self.draw_bounded(rng, 100, 100)
    }

    /// Like [`Self::draw`] with `|numerator| <= max_num`, `denominator <= max_den`.
    pub fn draw_bounded<R: Rng + ?Sized>(&self, rng: &mut R, max_num: i64, max_den: i64) -> Params {
        let mut q = || random_rational(rng, max_num, max_den);
        let (a, b, c, d, e) = (q(), q(), q(), q(), q());
        let two_a = int(2) * &a;
        match self {
            ParamClass::Generic => Params::new(a, b, c, d, e),
            ParamClass::Rotational => Params::new(a.clone(), b.clone(), -b, a, e),
            ParamClass::Heteroclinic => Params::new(a.clone(), b.clone(), -b, a, -two_a),
            ParamClass::Diagonal => Params::new(a.clone(), int(0), int(0), a, -two_a),
        }
    }

    /// The admissible perturbations listed for this class.
    pub fn listed_perturbations(&self, p: &Params) -> Vec<PolyVectorField> {
        let base = build_base(p);
        match self {
            ParamClass::Generic => vec![base],
            ParamClass::Rotational => vec![base, radial_generator(p), rotation_generator()],
            ParamClass::Heteroclinic => vec![
                base,
                radial_generator(p),
                rotation_generator(),
                quintic_rotation(p, &(&x2() + &y2())),
            ],
            ParamClass::Diagonal => {
                let mut v = vec![base, rotation_generator()];
                v.extend(diagonal_quintics(p));
                v
            }
        }
    }
}

/// Uniform rational `n / d` with `|n| <= max_num`, `1 <= d <= max_den`.
pub fn random_rational<R: Rng + ?Sized>(rng: &mut R, max_num: i64, max_den: i64) -> Rational {
    let n = rng.gen_range(-max_num..=max_num);
    let d = rng.gen_range(1..=max_den);
    Rational::new(n.into(), d.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Base,
    Eq5,
    Eq6,
    Eq7,
    /// Arbitrary autonomous polynomial field, no parameters.
    Custom,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Base => "base",
            Family::Eq5 => "eq5",
            Family::Eq6 => "eq6",
            Family::Eq7 => "eq7",
            Family::Custom => "custom",
        })
    }
}

fn c(q: &Rational) -> Polynomial {
    Polynomial::constant(q.clone())
}

fn x2() -> Polynomial {
    Polynomial::x().pow(2)
}

fn y2() -> Polynomial {
    Polynomial::y().pow(2)
}

/// `e z - x^2 - y^2 - z^2`.
fn z_component(p: &Params) -> Polynomial {
    let z = Polynomial::z();
    &(&c(&p.e) * &z) - &(&(&x2() + &y2()) + &z.pow(2))
}

/// The base right-hand side.
pub fn build_base(p: &Params) -> PolyVectorField {
    let (x, y, z) = (Polynomial::x(), Polynomial::y(), Polynomial::z());
    let px = &(&(&c(&p.a) * &x) + &(&c(&p.b) * &y)) + &(&x * &z);
    let py = &(&(&c(&p.c) * &x) + &(&c(&p.d) * &y)) + &(&y * &z);
    PolyVectorField::new(px, py, z_component(p))
}

/// `(x (a + z), y (a + z), e z - x^2 - y^2 - z^2)`.
pub fn radial_generator(p: &Params) -> PolyVectorField {
    let az = &c(&p.a) + &Polynomial::z();
    PolyVectorField::new(&Polynomial::x() * &az, &Polynomial::y() * &az, z_component(p))
}

/// `(y, -x, 0)`.
pub fn rotation_generator() -> PolyVectorField {
    PolyVectorField::new(Polynomial::y(), -Polynomial::x(), Polynomial::zero())
}

/// `4 a z + x^2 + y^2 + 2 z^2`.
fn quartic_factor(p: &Params) -> Polynomial {
    let z = Polynomial::z();
    let four_a = int(4) * &p.a;
    &(&(&c(&four_a) * &z) + &(&x2() + &y2())) + &z.pow(2).scale(&int(2))
}

/// `(-y m Q, x m Q, 0)` with `Q = 4az + x^2 + y^2 + 2z^2`.
fn quintic_rotation(p: &Params, m: &Polynomial) -> PolyVectorField {
    let mq = m * &quartic_factor(p);
    PolyVectorField::new(-(&Polynomial::y() * &mq), &Polynomial::x() * &mq, Polynomial::zero())
}

/// The three quintic generators `(y m Q, -x m Q, 0)`, `m in {x^2, xy, y^2}`.
pub fn diagonal_quintics(p: &Params) -> [PolyVectorField; 3] {
    let xy = &Polynomial::x() * &Polynomial::y();
    [x2(), xy, y2()].map(|m| {
        let q = quintic_rotation(p, &m);
        PolyVectorField::new(-q.px, -q.py, q.pz)
    })
}

/// The quintic generator `(-y (x^2+y^2) Q, x (x^2+y^2) Q, 0)`.
pub fn heteroclinic_quintic(p: &Params) -> PolyVectorField {
    quintic_rotation(p, &(&x2() + &y2()))
}

#[derive(Debug, Clone)]
pub struct PerturbationTerm {
    pub delta: PolyVectorField,
    pub signal: Signal,
}

#[derive(Debug, Clone)]
struct CompiledTerm {
    field: CompiledField,
    jacobian: CompiledMatrix,
}

/// `x' = X(x) + sum_i alpha_i(t) delta_i(x)` with every `delta_i`
/// admissible for `X`.
#[derive(Debug, Clone)]
pub struct PerturbedSystem {
    family: Family,
    params: Option<Params>,
    base: PolyVectorField,
    terms: Vec<PerturbationTerm>,
    fast_base: CompiledTerm,
    fast_terms: Vec<CompiledTerm>,
}

impl PerturbedSystem {
    /// Checks every term for exact admissibility against `base`.
    pub fn new(
        family: Family,
        params: Option<Params>,
        base: PolyVectorField,
        terms: Vec<PerturbationTerm>,
    ) -> Result<Self, ModelError> {
        if let Some(index) = terms.iter().position(|t| !is_admissible(&base, &t.delta)) {
            return Err(ModelError::NotAdmissible { index });
        }
        let compile = |f: &PolyVectorField| CompiledTerm {
            field: f.compile(),
            jacobian: CompiledMatrix::new(&f.jacobian()),
        };
        Ok(Self {
            fast_base: compile(&base),
            fast_terms: terms.iter().map(|t| compile(&t.delta)).collect(),
            family,
            params,
            base,
            terms,
        })
    }

    /// Unperturbed autonomous field.
    pub fn autonomous(field: PolyVectorField) -> Self {
        Self::new(Family::Custom, None, field, Vec::new()).expect("no terms to check")
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn params(&self) -> Option<&Params> {
        self.params.as_ref()
    }

    pub fn base(&self) -> &PolyVectorField {
        &self.base
    }

    pub fn terms(&self) -> &[PerturbationTerm] {
        &self.terms
    }

    pub fn signals(&self) -> Vec<&Signal> {
        self.terms.iter().map(|t| &t.signal).collect()
    }

    /// Signal of the `i`-th term, 1-based to match `alpha_i`.
    pub fn alpha(&self, i: usize) -> Option<&Signal> {
        self.terms.get(i.checked_sub(1)?).map(|t| &t.signal)
    }

    pub fn all_signals_odd(&self) -> bool {
        self.terms.iter().all(|t| t.signal.is_odd())
    }

    /// Same base and terms with every signal replaced by zero.
    pub fn unperturbed(&self) -> PerturbedSystem {
        let mut s = self.clone();
        for t in &mut s.terms {
            t.signal = Signal::zero();
        }
        s
    }

    #[inline]
    pub fn rhs(&self, t: f64, p: [f64; 3]) -> [f64; 3] {
        let mut out = self.fast_base.field.eval(p);
        for (term, fast) in self.terms.iter().zip(&self.fast_terms) {
            let s = term.signal.eval(t);
            if s != 0.0 {
                let d = fast.field.eval(p);
                for k in 0..3 {
                    out[k] += s * d[k];
                }
            }
        }
        out
    }

    /// Spatial Jacobian of the full time-dependent right-hand side.
    #[inline]
    pub fn jacobian(&self, t: f64, p: [f64; 3]) -> [[f64; 3]; 3] {
        let mut out = self.fast_base.jacobian.eval(p);
        for (term, fast) in self.terms.iter().zip(&self.fast_terms) {
            let s = term.signal.eval(t);
            if s != 0.0 {
                let j = fast.jacobian.eval(p);
                for r in 0..3 {
                    for c in 0..3 {
                        out[r][c] += s * j[r][c];
                    }
                }
            }
        }
        out
    }
}

/// Right-hand side of `system` at `(t, p)`.
pub fn rhs_eval(system: &PerturbedSystem, t: f64, p: [f64; 3]) -> [f64; 3] {
    system.rhs(t, p)
}

fn check(family: Family, ok: bool, constraint: &str) -> Result<(), ModelError> {
    if ok {
        Ok(())
    } else {
        Err(ModelError::Constraint {
            family,
            constraint: constraint.to_string(),
        })
    }
}

fn check_rotational(family: Family, p: &Params) -> Result<(), ModelError> {
    check(family, p.c == -p.b.clone(), "c = -b")?;
    check(family, p.d == p.a, "d = a")
}

fn check_e(family: Family, p: &Params) -> Result<(), ModelError> {
    check(family, p.e == -(int(2) * &p.a), "e = -2a")
}

fn paired(deltas: Vec<PolyVectorField>, signals: Vec<Signal>) -> Vec<PerturbationTerm> {
    deltas
        .into_iter()
        .zip(signals)
        .map(|(delta, signal)| PerturbationTerm { delta, signal })
        .collect()
}

/// Unperturbed base system, or with `alpha_1` multiplying `X` when one
/// signal is given.
pub fn build_base_system(p: &Params, signals: Vec<Signal>) -> Result<PerturbedSystem, ModelError> {
    if signals.len() > 1 {
        return Err(ModelError::SignalCount {
            family: Family::Base,
            expected: "0 or 1".into(),
            got: signals.len(),
        });
    }
    let base = build_base(p);
    let terms = paired(vec![base.clone()], signals);
    PerturbedSystem::new(Family::Base, Some(p.clone()), base, terms)
}

pub fn build_eq5(p: &Params, alphas: [Signal; 3]) -> Result<PerturbedSystem, ModelError> {
    check_rotational(Family::Eq5, p)?;
    let base = build_base(p);
    let deltas = vec![base.clone(), radial_generator(p), rotation_generator()];
    PerturbedSystem::new(Family::Eq5, Some(p.clone()), base, paired(deltas, alphas.into()))
}

pub fn build_eq6(p: &Params, alphas: [Signal; 4]) -> Result<PerturbedSystem, ModelError> {
    check_rotational(Family::Eq6, p)?;
    check_e(Family::Eq6, p)?;
    let base = build_base(p);
    let deltas = vec![
        base.clone(),
        radial_generator(p),
        rotation_generator(),
        heteroclinic_quintic(p),
    ];
    PerturbedSystem::new(Family::Eq6, Some(p.clone()), base, paired(deltas, alphas.into()))
}

pub fn build_eq7(p: &Params, alphas: [Signal; 5]) -> Result<PerturbedSystem, ModelError> {
    check(Family::Eq7, p.b.is_zero(), "b = 0")?;
    check(Family::Eq7, p.c.is_zero(), "c = 0")?;
    check(Family::Eq7, p.d == p.a, "d = a")?;
    check_e(Family::Eq7, p)?;
    let base = build_base(p);
    let mut deltas = vec![base.clone(), rotation_generator()];
    deltas.extend(diagonal_quintics(p));
    PerturbedSystem::new(Family::Eq7, Some(p.clone()), base, paired(deltas, alphas.into()))
}

/// Dispatches on `family` with a signal list of the matching length.
pub fn build_family(
    family: Family,
    p: &Params,
    signals: Vec<Signal>,
) -> Result<PerturbedSystem, ModelError> {
    fn arr<const N: usize>(family: Family, v: Vec<Signal>) -> Result<[Signal; N], ModelError> {
        let got = v.len();
        v.try_into().map_err(|_| ModelError::SignalCount {
            family,
            expected: N.to_string(),
            got,
        })
    }
    match family {
        Family::Base => build_base_system(p, signals),
        Family::Eq5 => build_eq5(p, arr(family, signals)?),
        Family::Eq6 => build_eq6(p, arr(family, signals)?),
        Family::Eq7 => build_eq7(p, arr(family, signals)?),
        Family::Custom => Err(ModelError::Constraint {
            family,
            constraint: "an explicit field (use PerturbedSystem::autonomous)".into(),
        }),
    }
}

/// An equilibrium of the base field with its Jacobian spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct Equilibrium {
    pub location: [f64; 3],
    pub eigenvalues: [Complex<f64>; 3],
}

/// Closed-form spectra `O: (-2a, a + bi, a - bi)` and `G: (2a, -a + bi, -a - bi)`.
pub fn closed_form_eigenvalues(p: &Params) -> ([Complex<f64>; 3], [Complex<f64>; 3]) {
    let [a, b, ..] = p.as_f64();
    (
        [
            Complex::new(-2.0 * a, 0.0),
            Complex::new(a, b),
            Complex::new(a, -b),
        ],
        [
            Complex::new(2.0 * a, 0.0),
            Complex::new(-a, b),
            Complex::new(-a, -b),
        ],
    )
}

/// Equilibria `O = (0, 0, 0)` and `G = (0, 0, -2a)` with eigenvalues
/// computed numerically from the Jacobian, ordered to match
/// [`closed_form_eigenvalues`] and cross-checked against it.
pub fn equilibrium_eigenvalues(p: &Params) -> Result<(Equilibrium, Equilibrium), ModelError> {
    check_rotational(Family::Eq6, p)?;
    check_e(Family::Eq6, p)?;
    let field = build_base(p);
    let jac = field.jacobian();
    let (o_closed, g_closed) = closed_form_eigenvalues(p);
    let a = to_f64(&p.a);
    let make = |loc: [f64; 3], closed: [Complex<f64>; 3]| -> Result<Equilibrium, ModelError> {
        let m = Matrix3::from_fn(|r, c| jac[r][c].evaluate(loc));
        let mut numeric: Vec<Complex<f64>> = m.complex_eigenvalues().iter().copied().collect();
        let mut ordered = [Complex::new(0.0, 0.0); 3];
        for (slot, target) in ordered.iter_mut().zip(closed) {
            let (idx, _) = numeric
                .iter()
                .enumerate()
                .min_by(|x, y| (x.1 - target).norm().total_cmp(&(y.1 - target).norm()))
                .expect("three eigenvalues");
            *slot = numeric.remove(idx);
        }
        let scale = 1.0 + closed.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if ordered.iter().zip(closed).any(|(n, c)| (n - c).norm() > 1e-9 * scale) {
            return Err(ModelError::BadParam {
                name: "eigenvalues".into(),
                reason: format!("numeric {ordered:?} disagree with closed form {closed:?}"),
            });
        }
        Ok(Equilibrium {
            location: loc,
            eigenvalues: ordered,
        })
    };
    Ok((make([0.0; 3], o_closed)?, make([0.0, 0.0, -2.0 * a], g_closed)?))
}

/// Rational parameters as strings, e.g. `{"a": "-3", "b": "1/3", ...}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsDescription {
    pub a: String,
    pub b: String,
    pub c: String,
    pub d: String,
    pub e: String,
}

impl ParamsDescription {
    pub fn parse(&self) -> Result<Params, ModelError> {
        let q = |name: &str, s: &str| {
            parse_rational(s).map_err(|reason| ModelError::BadParam {
                name: name.to_string(),
                reason,
            })
        };
        Ok(Params::new(
            q("a", &self.a)?,
            q("b", &self.b)?,
            q("c", &self.c)?,
            q("d", &self.d)?,
            q("e", &self.e)?,
        ))
    }

    pub fn from_params(p: &Params) -> Self {
        Self {
            a: p.a.to_string(),
            b: p.b.to_string(),
            c: p.c.to_string(),
            d: p.d.to_string(),
            e: p.e.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TermKind {
    #[default]
    Sin,
    Cos,
    Const,
}

/// One term of a signal: `amp * sin(freq t)`, `amp * cos(freq t)` or `amp`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalTermRecord {
    #[serde(default)]
    pub kind: TermKind,
    pub amp: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub freq: Option<f64>,
}

/// JSON-facing system description:
/// `{"family": "eq6", "params": {...}, "signals": [[{"amp": 1.0, "freq": 1.0}], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDescription {
    pub family: Family,
    pub params: ParamsDescription,
    #[serde(default)]
    pub signals: Vec<Vec<SignalTermRecord>>,
}

pub fn signal_from_records(records: &[SignalTermRecord]) -> Result<Signal, ModelError> {
    use crate::signal::{TrigSignal, TrigTerm};
    let mut sines = Vec::new();
    let mut cosines = Vec::new();
    let mut constant = 0.0;
    for r in records {
        match r.kind {
            TermKind::Const => {
                if r.freq.is_some() {
                    return Err(ModelError::BadParam {
                        name: "signals".into(),
                        reason: "a const term takes no freq".into(),
                    });
                }
                constant += r.amp;
            }
            kind => {
                let freq = r.freq.ok_or_else(|| ModelError::BadParam {
                    name: "signals".into(),
                    reason: "sin/cos terms need a freq".into(),
                })?;
                let term = TrigTerm { amp: r.amp, freq };
                if kind == TermKind::Sin {
                    sines.push(term);
                } else {
                    cosines.push(term);
                }
            }
        }
    }
    Ok(Signal::Trig(TrigSignal::new(sines, cosines, constant)?))
}

impl SystemDescription {
    pub fn build(&self) -> Result<PerturbedSystem, ModelError> {
        let params = self.params.parse()?;
        let signals = self
            .signals
            .iter()
            .map(|r| signal_from_records(r))
            .collect::<Result<Vec<_>, _>>()?;
        build_family(self.family, &params, signals)
    }
}

/// Sign of a rational as `-1`, `0` or `1`.
pub fn sign(q: &Rational) -> i32 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

/// `a (a + e)`, negative exactly when the invariant circle exists.
pub fn cycle_discriminant(p: &Params) -> Rational {
    &p.a * (&p.a + &p.e)
}

/// `2a + e`, whose sign decides stability of the invariant circle.
pub fn stability_index(p: &Params) -> Rational {
    int(2) * &p.a + &p.e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(s: &str) -> Polynomial {
        s.parse().unwrap()
    }

    #[test]
    fn base_field_components() {
        let f = build_base(&Params::attractor());
        assert_eq!(f.pz, p("6*z - x^2 - y^2 - z^2"));
        assert_eq!(f.px, p("-3*x - 8*y + x*z"));
        let zero = build_base(&Params::from_ints(0, 0, 0, 0, 0));
        assert_eq!(zero, PolyVectorField::new(p("x*z"), p("y*z"), p("-x^2 - y^2 - z^2")));
        let belozyorov = Params::new(rat(-1, 3), int(-1), int(1), rat(-1, 3), rat(2, 3));
        assert_eq!(build_base(&belozyorov).pz, p("2/3*z - x^2 - y^2 - z^2"));
    }

    #[test]
    fn builders_enforce_constraints() {
        let ok = Params::attractor();
        assert!(build_eq5(&ok, [Signal::zero(), Signal::zero(), Signal::zero()]).is_ok());
        let bad = Params::from_ints(-3, -8, 7, -3, 6);
        let err = build_eq5(&bad, Signal::harmonics(3).try_into().unwrap()).unwrap_err();
        assert_eq!(
            err,
            ModelError::Constraint { family: Family::Eq5, constraint: "c = -b".into() }
        );
        let bad_e = Params::from_ints(-3, -8, 8, -3, 5);
        let err = build_eq6(&bad_e, Signal::harmonics(4).try_into().unwrap()).unwrap_err();
        assert!(err.to_string().contains("e = -2a"), "{err}");
        let bad_b = Params::from_ints(1, 1, 0, 1, -2);
        let err = build_eq7(&bad_b, Signal::harmonics(5).try_into().unwrap()).unwrap_err();
        assert!(err.to_string().contains("b = 0"), "{err}");
    }

    #[test]
    fn eq6_with_zero_quintic_signal_matches_eq5() {
        let params = Params::attractor();
        let mut s4 = Signal::harmonics(3);
        s4.push(Signal::zero());
        let six = build_eq6(&params, s4.try_into().unwrap()).unwrap();
        let five = build_eq5(&params, Signal::harmonics(3).try_into().unwrap()).unwrap();
        for (i, t) in [0.3, 1.1, -2.5].into_iter().enumerate() {
            let pt = [0.1 * i as f64, -0.4, 0.7];
            assert_eq!(six.rhs(t, pt), five.rhs(t, pt));
        }
        assert_eq!(six.base().pz, p("6*z - x^2 - y^2 - z^2"));
    }

    #[test]
    fn zero_signals_reduce_to_base() {
        let params = Params::from_ints(2, 0, 0, 2, -4);
        let sys = build_eq7(&params, std::array::from_fn(|_| Signal::zero())).unwrap();
        let base = build_base(&params);
        let pt = [0.3, -0.2, 1.5];
        let expected = base.evaluate(pt);
        for t in [0.0, 0.7, 3.0] {
            assert_eq!(sys.rhs(t, pt), expected);
        }
    }

    #[test]
    fn odd_signals_vanish_at_zero_time() {
        let params = Params::attractor();
        let sys = build_eq6(&params, Signal::harmonics(4).try_into().unwrap()).unwrap();
        let pt = [0.01, 0.02, 3.0];
        assert_eq!(sys.rhs(0.0, pt), build_base(&params).evaluate(pt));
        let g = [0.0, 0.0, 6.0];
        assert_eq!(sys.base().evaluate(g), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn every_listed_perturbation_is_admissible() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for class in ParamClass::ALL {
            for _ in 0..3 {
                let params = class.draw(&mut rng);
                assert!(class.holds(&params));
                let x = build_base(&params);
                for d in class.listed_perturbations(&params) {
                    assert!(is_admissible(&x, &d), "{class:?} {params}: {d}");
                }
            }
        }
    }

    #[test]
    fn equilibria_of_attractor_instance() {
        let (o, g) = equilibrium_eigenvalues(&Params::attractor()).unwrap();
        assert_eq!(g.location, [0.0, 0.0, 6.0]);
        let close = |z: Complex<f64>, re: f64, im: f64| (z - Complex::new(re, im)).norm() < 1e-9;
        assert!(close(o.eigenvalues[0], 6.0, 0.0));
        assert!(close(o.eigenvalues[1], -3.0, -8.0));
        assert!(close(o.eigenvalues[2], -3.0, 8.0));
        assert!(close(g.eigenvalues[0], -6.0, 0.0));
        assert!(close(g.eigenvalues[1], 3.0, -8.0));
        assert!(close(g.eigenvalues[2], 3.0, 8.0));
        // lambda_1^O * lambda_1^G = -4 a^2
        assert!(((o.eigenvalues[0] * g.eigenvalues[0]).re + 36.0).abs() < 1e-9);
    }

    #[test]
    fn equilibria_for_centre_case() {
        let (o, _) = equilibrium_eigenvalues(&Params::from_ints(0, 1, -1, 0, 0)).unwrap();
        let moduli: Vec<f64> = o.eigenvalues.iter().map(|z| z.re.abs()).collect();
        assert!(moduli.iter().all(|m| *m < 1e-12));
        assert!((o.eigenvalues[1].im - 1.0).abs() < 1e-12);
        assert!(equilibrium_eigenvalues(&Params::from_ints(1, 1, -1, 1, 0)).is_err());
    }

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rational("-3").unwrap(), int(-3));
        assert_eq!(parse_rational("1/3").unwrap(), rat(1, 3));
        assert_eq!(parse_rational("-0.25").unwrap(), rat(-1, 4));
        assert_eq!(parse_rational("1.5").unwrap(), rat(3, 2));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.").is_err());
    }

    #[test]
    fn description_round_trip() {
        let json = r#"{"family": "eq6",
            "params": {"a": "-3", "b": "-8", "c": "8", "d": "-3", "e": "6"},
            "signals": [[{"amp": 1.0, "freq": 1.0}], [{"amp": 1.0, "freq": 2.0}],
                        [{"amp": 1.0, "freq": 3.0}], [{"kind": "sin", "amp": 1.0, "freq": 4.0}]]}"#;
        let desc: SystemDescription = serde_json::from_str(json).unwrap();
        let sys = desc.build().unwrap();
        assert_eq!(sys.family(), Family::Eq6);
        assert_eq!(sys.terms().len(), 4);
        assert!(sys.all_signals_odd());
        assert!((sys.alpha(4).unwrap().eval(0.3) - (1.2f64).sin()).abs() < 1e-15);

        let unknown = r#"{"family": "eq5", "params": {"a": "1", "b": "2", "c": "-2", "d": "1", "e": "3", "f": "0"}}"#;
        assert!(serde_json::from_str::<SystemDescription>(unknown).is_err());

        let short = r#"{"family": "eq5", "params": {"a": "1", "b": "2", "c": "-2", "d": "1", "e": "3"},
                        "signals": [[]]}"#;
        let desc: SystemDescription = serde_json::from_str(short).unwrap();
        assert!(matches!(desc.build(), Err(ModelError::SignalCount { .. })));
    }

    #[test]
    fn non_odd_signals_are_flagged() {
        let params = Params::from_ints(-1, 1, -1, -1, 0);
        let sys = build_eq5(
            &params,
            [Signal::sin(0.4, 1.0).unwrap(), Signal::cos(0.4, 1.0).unwrap(), Signal::zero()],
        )
        .unwrap();
        assert!(!sys.all_signals_odd());
    }
}
