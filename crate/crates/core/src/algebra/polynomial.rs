use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{to_f64, Rational};

/// One of the three space variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Var {
    X,
    Y,
    Z,
}

impl Var {
    pub const ALL: [Var; 3] = [Var::X, Var::Y, Var::Z];

    pub fn index(self) -> usize {
        match self {
            Var::X => 0,
            Var::Y => 1,
            Var::Z => 2,
        }
    }

    fn symbol(self) -> char {
        match self {
            Var::X => 'x',
            Var::Y => 'y',
            Var::Z => 'z',
        }
    }
}

/// Exponent triple of `x^i y^j z^k`.
///
/// Ordered graded-lexicographically with `x > y > z`: a monomial of higher
/// total degree is greater, ties are broken by the `x` exponent, then `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Monomial(pub [u32; 3]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0, 0, 0]);

    pub fn new(i: u32, j: u32, k: u32) -> Self {
        Monomial([i, j, k])
    }

    pub fn var(v: Var) -> Self {
        let mut e = [0; 3];
        e[v.index()] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exponent(&self, v: Var) -> u32 {
        self.0[v.index()]
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial([
            self.0[0] + other.0[0],
            self.0[1] + other.0[1],
            self.0[2] + other.0[2],
        ])
    }

    /// All monomials of total degree `<= n`, in ascending graded-lex order.
    pub fn up_to_degree(n: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        for d in 0..=n {
            let mut same = Vec::new();
            for i in 0..=d {
                for j in 0..=(d - i) {
                    same.push(Monomial::new(i, j, d - i - j));
                }
            }
            same.sort();
            out.extend(same);
        }
        out
    }

    pub fn eval(&self, p: [f64; 3]) -> f64 {
        p[0].powi(self.0[0] as i32) * p[1].powi(self.0[1] as i32) * p[2].powi(self.0[2] as i32)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in Var::ALL {
            let e = self.exponent(v);
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{}", v.symbol())?;
            } else {
                write!(f, "{}^{}", v.symbol(), e)?;
            }
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

/// Polynomial in `(x, y, z)` with exact rational coefficients.
///
/// Zero coefficients are never stored, so structural equality is
/// polynomial equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self::term(c, Monomial::ONE)
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn var(v: Var) -> Self {
        Self::term(Rational::one(), Monomial::var(v))
    }

    pub fn x() -> Self {
        Self::var(Var::X)
    }

    pub fn y() -> Self {
        Self::var(Var::Y)
    }

    pub fn z() -> Self {
        Self::var(Var::Z)
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    /// Adds `c * m` in place, pruning the entry if it cancels.
    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(m, q)| (*m, q * c)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Polynomial {
        let mut acc = Polynomial::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Formal partial derivative with respect to `v`.
    pub fn partial(&self, v: Var) -> Polynomial {
        let idx = v.index();
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let e = m.0[idx];
            if e == 0 {
                continue;
            }
            let mut dm = *m;
            dm.0[idx] -= 1;
            out.add_term(dm, c * Rational::from_integer(e.into()));
        }
        out
    }

    /// Evaluates at a floating-point point; coefficients are rounded to the
    /// nearest `f64` first.
    pub fn evaluate(&self, p: [f64; 3]) -> f64 {
        self.terms.iter().map(|(m, c)| to_f64(c) * m.eval(p)).sum()
    }

    /// Evaluates exactly at a rational point.
    pub fn evaluate_exact(&self, p: &[Rational; 3]) -> Rational {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (k, base) in p.iter().enumerate() {
                for _ in 0..m.0[k] {
                    t *= base;
                }
            }
            acc += t;
        }
        acc
    }

    /// Float-coefficient copy for fast repeated evaluation.
    pub fn compile(&self) -> CompiledPolynomial {
        CompiledPolynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (to_f64(c), m.0))
                .collect(),
        }
    }
}

/// A polynomial with `f64` coefficients, used on the numerical hot path.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CompiledPolynomial {
    terms: Vec<(f64, [u32; 3])>,
}

impl CompiledPolynomial {
    #[inline]
    pub fn eval(&self, p: [f64; 3]) -> f64 {
        let mut acc = 0.0;
        for (c, e) in &self.terms {
            acc += c * ipow(p[0], e[0]) * ipow(p[1], e[1]) * ipow(p[2], e[2]);
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

#[inline]
fn ipow(b: f64, e: u32) -> f64 {
    match e {
        0 => 1.0,
        1 => b,
        2 => b * b,
        _ => b.powi(e as i32),
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &'a Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: Polynomial) -> Polynomial {
        &self + &rhs
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &'a Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: Polynomial) -> Polynomial {
        &self - &rhs
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &'a Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect(),
        }
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

impl From<Rational> for Polynomial {
    fn from(c: Rational) -> Self {
        Polynomial::constant(c)
    }
}

/// Canonical text form: `c*x^i*y^j*z^k` terms from highest to lowest in
/// graded-lex order, coefficient always written (`1*x`), `0` for zero.
impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (m, c)) in self.terms.iter().rev().enumerate() {
            let mag = c.abs();
            match (n, c.is_negative()) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            write!(f, "{mag}")?;
            if *m != Monomial::ONE {
                write!(f, "*{m}")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse polynomial near `{fragment}`: {reason}")]
pub struct ParsePolynomialError {
    pub fragment: String,
    pub reason: &'static str,
}

/// Parses sums of products of rational constants and `x`, `y`, `z` powers,
/// e.g. `-3/2*x^2*z + 1*y - 4`. Accepts the canonical [`Display`] form.
impl FromStr for Polynomial {
    type Err = ParsePolynomialError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(ParsePolynomialError {
                fragment: s.to_string(),
                reason: "empty input",
            });
        }
        let mut out = Polynomial::zero();
        let mut term = String::new();
        let mut sign_negative = false;
        let mut at_start = true;
        for ch in compact.chars() {
            if (ch == '+' || ch == '-') && !term.is_empty() {
                let (m, c) = parse_term(&term)?;
                out.add_term(m, if sign_negative { -c } else { c });
                term.clear();
                sign_negative = ch == '-';
            } else if (ch == '+' || ch == '-') && at_start {
                sign_negative = ch == '-';
            } else if ch == '+' || ch == '-' {
                return Err(ParsePolynomialError {
                    fragment: compact.clone(),
                    reason: "dangling sign",
                });
            } else {
                term.push(ch);
            }
            at_start = false;
        }
        if term.is_empty() {
            return Err(ParsePolynomialError {
                fragment: compact,
                reason: "trailing sign",
            });
        }
        let (m, c) = parse_term(&term)?;
        out.add_term(m, if sign_negative { -c } else { c });
        Ok(out)
    }
}

fn parse_term(term: &str) -> Result<(Monomial, Rational), ParsePolynomialError> {
    let err = |reason| ParsePolynomialError {
        fragment: term.to_string(),
        reason,
    };
    let mut coeff = Rational::one();
    let mut mono = Monomial::ONE;
    for factor in term.split('*') {
        let mut chars = factor.chars();
        match chars.next() {
            Some(v @ ('x' | 'y' | 'z')) => {
                let var = match v {
                    'x' => Var::X,
                    'y' => Var::Y,
                    _ => Var::Z,
                };
                let rest = chars.as_str();
                let e = if rest.is_empty() {
                    1
                } else if let Some(digits) = rest.strip_prefix('^') {
                    digits.parse::<u32>().map_err(|_| err("bad exponent"))?
                } else {
                    return Err(err("unexpected characters after variable"));
                };
                mono.0[var.index()] += e;
            }
            Some(_) => {
                let c: Rational = factor.parse().map_err(|_| err("bad rational constant"))?;
                coeff *= c;
            }
            None => return Err(err("empty factor")),
        }
    }
    Ok((mono, coeff))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{int, rat};

    fn p(s: &str) -> Polynomial {
        s.parse().unwrap()
    }

    #[test]
    fn add_cancels_and_collects() {
        assert_eq!(p("x^2 + y") + p("-x^2"), p("y"));
        assert_eq!(p("x^2 + y") + Polynomial::zero(), p("x^2 + y"));
        assert_eq!(p("2*x*z") + p("3*x*z"), p("5*x*z"));
    }

    #[test]
    fn mul_difference_of_squares() {
        assert_eq!(p("x + y") * p("x - y"), p("x^2 - y^2"));
        assert!((p("x + y") * Polynomial::zero()).is_zero());
    }

    #[test]
    fn mul_matches_hand_expansion_of_quartic_factor() {
        // y(x^2+y^2)(x^2+y^2+2z^2), expanded by hand:
        // x^4 y + 2 x^2 y^3 + y^5 + 2 x^2 y z^2 + 2 y^3 z^2
        let lhs = p("y") * p("x^2 + y^2") * p("x^2 + y^2 + 2*z^2");
        let rhs = p("x^4*y + 2*x^2*y^3 + y^5 + 2*x^2*y*z^2 + 2*y^3*z^2");
        assert_eq!(lhs, rhs);
        assert_eq!(lhs.degree(), Some(5));
    }

    #[test]
    fn partial_derivatives() {
        let e = int(6);
        let pz = Polynomial::constant(e.clone()) * p("z") - p("x^2 + y^2 + z^2");
        assert_eq!(
            pz.partial(Var::Z),
            Polynomial::constant(e) - p("2*z")
        );
        assert!(p("7/3").partial(Var::X).is_zero());
        assert_eq!(p("x*y^2").partial(Var::Y), p("2*x*y"));
    }

    #[test]
    fn evaluation() {
        assert_eq!(p("x^2 + y^2 + z^2").evaluate([1.0, 2.0, 3.0]), 14.0);
        assert_eq!(Polynomial::zero().evaluate([1.5, -2.0, 9.0]), 0.0);
        let g = p("6*z - x^2 - y^2 - z^2");
        assert_eq!(g.evaluate([0.0, 0.0, 6.0]), 0.0);
        assert_eq!(g.compile().eval([0.0, 0.0, 6.0]), 0.0);
    }

    #[test]
    fn display_is_graded_lex_descending() {
        let q = p("z + y + x + x*z + 1/2*y^2 - 3");
        assert_eq!(q.to_string(), "1*x*z + 1/2*y^2 + 1*x + 1*y + 1*z - 3");
        assert_eq!(Polynomial::zero().to_string(), "0");
        assert_eq!(q.to_string().parse::<Polynomial>().unwrap(), q);
    }

    #[test]
    fn monomial_order() {
        let ms = Monomial::up_to_degree(2);
        assert_eq!(ms.len(), 10);
        assert_eq!(ms[0], Monomial::ONE);
        // degree-1 ascending: z < y < x
        assert_eq!(&ms[1..4], &[Monomial::new(0, 0, 1), Monomial::new(0, 1, 0), Monomial::new(1, 0, 0)]);
        assert!(Monomial::new(2, 0, 0) > Monomial::new(1, 1, 0));
        assert!(Monomial::new(0, 0, 3) > Monomial::new(2, 0, 0));
    }

    #[test]
    fn parse_errors() {
        assert!("".parse::<Polynomial>().is_err());
        assert!("x +".parse::<Polynomial>().is_err());
        assert!("x^a".parse::<Polynomial>().is_err());
        assert!("w".parse::<Polynomial>().is_err());
        assert_eq!(p("-x"), Polynomial::x().scale(&rat(-1, 1)));
    }
}
