use std::fmt;
use std::ops::{Add, Sub};

use super::polynomial::{CompiledPolynomial, Monomial, Polynomial, Var};
use super::Rational;

/// 3x3 matrix of polynomials, e.g. a Jacobian; `m[r][c]`.
pub type PolyMatrix3 = [[Polynomial; 3]; 3];

/// Polynomial vector field `(px, py, pz)` on R^3.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PolyVectorField {
    pub px: Polynomial,
    pub py: Polynomial,
    pub pz: Polynomial,
}

impl PolyVectorField {
    pub fn new(px: Polynomial, py: Polynomial, pz: Polynomial) -> Self {
        Self { px, py, pz }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_components(c: [Polynomial; 3]) -> Self {
        let [px, py, pz] = c;
        Self { px, py, pz }
    }

    pub fn components(&self) -> [&Polynomial; 3] {
        [&self.px, &self.py, &self.pz]
    }

    pub fn component(&self, i: usize) -> &Polynomial {
        self.components()[i]
    }

    pub fn component_mut(&mut self, i: usize) -> &mut Polynomial {
        match i {
            0 => &mut self.px,
            1 => &mut self.py,
            2 => &mut self.pz,
            _ => panic!("component index {i} out of range"),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.components().iter().all(|p| p.is_zero())
    }

    /// Largest component degree; `None` for the zero field.
    pub fn degree(&self) -> Option<u32> {
        self.components().iter().filter_map(|p| p.degree()).max()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.px.scale(c), self.py.scale(c), self.pz.scale(c))
    }

    /// Multiplies every component by the same polynomial.
    pub fn mul_poly(&self, q: &Polynomial) -> Self {
        Self::new(&self.px * q, &self.py * q, &self.pz * q)
    }

    /// `J[r][c] = d f_r / d v_c` with `v = (x, y, z)`.
    pub fn jacobian(&self) -> PolyMatrix3 {
        let row = |p: &Polynomial| [p.partial(Var::X), p.partial(Var::Y), p.partial(Var::Z)];
        [row(&self.px), row(&self.py), row(&self.pz)]
    }

    /// Divergence `sum_i d f_i / d v_i`.
    pub fn divergence(&self) -> Polynomial {
        &(&self.px.partial(Var::X) + &self.py.partial(Var::Y)) + &self.pz.partial(Var::Z)
    }

    /// Matrix-vector product `m * f`.
    pub fn apply(m: &PolyMatrix3, f: &PolyVectorField) -> PolyVectorField {
        let comps = f.components();
        let row = |r: usize| {
            let mut acc = Polynomial::zero();
            for (c, fc) in comps.iter().enumerate() {
                acc = &acc + &(&m[r][c] * fc);
            }
            acc
        };
        Self::new(row(0), row(1), row(2))
    }

    /// Unit field with a single monomial in one component.
    pub fn unit(component: usize, m: Monomial) -> Self {
        let mut f = Self::zero();
        *f.component_mut(component) = Polynomial::term(Rational::from_integer(1.into()), m);
        f
    }

    pub fn evaluate(&self, p: [f64; 3]) -> [f64; 3] {
        [self.px.evaluate(p), self.py.evaluate(p), self.pz.evaluate(p)]
    }

    pub fn compile(&self) -> CompiledField {
        CompiledField {
            comps: [self.px.compile(), self.py.compile(), self.pz.compile()],
        }
    }
}

impl<'a> Add<&'a PolyVectorField> for &'a PolyVectorField {
    type Output = PolyVectorField;
    fn add(self, rhs: &'a PolyVectorField) -> PolyVectorField {
        PolyVectorField::new(&self.px + &rhs.px, &self.py + &rhs.py, &self.pz + &rhs.pz)
    }
}

impl<'a> Sub<&'a PolyVectorField> for &'a PolyVectorField {
    type Output = PolyVectorField;
    fn sub(self, rhs: &'a PolyVectorField) -> PolyVectorField {
        PolyVectorField::new(&self.px - &rhs.px, &self.py - &rhs.py, &self.pz - &rhs.pz)
    }
}

impl fmt::Display for PolyVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.px, self.py, self.pz)
    }
}

/// Float-coefficient vector field and its Jacobian, for integrators.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CompiledField {
    comps: [CompiledPolynomial; 3],
}

impl CompiledField {
    #[inline]
    pub fn eval(&self, p: [f64; 3]) -> [f64; 3] {
        [self.comps[0].eval(p), self.comps[1].eval(p), self.comps[2].eval(p)]
    }
}

/// Float-coefficient 3x3 polynomial matrix.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CompiledMatrix {
    entries: [[CompiledPolynomial; 3]; 3],
}

impl CompiledMatrix {
    pub fn new(m: &PolyMatrix3) -> Self {
        let row = |r: usize| [m[r][0].compile(), m[r][1].compile(), m[r][2].compile()];
        Self {
            entries: [row(0), row(1), row(2)],
        }
    }

    #[inline]
    pub fn eval(&self, p: [f64; 3]) -> [[f64; 3]; 3] {
        let mut out = [[0.0; 3]; 3];
        for (r, row) in self.entries.iter().enumerate() {
            for (c, e) in row.iter().enumerate() {
                out[r][c] = e.eval(p);
            }
        }
        out
    }
}
