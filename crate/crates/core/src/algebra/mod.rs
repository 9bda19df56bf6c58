//! Exact arithmetic over the rationals: polynomials in `(x, y, z)`,
//! polynomial vector fields and dense rational matrices.

mod field;
mod matrix;
mod polynomial;

pub use field::{CompiledField, CompiledMatrix, PolyMatrix3, PolyVectorField};
pub use matrix::RationalMatrix;
pub use polynomial::{CompiledPolynomial, Monomial, ParsePolynomialError, Polynomial, Var};

use num_bigint::BigInt;
use num_rational::BigRational;

/// Exact rational number, always in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Builds the rational `num / den`.
///
/// Panics if `den` is zero.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Builds the integer rational `n`.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Nearest `f64` to an exact rational.
pub fn to_f64(q: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}
