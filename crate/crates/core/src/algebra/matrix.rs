use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::Rational;

/// Dense row-major matrix of exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

/// Row echelon form over the integers, produced by fraction-free elimination.
struct Echelon {
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        let n = rows.len();
        Self {
            rows: n,
            cols,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols, "dimension mismatch");
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .filter(|(a, _)| !a.is_zero())
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.echelon().pivots.len()
    }

    /// Exact basis of the right nullspace.
    ///
    /// One vector per pivot-free column, in ascending column order; each is
    /// scaled to coprime integer entries with a positive leading entry.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let ech = self.echelon();
        let mut is_pivot = vec![false; self.cols];
        for &p in &ech.pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![Rational::zero(); self.cols];
            v[free] = Rational::one();
            for (r, &pc) in ech.pivots.iter().enumerate().rev() {
                let row = &ech.rows[r];
                let mut acc = Rational::zero();
                for c in (pc + 1)..self.cols {
                    if !row[c].is_zero() && !v[c].is_zero() {
                        acc += Rational::from_integer(row[c].clone()) * &v[c];
                    }
                }
                v[pc] = -acc / Rational::from_integer(row[pc].clone());
            }
            basis.push(primitive(v));
        }
        basis
    }

    /// Fraction-free (Bareiss) forward elimination. Each row is first
    /// cleared of denominators; the pivot in each column is the first row
    /// at or below the current one with a nonzero entry.
    fn echelon(&self) -> Echelon {
        let mut a: Vec<Vec<BigInt>> = (0..self.rows).map(|r| integer_row(self.row(r))).collect();
        let mut pivots = Vec::new();
        let mut prev = BigInt::one();
        let mut k = 0;
        for col in 0..self.cols {
            if k == self.rows {
                break;
            }
            let Some(p) = (k..self.rows).find(|&r| !a[r][col].is_zero()) else {
                continue;
            };
            a.swap(k, p);
            let (top, rest) = a.split_at_mut(k + 1);
            let pivot_row = &top[k];
            let piv = &pivot_row[col];
            for row in rest.iter_mut() {
                let factor = row[col].clone();
                for c in (col + 1)..self.cols {
                    let v = piv * &row[c] - &factor * &pivot_row[c];
                    row[c] = if prev.is_one() { v } else { v / &prev };
                }
                row[col] = BigInt::zero();
            }
            prev = piv.clone();
            pivots.push(col);
            k += 1;
        }
        Echelon { rows: a, pivots }
    }
}

fn integer_row(row: &[Rational]) -> Vec<BigInt> {
    let l = row
        .iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    row.iter()
        .map(|q| q.numer() * (&l / q.denom()))
        .collect()
}

/// Scales a nonzero rational vector to coprime integers, first nonzero > 0.
fn primitive(v: Vec<Rational>) -> Vec<Rational> {
    let ints = integer_row(&v);
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return v;
    }
    let sign = match ints.iter().find(|x| !x.is_zero()) {
        Some(x) if x.is_negative() => -BigInt::one(),
        _ => BigInt::one(),
    };
    ints.into_iter()
        .map(|x| Rational::from_integer(x / &g * &sign))
        .collect()
}
