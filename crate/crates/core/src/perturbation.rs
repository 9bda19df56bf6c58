//! Admissible perturbations.
//!
//! A polynomial field `delta` is an admissible perturbation of an autonomous
//! field `X` when `(d delta/dv) X - (dX/dv) delta` vanishes identically; then
//! `X + alpha(t) delta` shares the reflecting function of `X` for any odd
//! scalar `alpha`. This module computes that residual exactly and solves for
//! every admissible `delta` up to a degree bound.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::algebra::{Monomial, PolyVectorField, Rational, RationalMatrix};

/// Exact residual of the admissibility identity for autonomous `delta`.
pub fn admissibility_residual(x: &PolyVectorField, delta: &PolyVectorField) -> PolyVectorField {
    let lhs = PolyVectorField::apply(&delta.jacobian(), x);
    let rhs = PolyVectorField::apply(&x.jacobian(), delta);
    &lhs - &rhs
}

pub fn is_admissible(x: &PolyVectorField, delta: &PolyVectorField) -> bool {
    admissibility_residual(x, delta).is_zero()
}

/// Coefficient slot of the polynomial ansatz: `(component, monomial)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Slot {
    pub component: usize,
    pub monomial: Monomial,
}

/// General polynomial field of degree `<= n` with unknown coefficients,
/// one slot per `(component, monomial)`.
///
/// Slots are component-major and ascending graded-lex within a component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerturbationAnsatz {
    degree: u32,
    slots: Vec<Slot>,
}

impl PerturbationAnsatz {
    pub fn new(degree: u32) -> Self {
        let monomials = Monomial::up_to_degree(degree);
        let slots = (0..3)
            .flat_map(|component| {
                monomials
                    .iter()
                    .map(move |&monomial| Slot { component, monomial })
            })
            .collect();
        Self { degree, slots }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn field(&self, coeffs: &[Rational]) -> PolyVectorField {
        assert_eq!(coeffs.len(), self.slots.len(), "coefficient count mismatch");
        let mut f = PolyVectorField::zero();
        for (slot, c) in self.slots.iter().zip(coeffs) {
            f.component_mut(slot.component).add_term(slot.monomial, c.clone());
        }
        f
    }

    /// Coefficients of `f` in slot order; `None` if `f` has a term beyond
    /// the degree bound.
    pub fn coefficients(&self, f: &PolyVectorField) -> Option<Vec<Rational>> {
        if f.degree().is_some_and(|d| d > self.degree) {
            return None;
        }
        Some(
            self.slots
                .iter()
                .map(|s| f.component(s.component).coefficient(&s.monomial))
                .collect(),
        )
    }

    /// Matrix of the linear map (ansatz coefficients) -> (residual
    /// coefficients). Rows run over every `(component, monomial)` that
    /// appears in the residual of some unit field, in sorted order.
    pub fn residual_matrix(&self, x: &PolyVectorField) -> RationalMatrix {
        let columns: Vec<PolyVectorField> = self
            .slots
            .iter()
            .map(|s| admissibility_residual(x, &PolyVectorField::unit(s.component, s.monomial)))
            .collect();
        coefficient_matrix(&columns)
    }
}

/// Stacks fields as columns, rows indexed by all `(component, monomial)`
/// pairs that occur.
fn coefficient_matrix(columns: &[PolyVectorField]) -> RationalMatrix {
    let mut rows: BTreeMap<(usize, Monomial), usize> = BTreeMap::new();
    for f in columns {
        for (comp, p) in f.components().iter().enumerate() {
            for (m, _) in p.terms() {
                rows.entry((comp, *m)).or_insert(0);
            }
        }
    }
    for (i, v) in rows.values_mut().enumerate() {
        *v = i;
    }
    let mut mat = RationalMatrix::zeros(rows.len(), columns.len());
    for (col, f) in columns.iter().enumerate() {
        for (comp, p) in f.components().iter().enumerate() {
            for (m, c) in p.terms() {
                mat.set(rows[&(comp, *m)], col, c.clone());
            }
        }
    }
    mat
}

/// Basis of all admissible polynomial perturbations of `x` with degree
/// `<= degree`, from the exact nullspace of the residual map.
pub fn find_admissible_basis(x: &PolyVectorField, degree: u32) -> Vec<PolyVectorField> {
    let ansatz = PerturbationAnsatz::new(degree);
    ansatz
        .residual_matrix(x)
        .nullspace()
        .iter()
        .map(|v| ansatz.field(v))
        .collect()
}

/// Whether `candidate` is an exact rational combination of `basis`.
pub fn spans(basis: &[PolyVectorField], candidate: &PolyVectorField) -> bool {
    if candidate.is_zero() {
        return true;
    }
    if basis.is_empty() {
        return false;
    }
    let mut cols: Vec<PolyVectorField> = basis.to_vec();
    let without = coefficient_matrix(&cols);
    cols.push(candidate.clone());
    let with = coefficient_matrix(&cols);
    // Row sets differ only by monomials unique to the candidate, which
    // raise the rank of `with` as they should.
    without.rank() == with.rank()
}

/// Coordinates of `candidate` in `basis`, if it lies in the span.
pub fn solve_in_span(basis: &[PolyVectorField], candidate: &PolyVectorField) -> Option<Vec<Rational>> {
    let mut cols: Vec<PolyVectorField> = basis.to_vec();
    cols.push(candidate.clone());
    let null = coefficient_matrix(&cols).nullspace();
    let last = basis.len();
    let v = null.into_iter().find(|v| !v[last].is_zero())?;
    let scale = -v[last].clone();
    Some(v[..last].iter().map(|c| c / &scale).collect())
}
