use langford_mrf::algebra::{int, rat, Monomial, PolyVectorField, Polynomial, Rational, RationalMatrix, Var};
use langford_mrf::langford::{build_base, ParamClass, Params};
use langford_mrf::perturbation::{admissibility_residual, find_admissible_basis, is_admissible};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| rat(n, d))
}

fn polynomial() -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(((0u32..3, 0u32..3, 0u32..3), rational()), 0..5).prop_map(|terms| {
        let mut p = Polynomial::zero();
        for ((i, j, k), c) in terms {
            p = &p + &Polynomial::term(c, Monomial([i, j, k]));
        }
        p
    })
}

fn field() -> impl Strategy<Value = PolyVectorField> {
    (polynomial(), polynomial(), polynomial()).prop_map(|(a, b, c)| PolyVectorField::new(a, b, c))
}

fn point() -> impl Strategy<Value = [f64; 3]> {
    [-1.5f64..1.5, -1.5f64..1.5, -1.5f64..1.5]
}

fn params() -> impl Strategy<Value = Params> {
    (rational(), rational(), rational(), rational(), rational()).prop_map(|(a, b, c, d, e)| Params::new(a, b, c, d, e))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(p in polynomial(), q in polynomial(), r in polynomial()) {
        prop_assert_eq!(&p + &q, &q + &p);
        prop_assert_eq!(&p * &q, &q * &p);
        prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
        prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
        prop_assert!((&p - &p).is_zero());
        prop_assert_eq!(&p * &Polynomial::one(), p.clone());
    }

    #[test]
    fn mixed_partials_commute(p in polynomial()) {
        for (u, v) in [(Var::X, Var::Y), (Var::X, Var::Z), (Var::Y, Var::Z)] {
            prop_assert_eq!(p.partial(u).partial(v), p.partial(v).partial(u));
        }
    }

    #[test]
    fn leibniz_rule(p in polynomial(), q in polynomial()) {
        for v in [Var::X, Var::Y, Var::Z] {
            let lhs = (&p * &q).partial(v);
            let rhs = &(&p.partial(v) * &q) + &(&p * &q.partial(v));
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn evaluation_is_a_homomorphism(p in polynomial(), q in polynomial(), x in point()) {
        let prod = (&p * &q).evaluate(x);
        let sep = p.evaluate(x) * q.evaluate(x);
        prop_assert!((prod - sep).abs() <= 1e-9 * (1.0 + sep.abs()));
        let sum = (&p + &q).evaluate(x);
        prop_assert!((sum - p.evaluate(x) - q.evaluate(x)).abs() <= 1e-9 * (1.0 + sum.abs()));
        let compiled = p.compile().eval(x);
        prop_assert!((compiled - p.evaluate(x)).abs() <= 1e-12 * (1.0 + compiled.abs()));
    }

    #[test]
    fn display_round_trips(p in polynomial()) {
        let text = p.to_string();
        prop_assert_eq!(text.parse::<Polynomial>().unwrap(), p);
    }

    #[test]
    fn nullspace_is_kernel(rows in prop::collection::vec(prop::collection::vec(-4i64..=4, 5), 1..6)) {
        let m = RationalMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect());
        let kernel = m.nullspace();
        prop_assert_eq!(m.rank() + kernel.len(), m.cols());
        for v in &kernel {
            prop_assert!(m.mul_vec(v).iter().all(|c| *c == int(0)));
            // primitive integer vector with positive leading entry
            prop_assert!(v.iter().all(|c| c.is_integer()));
            let lead = v.iter().find(|c| **c != int(0)).unwrap();
            prop_assert!(*lead > int(0));
        }
        let stacked = RationalMatrix::from_rows(kernel.clone());
        if !kernel.is_empty() {
            prop_assert_eq!(stacked.rank(), kernel.len());
        }
    }

    #[test]
    fn residual_is_linear_in_delta(p in params(), d1 in field(), d2 in field(), c in rational()) {
        let x = build_base(&p);
        let combo = &d1 + &d2.scale(&c);
        let lhs = admissibility_residual(&x, &combo);
        let rhs = &admissibility_residual(&x, &d1) + &admissibility_residual(&x, &d2).scale(&c);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn field_is_admissible_for_itself(f in field(), c in rational()) {
        prop_assert!(is_admissible(&f, &f));
        prop_assert!(is_admissible(&f, &f.scale(&c)));
    }
}

#[test]
fn basis_dimension_grows_with_degree() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
    for class in [ParamClass::Generic, ParamClass::Rotational, ParamClass::Heteroclinic] {
        let p = class.draw(&mut rng);
        let x = build_base(&p);
        let dims: Vec<usize> = (0..=3).map(|n| find_admissible_basis(&x, n).len()).collect();
        assert!(dims.windows(2).all(|w| w[0] <= w[1]), "{class:?}: {dims:?}");
        assert_eq!(dims[0], 0);
    }
}
