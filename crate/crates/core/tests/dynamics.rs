use std::f64::consts::PI;

use langford_mrf::algebra::{int, to_f64};
use langford_mrf::dynamics::{
    floquet, lyapunov_spectrum, orbit_residual, shift_operator_compare, ClosedFormOrbit, Stability,
};
use langford_mrf::langford::{
    build_base_system, build_eq5, build_eq6, cycle_discriminant, stability_index, ParamClass, Params,
};
use langford_mrf::ode::IntegratorConfig;
use langford_mrf::signal::{Signal, TrigSignal, TrigTerm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_trig(rng: &mut ChaCha8Rng) -> Signal {
    let mut terms = |n: usize| -> Vec<TrigTerm> {
        (0..n)
            .map(|_| TrigTerm { amp: rng.gen_range(-1.5..1.5), freq: rng.gen_range(0.1..5.0) })
            .collect()
    };
    let (s, c) = (terms(2), terms(1));
    TrigSignal::new(s, c, 0.0).unwrap().into()
}

/// Rotational draw with a circle (`a(a+e) < 0`, `b != 0`).
fn circle_params(rng: &mut ChaCha8Rng, class: ParamClass) -> Params {
    loop {
        let p = class.draw_bounded(rng, 10, 10);
        if cycle_discriminant(&p) < int(0) && p.b != int(0) {
            return p;
        }
    }
}

#[test]
fn closed_form_orbits_solve_their_systems() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..10 {
        let p = circle_params(&mut rng, ParamClass::Rotational);
        let base = build_base_system(&p, vec![]).unwrap();
        let o = ClosedFormOrbit::for_system(&base).unwrap();
        assert!(orbit_residual(&base, &o, 100, (0.0, 10.0)).unwrap() <= 1e-10, "{p}");

        let alphas: [Signal; 3] = std::array::from_fn(|_| random_trig(&mut rng));
        let sys = build_eq5(&p, alphas).unwrap();
        let o = ClosedFormOrbit::for_system(&sys).unwrap();
        let r = orbit_residual(&sys, &o, 100, (0.0, 10.0)).unwrap();
        assert!(r <= 1e-10, "eq5 {p}: {r}");

        let q = circle_params(&mut rng, ParamClass::Heteroclinic);
        let alphas: [Signal; 4] = std::array::from_fn(|_| random_trig(&mut rng));
        let sys = build_eq6(&q, alphas).unwrap();
        let o = ClosedFormOrbit::for_system(&sys).unwrap();
        let r = orbit_residual(&sys, &o, 100, (0.0, 10.0)).unwrap();
        assert!(r <= 1e-10, "eq6 {q}: {r}");
    }
}

/// Transverse Floquet exponents of the circle: roots of
/// `l^2 - (2a+e) l + 2 r^2`.
fn transverse_rates(p: &Params) -> [f64; 2] {
    let tr = to_f64(&stability_index(p));
    let det = -2.0 * to_f64(&cycle_discriminant(p));
    let disc = tr * tr - 4.0 * det;
    if disc < 0.0 {
        [tr / 2.0; 2]
    } else {
        [(tr - disc.sqrt()) / 2.0, (tr + disc.sqrt()) / 2.0]
    }
}

#[test]
fn floquet_follows_stability_index() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    // unstable circles amplify the integration error by their multipliers
    let cfg = IntegratorConfig::dopri(1e-12, 1e-14);
    let mut seen = 0;
    while seen < 10 {
        let p = circle_params(&mut rng, ParamClass::Rotational);
        let period = 2.0 * PI / to_f64(&p.b).abs();
        let rates = transverse_rates(&p).map(|r| r.abs() * period);
        // keep multipliers resolvable: away from 1 and below overflow
        if rates[0] < 0.05 || rates[1] > 20.0 {
            continue;
        }
        seen += 1;
        let sys = build_base_system(&p, vec![]).unwrap();
        let r = floquet(&sys, &ClosedFormOrbit::eq8(&p).unwrap(), period, &cfg).unwrap();
        let expected = if stability_index(&p) < int(0) {
            Stability::AsymptoticallyStable
        } else {
            Stability::Unstable
        };
        assert_eq!(r.classification, expected, "{p}: {:?}", r.multipliers);
        assert!(r.trivial_distance < 1e-4, "{p}: {}", r.trivial_distance);
        assert!(r.return_gap < 1e-7, "{p}: {}", r.return_gap);
    }
}

#[test]
fn shift_distance_shrinks_with_tolerance() {
    let p = Params::from_ints(-1, 1, -1, -1, 3);
    let base = build_base_system(&p, vec![]).unwrap();
    let eq5 = build_eq5(&p, Signal::harmonics(3).try_into().unwrap()).unwrap();
    let pts = [[0.1, 0.2, 0.3], [-0.3, 0.1, 0.2]];
    let mut last = f64::INFINITY;
    for rtol in [1e-6, 1e-8, 1e-10] {
        let cfg = IntegratorConfig::dopri(rtol, rtol * 1e-3);
        let d = shift_operator_compare(&base, &eq5, 1.0, &pts, &cfg).unwrap().max_distance;
        assert!(d <= 2.0 * last + 1e-14, "rtol {rtol}: {d} after {last}");
        last = d;
    }
    assert!(last < 1e-8);
}

#[test]
fn lyapunov_sum_matches_divergence_on_the_stable_circle() {
    let p = Params::new(int(-1), int(1), int(-1), int(-1), langford_mrf::algebra::rat(3, 2));
    let sys = build_base_system(&p, vec![]).unwrap();
    let s = lyapunov_spectrum(&sys, [0.0, 0.75, 1.0], 50.0, 550.0, 0.1, &IntegratorConfig::default()).unwrap();
    assert!((s.sum - to_f64(&p.divergence())).abs() <= 0.01, "{:?}", s.exponents);
    assert!(s.exponents[0].abs() <= 0.01, "{:?}", s.exponents);
}
