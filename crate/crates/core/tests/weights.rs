use std::sync::Arc;

use movbound::weights::*;
use proptest::prelude::*;

// √π·erf(1) − (1 − e^{−1}).
const C0_CLOSED_FORM: f64 = 1.493_648_265_624_854 - 0.632_120_558_828_557_7;

#[test]
fn c0_matches_closed_form() {
    let t = SigmaTable::new(1024).unwrap();
    assert!((compute_c0(&t) - C0_CLOSED_FORM).abs() < 1e-12, "{}", compute_c0(&t));
    assert!((t.lemma_c0 - compute_c0(&t) - 1.0).abs() < 1e-15);
}

#[test]
fn sigma_bounds_and_ode_on_uniform_grid() {
    let t = SigmaTable::new(1024).unwrap();
    let pts = uniform_grid(1000);
    let r = t.check_bounds(&pts, compute_c0(&t)).unwrap();
    assert!(r.value_bounds_hold, "{r:?}");
    assert!(t.check_bounds(&pts, t.lemma_c0).unwrap().derivative_bounds_hold);
    assert!(t.ode_residual(&pts).unwrap() < 1e-6);
}

#[test]
fn sigma_table_csv() {
    let t = SigmaTable::new(8).unwrap();
    let csv = t.to_csv();
    assert_eq!(csv.lines().count(), 9);
    assert!(csv.starts_with("s,sigma,sigma_prime"));
}

fn weights(lambda: f64) -> CarlemanWeights {
    CarlemanWeights::new(0.5, vec![0.3], 0.001, 0.01, lambda, Arc::new(SigmaTable::new(256).unwrap())).unwrap()
}

#[test]
fn weight_lower_bound_on_level_set() {
    for lambda in [1.0, 4.0, 16.0] {
        let w = weights(lambda);
        for k in 0..=2 {
            let r = weight_bounds_check(&w, 0.5, k, 81).unwrap();
            assert!(r.inner_bound_holds, "lambda {lambda} k {k}: {r:?}");
            assert!(r.fitted_c.is_finite() && r.fitted_c > 0.0);
        }
    }
    assert!(weight_bounds_check(&weights(1.0), 0.5, 3, 81).is_err());
}

#[test]
fn carleman_weight_rejects_bad_window() {
    let t = Arc::new(SigmaTable::new(64).unwrap());
    assert!(CarlemanWeights::new(0.5, vec![0.0], 0.2, 0.3, 1.0, t.clone()).is_err());
    assert!(CarlemanWeights::new(0.5, vec![0.0], 0.0, 0.3, 1.0, t).is_err());
}

proptest! {
    #[test]
    fn table_agrees_with_quadrature(u in 2e-3f64..=1.0) {
        let t = SigmaTable::new(256).unwrap();
        let s = (-1.0 / u).exp().min(S_MAX);
        let v = t.sigma(s).unwrap();
        prop_assert!((v / sigma(s).unwrap() - 1.0).abs() < 1e-11);
        prop_assert!(v <= s && v >= s * (-t.c0).exp() * (1.0 - 1e-13));
    }

    #[test]
    fn psi2_is_a_monotone_step(d1 in -5.0f64..5.0, w in 0.01f64..5.0, a in -6.0f64..11.0, b in -6.0f64..11.0) {
        let m = Mollifier::new(d1, d1 + w).unwrap();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (pl, ph) = (m.psi2(lo), m.psi2(hi));
        prop_assert!((0.0..=1.0).contains(&pl.value) && (0.0..=1.0).contains(&ph.value));
        prop_assert!(ph.value <= pl.value + 1e-12);
        prop_assert!(pl.first <= 1e-12);
    }

    #[test]
    fn level_sets_nest(x in -0.5f64..1.1, tf in 0.0f64..1.0, r in 0.01f64..0.5) {
        let w = weights(2.0);
        let t = w.t0 - w.b * tf;
        if level_set_membership(t, &[x], r, &w) {
            prop_assert!(level_set_membership(t, &[x], 2.0 * r, &w));
        }
        let c = space_time_cutoff(t, &[x], &w, 2.0 * r).unwrap();
        prop_assert!((0.0..=1.0).contains(&c.value));
        if level_set_membership(t, &[x], r, &w) {
            prop_assert_eq!(c.value, 1.0);
        }
        if !level_set_membership(t, &[x], 2.0 * r, &w) {
            prop_assert_eq!(c.value, 0.0);
        }
    }
}
