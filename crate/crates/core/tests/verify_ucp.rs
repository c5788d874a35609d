use std::f64::consts::PI;

use movbound::geometry::{GeometryParams, MovingDomain};
use movbound::solver::{solve, GridSpec, InitialDatum, SPDECoefficients};
use movbound::stochastic::{generate_paths, uniform_times};
use movbound::verify::*;
use proptest::prelude::*;

fn heat_field(cells: usize, steps: usize, paths: usize, noise: f64, boundary: f64, u0: InitialDatum) -> movbound::solver::EnsembleField {
    let d = MovingDomain::static_interval(1.0, 0.4).unwrap();
    let c = SPDECoefficients::heat(1, noise, boundary, u0);
    let ens = generate_paths(5, paths, &uniform_times(0.4, steps)).unwrap();
    solve(&d, &c, &ens, &GridSpec { stride: steps / 128, ..GridSpec::new(cells, steps) }).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn closed_form_dominates_recursion(
        x1 in 1e-6f64..1e3,
        c1 in 1.0001f64..50.0,
        s in 0.01f64..0.99,
        n in 1u32..40,
    ) {
        let st = IterationState { x1, c1, s, n };
        prop_assert!(iteration_exponents(&st).unwrap().dominates());
        let b = geometric_iteration_bound(&st).unwrap();
        let r = unrolled_recursion(&st).unwrap();
        prop_assert!(r <= b * (1.0 + 1e-9), "recursion {r} above bound {b}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn cone_chain_nests_and_brackets(
        rho0 in 0.05f64..1.0,
        alpha in (PI / 12.0)..(PI / 4.0),
        e in 1.0f64..2.0,
        eta1 in 0.1f64..0.36,
        u in 0.1f64..3.0,
        theta in 0.0f64..(2.0 * PI),
    ) {
        let g = GeometryParams { r0: 0.5, e, rho0, alpha, d0: 1.0, eta1 };
        let sin = alpha.sin();
        let mu1 = rho0 / (1.0 + sin);
        let gap = mu1 * (1.0 - eta1 * sin / (4.0 * e));
        let c = cone_chain_build(&[0.0, 0.0], &[theta.cos(), theta.sin()], &g, gap * 10f64.powf(-u)).unwrap();
        prop_assert!(c.nesting_ok, "nesting fails at link {:?}", c.nesting_failure);
        prop_assert!(c.bracket_ok);
        prop_assert!(c.ratio_exact);
        prop_assert_eq!(c.mu.len(), c.k_bar + 1);
    }
}

#[test]
fn cone_chain_rejects_bad_sigma() {
    let g = GeometryParams { r0: 0.5, e: 1.0, rho0: 0.2, alpha: PI / 6.0, d0: 1.0, eta1: 0.3 };
    assert!(cone_chain_build(&[0.0], &[1.0], &g, 0.0).is_err());
    assert!(cone_chain_build(&[0.0], &[1.0], &g, 1.0).is_err());
    assert!(cone_chain_build(&[0.0], &[0.0], &g, 1e-3).is_err());
}

#[test]
fn sucp_order_tracks_vanishing() {
    let radii: Vec<f64> = (0..6).map(|k| 0.2 * 0.7f64.powi(k)).collect();
    let nonzero = heat_field(512, 1024, 1, 0.0, 1.0, InitialDatum::Linear { amp: 1.0 });
    let r = sucp_probe(&nonzero, 0.4, &[0.5], &radii).unwrap();
    assert!((r.slope - 1.0).abs() < 0.05, "slope {}", r.slope);
    assert!(r.bounded);
    let node = heat_field(512, 1024, 1, 0.0, 0.0, InitialDatum::SineMode { amp: 1.0, mode: 2 });
    let r = sucp_probe(&node, 0.4, &[0.5], &radii).unwrap();
    let exact: Vec<(f64, f64)> = radii.iter().map(|&r| (r.ln(), (r - (4.0 * PI * r).sin() / (4.0 * PI)).ln())).collect();
    let (mx, my) = (exact.iter().map(|p| p.0).sum::<f64>() / 6.0, exact.iter().map(|p| p.1).sum::<f64>() / 6.0);
    let oracle = exact.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / exact.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!(oracle > 2.7 && oracle < 3.0);
    assert!((r.slope - oracle).abs() < 0.02, "slope {} oracle {oracle}", r.slope);
    let zero = heat_field(64, 128, 1, 0.0, 0.0, InitialDatum::Zero);
    let r = sucp_probe(&zero, 0.4, &[0.5], &radii).unwrap();
    assert!(r.inconclusive && !r.bounded);
    assert!(sucp_probe(&zero, 0.4, &[0.5], &[0.1, 0.2]).is_err());
    assert!(sucp_probe(&zero, 0.4, &[0.9], &[0.2, 0.1]).is_err());
}

#[test]
fn propagation_bound_covers_boundary_value() {
    let u = heat_field(256, 512, 64, 0.5, 1.0, InitialDatum::Linear { amp: 1.0 });
    let g = GeometryParams { r0: 0.5, e: 1.0, rho0: 0.2, alpha: PI / 6.0, d0: 1.0, eta1: 0.3 };
    let mut chain = cone_chain_build(&[1.0], &[-1.0], &g, 1e-3).unwrap();
    let rep = small_propagation_check(Propagated::Single(&u), &mut chain, std::f64::consts::E, 0.4, 0.5).unwrap();
    assert!(rep.sigma_local > 0.0 && rep.sigma_local < 1.0);
    assert_eq!(chain.sigma_local, Some(rep.sigma_local));
    assert!(rep.consistent, "{rep:?}");
    let other = heat_field(256, 512, 64, 0.5, 1.0, InitialDatum::Linear { amp: 1.0 });
    let rep = small_propagation_check(Propagated::Difference(&u, &other), &mut chain, std::f64::consts::E, 0.4, 0.5).unwrap();
    assert_eq!(rep.sigma_local, 0.0);
    assert!(rep.consistent);
}

#[test]
fn two_sphere_fit_validates_on_holdout() {
    let f = heat_field(128, 512, 100, 0.5, 1.0, InitialDatum::Linear { amp: 1.0 });
    let (mut train, mut hold) = (vec![], vec![]);
    for (i, big_r) in [0.3, 0.35, 0.4].iter().enumerate() {
        for (j, fr) in [0.15, 0.25, 0.35].iter().enumerate() {
            for (k, fr2) in [0.1, 0.4, 1.0].iter().enumerate() {
                let rho = fr * big_r;
                let p = TwoSphereParams { variant: TwoSphereVariant::Interior, t0: 0.4, x0: vec![0.5], r: fr2 * rho, rho, big_r: *big_r };
                let rep = two_sphere_report(&f, &p, 0.36, 0.5).unwrap();
                if (i + j + k) % 2 == 0 {
                    train.push(rep)
                } else {
                    hold.push(rep)
                }
            }
        }
    }
    let fit = two_sphere_fit(&train).unwrap();
    assert!(fit.c_mult > 0.0 && fit.c_exp > 0.0);
    let v = two_sphere_validate(&fit, &hold, 3.0);
    assert_eq!(v.checked, hold.len());
    assert!(v.violations.is_empty(), "{:?}", v.violations);
}
