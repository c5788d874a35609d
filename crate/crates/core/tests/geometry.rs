use std::f64::consts::PI;

use movbound::geometry::*;
use proptest::prelude::*;

fn interval(lo: f64, hi: f64) -> DomainSnapshot {
    DomainSnapshot::interval(0.0, lo, hi, 1e-3).unwrap()
}

#[test]
fn interval_distances_closed_form() {
    let (a, b) = (interval(0.0, 1.0), interval(0.0, 1.25));
    assert!((hausdorff_distance(&a, &b).unwrap() - 0.25).abs() < 1e-9);
    assert!((modified_distance(&a, &b).unwrap() - 0.25).abs() < 1e-9);
    assert_eq!(hausdorff_distance(&a, &a).unwrap(), 0.0);
}

#[test]
fn concentric_discs() {
    let a = DomainSnapshot::ball(0.0, &[0.0, 0.0], 1.0, 0.02).unwrap();
    let b = DomainSnapshot::ball(0.0, &[0.0, 0.0], 0.5, 0.02).unwrap();
    let (d, dm) = (hausdorff_distance(&a, &b).unwrap(), modified_distance(&a, &b).unwrap());
    assert!(dm <= d);
    assert!((d - 0.5).abs() < 0.03, "{d}");
}

#[test]
fn interior_shrink_of_an_interval() {
    let s = interior_shrink(&interval(0.0, 1.0), 0.2).unwrap();
    let pts = s.all_points();
    let lo = pts.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = pts.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    assert!((lo - 0.2).abs() < 2e-3 && (hi - 0.8).abs() < 2e-3, "{lo} {hi}");
    assert!(interior_shrink(&interval(0.0, 1.0), 0.6).unwrap().interior_count() == 0);
}

#[test]
fn interior_ball_condition() {
    let disc = DomainSnapshot::ball(0.0, &[0.0, 0.0], 1.0, 0.02).unwrap();
    assert!(check_interior_ball(&disc, 0.5).unwrap());
    assert!(!check_interior_ball(&disc, 1.5).unwrap());
    let l = DomainSnapshot::l_shape(0.0, 1.0, 0.02).unwrap();
    assert!(!check_interior_ball(&l, 0.5).unwrap());
}

#[test]
fn lipschitz_cone_membership() {
    let c = lipschitz_cone(&[0.0, 0.0], &[0.0, 1.0], 0.5, PI / 6.0, 0.01).unwrap();
    assert!(c.contains(&[0.0, 0.3]));
    assert!(!c.contains(&[0.3, 0.1]));
    assert!(cone_contains(&[0.0, 0.0], &[0.0, 1.0], 0.5, PI / 6.0, &[0.05, 0.3]));
    assert!(!cone_contains(&[0.0, 0.0], &[0.0, 1.0], 0.5, PI / 6.0, &[0.0, 0.6]));
    let disc = DomainSnapshot::ball(0.0, &[0.0, 0.0], 1.0, 0.02).unwrap();
    assert!(check_lipschitz_class(&disc, 0.3, PI / 6.0).unwrap());
}

#[test]
fn speed_bound_on_growing_and_shrinking_intervals() {
    let grid = SpeedGrid { times: vec![0.25, 0.5], centers: vec![vec![0.5], vec![3.38]], radii: vec![0.05, 0.1], cylinder_steps: 16 };
    let shrink = MovingDomain::moving_interval(4.0, TimeProfile::Linear { rate: -0.5 }, 1.0).unwrap();
    assert!(check_speed_bound(&shrink, 1.0, &grid).unwrap());
    // s(t) = 1 + 5t: B_0.1(3.38) ⊂ G(0.5) but leaves G(0.5 − 0.01).
    let grow = MovingDomain::moving_interval(1.0, TimeProfile::Linear { rate: 5.0 }, 1.0).unwrap();
    let (t0, x0, r, _) = speed_bound_violation(&grow, 1.0, &grid).unwrap().unwrap();
    assert_eq!((t0, x0, r), (0.5, vec![3.38], 0.1));
    assert!(check_speed_bound(&grow, 2.0, &grid).unwrap());
}

#[test]
fn static_unit_ball_passes_geometry_checks() {
    let g = GeometryParams { r0: 0.5, e: 1.0, rho0: 0.3, alpha: PI / 6.0, d0: 1.0, eta1: 0.3 };
    g.validate().unwrap();
    let d = MovingDomain::new(
        ReferenceDomain::Star { center: [0.0, 0.0], radial: RadialProfile::circle(1.0) },
        Motion::Identity,
        1.0,
        FixedBoundary::Arc { lo: 0.0, hi: PI },
        "lower arc",
    )
    .unwrap();
    let snap = d.snapshot(0.5, 0.02).unwrap();
    assert!(check_interior_ball(&snap, g.r0).unwrap());
    assert!(check_lipschitz_class(&snap, g.rho0, g.alpha).unwrap());
}

fn shear() -> MovingDomain {
    MovingDomain::new(
        ReferenceDomain::Star { center: [0.0, 0.0], radial: RadialProfile { mean: 1.0, cos: vec![0.0, 0.1], sin: vec![] } },
        Motion::Shear { eps: 0.2 },
        1.0,
        FixedBoundary::Arc { lo: -1.0, hi: 1.0 },
        "rest",
    )
    .unwrap()
}

proptest! {
    #[test]
    fn hausdorff_is_a_metric_on_intervals(a in 0.1f64..2.0, b in 0.1f64..2.0, c in 0.1f64..2.0) {
        let (x, y, z) = (interval(0.0, a), interval(0.0, b), interval(0.0, c));
        let dxy = hausdorff_distance(&x, &y).unwrap();
        prop_assert_eq!(dxy, hausdorff_distance(&y, &x).unwrap());
        prop_assert!(dxy <= hausdorff_distance(&x, &z).unwrap() + hausdorff_distance(&z, &y).unwrap() + 1e-12);
        prop_assert!(modified_distance(&x, &y).unwrap() <= dxy);
        prop_assert!((dxy - (a - b).abs()).abs() <= 1e-3);
    }

    #[test]
    fn tau_rho_roundtrip(t in 0.0f64..1.0, r in 0.0f64..0.9, phi in 0.0f64..(2.0 * PI), rate in -0.5f64..0.5) {
        let y = [r * phi.cos(), r * phi.sin()];
        for d in [shear(), MovingDomain::new(
            ReferenceDomain::Star { center: [0.0, 0.0], radial: RadialProfile::circle(1.0) },
            Motion::Dilation { rate },
            1.0,
            FixedBoundary::Arc { lo: 0.0, hi: 1.0 },
            "rest",
        ).unwrap()] {
            let x = d.tau(t, &y);
            let back = d.rho(t, &x);
            prop_assert!((back[0] - y[0]).abs() < 1e-9 && (back[1] - y[1]).abs() < 1e-9);
            prop_assert!(d.contains(t, &x));
        }
    }

    #[test]
    fn analytic_jacobians_match_differences(t in 0.05f64..0.95, r in 0.0f64..0.8, phi in 0.0f64..(2.0 * PI)) {
        let d = shear();
        let y = [r * phi.cos(), r * phi.sin()];
        let j = pullback_jacobians(&d, t, &y).unwrap();
        let fd = d.jacobians_fd(t, &d.tau(t, &y), 1e-3);
        for i in 0..2 {
            for k in 0..2 {
                prop_assert!((j.grad[i][k] - fd.grad[i][k]).abs() < 1e-6);
                prop_assert!((j.hessian[i][k] - fd.hessian[i][k]).abs() < 1e-4);
            }
            prop_assert!((j.time[i] - fd.time[i]).abs() < 1e-6);
        }
    }

    #[test]
    fn endpoint_motion_identity_at_zero(rate in -0.5f64..2.0, y in 0.0f64..1.0) {
        let d = MovingDomain::moving_interval(1.0, TimeProfile::Linear { rate }, 1.0).unwrap();
        prop_assert_eq!(d.tau(0.0, &[y]), vec![y]);
        prop_assert!((d.tau(1.0, &[1.0])[0] - (1.0 + rate)).abs() < 1e-12);
    }
}
