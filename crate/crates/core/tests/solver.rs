use std::f64::consts::PI;

use movbound::geometry::{MovingDomain, TimeProfile};
use movbound::solver::*;
use movbound::stochastic::{generate_paths, uniform_times};

fn eigenmode(noise: f64, paths: usize, spec: GridSpec) -> EnsembleField {
    let d = MovingDomain::static_interval(1.0, 0.1).unwrap();
    let c = SPDECoefficients::heat(1, noise, 0.0, InitialDatum::SineMode { amp: 1.0, mode: 1 });
    let e = generate_paths(2, paths, &uniform_times(0.1, spec.steps)).unwrap();
    solve(&d, &c, &e, &spec).unwrap()
}

#[test]
fn deterministic_eigenmode_decay_at_default_grid() {
    let f = eigenmode(0.0, 1, GridSpec::default());
    let mut worst: f64 = 0.0;
    for s in 0..f.slices.len() {
        let t = f.slices[s].time;
        let v = f.path_values(s, 0);
        for i in 0..f.nodes() {
            let y = f.grid.point(i)[0];
            worst = worst.max((v[i] - (-PI * PI * t).exp() * (PI * y).sin()).abs() / (-PI * PI * t).exp());
        }
    }
    assert!(worst < 1e-3, "relative sup error {worst}");
}

#[test]
fn eigenmode_moments_under_multiplicative_noise() {
    // u = sin(πx)·exp(−π²t + cW − c²t/2): Eu decays as the heat mode,
    // Eu² as exp((c² − 2π²)t).
    let c = 0.5;
    let f = eigenmode(c, 4000, GridSpec { stride: 512, ..GridSpec::default() });
    let s = f.slices.len() - 1;
    let t = f.slices[s].time;
    let mid = f.nodes() / 2;
    assert!((f.grid.point(mid)[0] - 0.5).abs() < 1e-12);
    let vals: Vec<f64> = (0..f.stored_paths()).map(|p| f.path_values(s, p)[mid]).collect();
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    let sd = (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    assert!((mean - (-PI * PI * t).exp()).abs() < 4.0 * sd / n.sqrt() + 1e-3, "mean {mean}");
    let m2 = f.second_moment(s)[mid];
    let exact = ((c * c - 2.0 * PI * PI) * t).exp();
    assert!((m2 / exact - 1.0).abs() < 0.03, "{m2} vs {exact}");
}

#[test]
fn zero_data_stay_exactly_zero() {
    let d = MovingDomain::moving_interval(1.0, TimeProfile::Sine { amp: 0.2, freq: 1.0 }, 1.0).unwrap();
    let c = SPDECoefficients::heat(1, 0.9, 0.0, InitialDatum::Zero);
    let e = generate_paths(4, 8, &uniform_times(1.0, 256)).unwrap();
    let f = solve(&d, &c, &e, &GridSpec { stride: 16, ..GridSpec::new(64, 256) }).unwrap();
    for s in 0..f.slices.len() {
        for p in 0..f.stored_paths() {
            assert!(f.path_values(s, p).iter().all(|v| v.to_bits() == 0));
        }
    }
}

#[test]
fn coupled_solves_are_bitwise_equal() {
    let d = MovingDomain::moving_interval(1.0, TimeProfile::Linear { rate: 0.3 }, 1.0).unwrap();
    let c = SPDECoefficients::heat(1, 0.5, 1.0, InitialDatum::Linear { amp: 1.0 });
    let e = generate_paths(4, 8, &uniform_times(1.0, 128)).unwrap();
    let spec = GridSpec { stride: 8, ..GridSpec::new(32, 128) };
    let (a, b) = (solve(&d, &c, &e, &spec).unwrap(), solve(&d, &c, &e, &spec).unwrap());
    for s in 0..a.slices.len() {
        for p in 0..8 {
            assert_eq!(a.path_values(s, p), b.path_values(s, p));
        }
    }
}

/// sup |K_t + ΔK| over (t0 − t) ∈ [0.01, 0.2] and |x − y| ≤ 0.3 at step h.
fn kernel_residual(h: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..=20 {
        let tau = 0.01 + 0.19 * i as f64 / 20.0;
        for j in 0..=12 {
            let x = [0.3 * j as f64 / 12.0, 0.1];
            let r = heat_kernel_residual(1.0 - tau, &x, 1.0, &[0.0, 0.0], h, 0.1 * h).unwrap();
            worst = worst.max(r.abs() * tau.powi(2));
        }
    }
    worst
}

#[test]
fn heat_kernel_residual_second_order() {
    let hs = [4e-3, 2e-3, 1e-3];
    let r: Vec<f64> = hs.iter().map(|&h| kernel_residual(h)).collect();
    for w in r.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order >= 1.9, "observed order {order} from {r:?}");
    }
}

#[test]
fn caccioppoli_constant_is_finite() {
    let d = MovingDomain::static_interval(1.0, 0.4).unwrap();
    let c = SPDECoefficients::heat(1, 0.5, 1.0, InitialDatum::Linear { amp: 1.0 });
    let e = generate_paths(6, 32, &uniform_times(0.4, 256)).unwrap();
    let f = solve(&d, &c, &e, &GridSpec { stride: 4, ..GridSpec::new(128, 256) }).unwrap();
    let cy = CaccioppoliCylinders { t0: 0.4, x0: vec![0.5], r: 0.3, rho1: 0.1, rho2: 0.3 };
    let rep = caccioppoli_check(&f, &cy).unwrap();
    assert!(rep.mass.value > 0.0 && rep.gradient_energy.value > 0.0);
    assert!(rep.constant.is_finite() && rep.constant > 0.0);
    assert!(caccioppoli_check(&f, &CaccioppoliCylinders { rho1: 0.3, rho2: 0.1, ..cy }).is_err());
}
