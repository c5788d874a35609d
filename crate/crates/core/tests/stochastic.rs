use movbound::stochastic::*;
use proptest::prelude::*;

#[test]
fn ensembles_are_reproducible_and_prefix_stable() {
    let times = uniform_times(1.0, 64);
    let (a, b) = (generate_paths(42, 16, &times).unwrap(), generate_paths(42, 16, &times).unwrap());
    assert_eq!(a.paths, b.paths);
    let big = generate_paths(42, 64, &times).unwrap();
    assert_eq!(&big.paths[..16], &a.paths[..]);
    let other = generate_paths(43, 16, &times).unwrap();
    assert_ne!(other.paths[0].increments, a.paths[0].increments);
    assert_eq!(a.key(), b.key());
    assert_ne!(a.key(), big.key());
}

#[test]
fn increments_are_scaled_counter_draws() {
    let times = vec![0.0, 0.1, 0.35, 1.0];
    let p = BrownianPath::generate(9, 5, std::sync::Arc::new(times.clone()));
    for k in 0..3 {
        let z = normal(9, 5, k as u64);
        assert_eq!(p.increments[k], (times[k + 1] - times[k]).sqrt() * z);
    }
    assert_eq!(p.values()[3], p.terminal());
}

#[test]
fn ito_isometry_deterministic_and_adapted() {
    let e = generate_paths(1, 100_000, &uniform_times(1.0, 32)).unwrap();
    let det = ito_isometry_check(&e, &|k, _| 1.0 + 0.1 * k as f64);
    assert!(det.within_3sigma, "{det:?}");
    let adapted = ito_isometry_check(&e, &|_, w| w);
    assert!(adapted.within_3sigma, "{adapted:?}");
    // E Σ W(t_k)² Δt = Σ t_k Δt = (1 − 1/M)/2.
    assert!((adapted.rhs - 0.5 * (1.0 - 1.0 / 32.0)).abs() < 0.01);
}

#[test]
fn terminal_law_is_normal() {
    let e = generate_paths(3, 20_000, &uniform_times(2.0, 16)).unwrap();
    let (mean, var) = e.terminal_moments();
    let se = (2.0f64 / 20_000.0).sqrt();
    assert!(mean.abs() < 4.0 * se, "{mean}");
    assert!((var - 2.0).abs() < 4.0 * 2.0 * (2.0f64 / 20_000.0).sqrt(), "{var}");
    let z: Vec<f64> = e.paths.iter().map(|p| p.terminal() / 2f64.sqrt()).collect();
    assert!(ks_standard_normal(&z).p_value > 1e-3);
}

#[test]
fn binary_dump_roundtrip() {
    let e = generate_paths(8, 5, &uniform_times(0.5, 7)).unwrap();
    let mut buf = Vec::new();
    e.write_binary(&mut buf).unwrap();
    let d = read_binary(buf.as_slice()).unwrap();
    assert_eq!(d.times, *e.times);
    for (row, p) in d.increments.iter().zip(&e.paths) {
        assert_eq!(row, &p.increments);
    }
    assert!(read_binary(&b"NOTAPATH........"[..]).is_err());
}

proptest! {
    #[test]
    fn seek_regenerates_any_draw(seed in any::<u64>(), path in 0u64..1000, step in 0u64..500) {
        let mut s = PathStream::new(seed, path);
        for _ in 0..step {
            s.next_normal();
        }
        prop_assert_eq!(s.next_normal().to_bits(), normal(seed, path, step).to_bits());
    }
}
