use movbound::functionals::{ObservationWindow, Region};
use movbound::geometry::{MovingDomain, TimeProfile};
use movbound::inverse::*;
use movbound::solver::{GridSpec, InitialDatum, SPDECoefficients};
use movbound::stochastic::{generate_paths, uniform_times, Ensemble};
use movbound::Error;
use proptest::prelude::*;

const CELLS: usize = 128;
const STEPS: usize = 512;

struct Setup {
    coeffs: SPDECoefficients,
    ensemble: Ensemble,
    spec: GridSpec,
    window: ObservationWindow,
}

impl Setup {
    fn new(paths: usize, boundary: f64) -> Self {
        Setup {
            coeffs: SPDECoefficients::heat(1, 0.5, boundary, InitialDatum::Linear { amp: boundary }),
            ensemble: generate_paths(11, paths, &uniform_times(1.0, STEPS)).unwrap(),
            spec: GridSpec { stride: 16, ..GridSpec::new(CELLS, STEPS) },
            window: ObservationWindow { region: Region::ball(&[0.3], 0.15), t_lo: 0.0, t_hi: 1.0 },
        }
    }

    fn model(&self) -> ForwardModel<'_> {
        ForwardModel { coeffs: &self.coeffs, ensemble: &self.ensemble, spec: &self.spec, window: &self.window }
    }
}

fn endpoint(rate: f64) -> MovingDomain {
    MovingDomain::moving_interval(1.0, TimeProfile::Linear { rate }, 1.0).unwrap()
}

#[test]
fn identical_domains_have_zero_gap_bitwise() {
    let s = Setup::new(40, 1.0);
    let r = uniqueness_probe(&endpoint(0.2), &endpoint(0.2), &s.model(), 1.0, 1e-3).unwrap();
    assert_eq!(r.gap.value.to_bits(), 0f64.to_bits());
    assert_eq!(r.d, 0.0);
    assert!(!r.separated);
}

#[test]
fn gap_separates_and_grows_with_perturbation() {
    let s = Setup::new(100, 1.0);
    let mut last = 0.0;
    for k in [2.0, 4.0, 8.0] {
        let cand = endpoint(0.2 + k / CELLS as f64);
        let r = uniqueness_probe(&endpoint(0.2), &cand, &s.model(), 1.0, 1e-3).unwrap();
        assert!(r.separated, "k = {k}: gap {} floor {}", r.gap.value, r.noise_floor);
        assert!(r.gap.value > last);
        assert!((r.d - k / CELLS as f64).abs() < 2e-3, "d = {}", r.d);
        last = r.gap.value;
    }
}

#[test]
fn differing_initial_domains_rejected() {
    let s = Setup::new(8, 1.0);
    let other = MovingDomain::moving_interval(1.1, TimeProfile::Linear { rate: 0.2 }, 1.0).unwrap();
    let e = uniqueness_probe(&endpoint(0.2), &other, &s.model(), 1.0, 1e-3).unwrap_err();
    assert!(matches!(e, Error::Precondition(_)), "{e}");
}

#[test]
fn vanishing_boundary_datum_rejected() {
    let s = Setup::new(8, 0.0);
    let e = uniqueness_probe(&endpoint(0.2), &endpoint(0.25), &s.model(), 1.0, 1e-3).unwrap_err();
    assert!(matches!(e, Error::Precondition(_)), "{e}");
}

fn family(truth: f64) -> BoundaryParametrization {
    BoundaryParametrization::new(BoundaryBasis::EndpointPolynomial { length: 1.0 }, vec![truth], vec![0.125], vec![0.375]).unwrap()
}

#[test]
fn in_grid_truth_recovered_exactly() {
    let s = Setup::new(40, 1.0);
    let truth = family(0.21875);
    let obs = s.model().solve(&truth.domain(1.0).unwrap()).unwrap();
    let start = family(0.375);
    let r = reconstruct_boundary(&obs, &s.model(), &start, &SearchConfig::default()).unwrap();
    assert_eq!(r.params.coeffs, vec![0.21875]);
    assert_eq!(r.misfit, 0.0);
    assert!(!r.at_bound);
}

#[test]
fn out_of_box_truth_flags_the_boundary() {
    let s = Setup::new(20, 1.0);
    let obs = s.model().solve(&endpoint(0.45)).unwrap();
    let search = SearchConfig { max_sweeps: 4, ..SearchConfig::default() };
    let r = reconstruct_boundary(&obs, &s.model(), &family(0.2), &search).unwrap();
    assert_eq!(r.params.coeffs, vec![0.375]);
    assert!(r.at_bound && r.misfit > 0.0);
}

#[test]
fn stability_sweep_records_and_fit() {
    let s = Setup::new(60, 1.0);
    let fam: Vec<(f64, MovingDomain)> = [0.01, 0.02, 0.04, 0.08, 0.16, 0.32].iter().map(|&h| (h, endpoint(0.2 + h))).collect();
    let sw = stability_sweep(&endpoint(0.2), &fam, &s.model(), &[1.0, 0.5], 1e-3).unwrap();
    assert_eq!(sw.records.len(), 12);
    for r in &sw.records {
        r.validate().unwrap();
        assert!(r.gamma >= 1.0 + std::f64::consts::E);
    }
    for (_, f) in &sw.fits {
        assert!(f.q_positive, "{f:?}");
    }
    let csv = records_csv(&sw.records).unwrap();
    assert_eq!(csv.lines().count(), 13);
    assert!(csv.starts_with("amplitude,t0,eps_tilde"));
    assert_eq!(plot_pairs_csv(&sw.records).lines().count(), 13);
}

#[test]
fn stability_sweep_needs_five_members() {
    let s = Setup::new(4, 1.0);
    let fam: Vec<(f64, MovingDomain)> = [0.01, 0.02].iter().map(|&h| (h, endpoint(0.2 + h))).collect();
    let e = stability_sweep(&endpoint(0.2), &fam, &s.model(), &[1.0], 1e-3).unwrap_err();
    assert!(matches!(e, Error::InsufficientData(_)));
}

#[test]
fn domain_difference_energies() {
    let s = Setup::new(40, 1.0);
    let m = s.model();
    let u0 = m.solve(&endpoint(0.2)).unwrap();
    let same = domain_difference_energy(&u0, &u0, 0.0, 1.0, (&[0.5], 0.2)).unwrap();
    assert!(same.empty && same.energy() == 0.0);
    assert!(same.lower_1.value > 0.0);
    let mut reports = Vec::new();
    for h in [0.02, 0.05, 0.1, 0.2, 0.4] {
        let u = m.solve(&endpoint(0.2 + h)).unwrap();
        let eps = movbound::functionals::observation_gap(&u0, &u, &s.window).unwrap().value;
        let r = domain_difference_energy(&u0, &u, eps, 1.0, (&[0.5], 0.2)).unwrap();
        assert!(!r.empty && r.energy() > 0.0);
        assert!(r.lower_1.value > 0.0 && r.lower_2.value > 0.0);
        assert_eq!(r.energy_1.value, 0.0);
        reports.push(r);
    }
    let fit = fit_difference_laws(&mut reports, s.coeffs.kappa0, 1).unwrap();
    assert!(fit.monotone);
    for r in &reports {
        assert!(r.energy() <= r.bound_loglog.unwrap() * (1.0 + 1e-12));
        assert!(r.energy() <= r.bound_log.unwrap() * (1.0 + 1e-12));
    }
}

fn rec(eps: f64, d: f64) -> StabilityRecord {
    StabilityRecord { amplitude: d, t0: 1.0, eps_tilde: eps, eps_stderr: 0.0, d, d_m: d, gamma: gamma(1.0, 3.0, 1), excluded: false }
}

proptest! {
    #[test]
    fn gamma_floor(t in 0.01f64..=1.0, k in 2.72f64..50.0, n in 1usize..4) {
        prop_assert!(gamma(t, k, n) >= 1.0 + std::f64::consts::E - 1e-12);
    }

    #[test]
    fn rescaling_d_moves_a_not_q(
        pts in proptest::collection::vec((1e-12f64..0.3, 1e-3f64..1.0), 6..20),
        c in 0.01f64..100.0,
    ) {
        let base: Vec<_> = pts.iter().map(|&(e, d)| rec(e, d)).collect();
        let scaled: Vec<_> = pts.iter().map(|&(e, d)| rec(e, c * d)).collect();
        if let (Ok(f1), Ok(f2)) = (fit_stability(&base), fit_stability(&scaled)) {
            prop_assert!((f1.q - f2.q).abs() <= 1e-8 * (1.0 + f1.q.abs()));
            prop_assert!((f2.a / f1.a - c).abs() <= 1e-8 * c);
        }
    }
}

#[test]
fn rescaling_eps_changes_q() {
    let rs: Vec<_> = [1e-8, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2].iter().map(|&e: &f64| rec(e, 2.0 * e.ln().abs().powf(-0.5))).collect();
    let scaled: Vec<_> = rs.iter().map(|r| rec(r.eps_tilde * 10.0, r.d)).collect();
    let (f1, f2) = (fit_stability(&rs).unwrap(), fit_stability(&scaled).unwrap());
    assert!((f1.q - 0.5).abs() < 1e-12);
    assert!((f2.q - f1.q).abs() > 1e-3);
}
