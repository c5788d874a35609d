//! Mass of each solution on the part of its domain the other one misses.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::functionals::{ball_mass, Estimate, Region, SliceQuadrature};
use crate::solver::EnsembleField;

#[derive(Debug, Clone, Serialize)]
pub struct DomainDifferenceReport {
    pub eps_tilde: f64,
    /// sup_t E∫_{G1(t)\𝒢(t)} u1², 𝒢 = G1 ∩ G2, with the maximizing time.
    pub energy_1: Estimate,
    pub time_1: f64,
    pub energy_2: Estimate,
    pub time_2: f64,
    /// E∫_{B_ρ̄(z)} u_i(t0)² on a ball inside 𝒢(t0).
    pub lower_1: Estimate,
    pub lower_2: Estimate,
    /// Both difference sets are empty at every stored slice.
    pub empty: bool,
    /// κ0^C (ln|ln ε̃|)^{−1/n} at the fitted C.
    pub bound_loglog: Option<f64>,
    /// κ0^C |ln ε̃|^{−1/C} at the fitted C.
    pub bound_log: Option<f64>,
}

impl DomainDifferenceReport {
    pub fn energy(&self) -> f64 {
        self.energy_1.value.max(self.energy_2.value)
    }
}

fn difference_energy(u: &EnsembleField, other: &EnsembleField) -> Result<(Estimate, f64, bool)> {
    let mut best = (Estimate::exact(0.0), 0.0);
    let mut empty = true;
    for s in 0..u.slices.len() {
        let t = u.slices[s].time;
        let q = SliceQuadrature::new(u, s, &Region::Everywhere)?;
        let outside: Vec<usize> = (0..q.nodes.len()).filter(|&k| !other.domain.contains(t, &q.nodes[k].x)).collect();
        if outside.is_empty() {
            continue;
        }
        empty = false;
        let samples: Vec<f64> = (0..u.stored_paths())
            .map(|p| {
                let v = q.values(u, p);
                outside.iter().map(|&k| q.nodes[k].weight * v[k] * v[k]).sum()
            })
            .collect();
        let e = Estimate::from_samples(&samples);
        if e.value > best.0.value {
            best = (e, t);
        }
    }
    Ok((best.0, best.1, empty))
}

/// `lower_ball` = (z, ρ̄) with B_ρ̄(z) ⊂ G1(t0) ∩ G2(t0).
pub fn domain_difference_energy(
    u1: &EnsembleField,
    u2: &EnsembleField,
    eps_tilde: f64,
    t0: f64,
    lower_ball: (&[f64], f64),
) -> Result<DomainDifferenceReport> {
    if u1.key != u2.key {
        return invalid("domain difference needs coupled ensembles");
    }
    let (z, r) = lower_ball;
    for p in Region::ball(z, r).outline() {
        if !(u1.domain.contains(t0, &p) && u2.domain.contains(t0, &p)) {
            return Err(Error::OutOfDomain(format!("lower-bound ball B_{r}({z:?}) leaves the common domain at t0 = {t0}")));
        }
    }
    let (e1, t1, empty1) = difference_energy(u1, u2)?;
    let (e2, t2, empty2) = difference_energy(u2, u1)?;
    Ok(DomainDifferenceReport {
        eps_tilde,
        energy_1: e1,
        time_1: t1,
        energy_2: e2,
        time_2: t2,
        lower_1: ball_mass(u1, t0, z, r)?,
        lower_2: ball_mass(u2, t0, z, r)?,
        empty: empty1 && empty2,
        bound_loglog: None,
        bound_log: None,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DifferenceLawFit {
    pub c_loglog: f64,
    pub c_log: f64,
    pub n_reports: usize,
    /// Energy nondecreasing in ε̃ within 3 standard errors.
    pub monotone: bool,
}

/// Smallest C with every energy ≤ κ0^C (ln|ln ε̃|)^{−1/n} and smallest C > 0
/// with every energy ≤ κ0^C |ln ε̃|^{−1/C}; fills the bounds into the reports.
pub fn fit_difference_laws(reports: &mut [DomainDifferenceReport], kappa0: f64, n: usize) -> Result<DifferenceLawFit> {
    let idx: Vec<usize> = (0..reports.len()).filter(|&k| reports[k].energy() > 0.0).collect();
    if idx.len() < 2 {
        return Err(Error::InsufficientData("need at least two reports with a nonempty difference".into()));
    }
    if idx.iter().any(|&k| !(reports[k].eps_tilde < (-1f64).exp() && reports[k].eps_tilde > 0.0)) {
        return invalid("ln|ln eps_tilde| needs eps_tilde in (0, 1/e)");
    }
    let lk = kappa0.ln();
    let nf = n as f64;
    let c_loglog = idx
        .iter()
        .map(|&k| {
            let r = &reports[k];
            (r.energy() * r.eps_tilde.ln().abs().ln().powf(1.0 / nf)).ln() / lk
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let law = |c: f64, eps: f64| kappa0.powf(c) * eps.ln().abs().powf(-1.0 / c);
    let ok = |c: f64| idx.iter().all(|&k| reports[k].energy() <= law(c, reports[k].eps_tilde));
    let (mut lo, mut hi) = (1e-6, 1.0);
    while !ok(hi) {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::Numerical("no C <= 1e6 satisfies the |ln eps| law".into()));
        }
    }
    if ok(lo) {
        hi = lo;
    }
    for _ in 0..200 {
        if hi - lo <= 1e-12 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let c_log = hi;
    for r in reports.iter_mut() {
        if r.eps_tilde > 0.0 && r.eps_tilde < (-1f64).exp() {
            r.bound_loglog = Some(kappa0.powf(c_loglog) * r.eps_tilde.ln().abs().ln().powf(-1.0 / nf));
            r.bound_log = Some(law(c_log, r.eps_tilde));
        }
    }
    let mut order: Vec<&DomainDifferenceReport> = reports.iter().collect();
    order.sort_by(|a, b| a.eps_tilde.total_cmp(&b.eps_tilde));
    let se = |r: &DomainDifferenceReport| r.energy_1.stderr.max(r.energy_2.stderr);
    let monotone = order.windows(2).all(|w| w[1].energy() >= w[0].energy() - 3.0 * (se(w[0]).powi(2) + se(w[1]).powi(2)).sqrt());
    Ok(DifferenceLawFit { c_loglog, c_log, n_reports: idx.len(), monotone })
}
