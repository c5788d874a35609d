//! Propagation of interior smallness to a boundary point along a cone chain.

use serde::Serialize;

use super::cone::ConeChain;
use super::iteration::{geometric_iteration_bound, IterationState};
use crate::error::{invalid, Error, Result};
use crate::functionals::{physical_spacing, Estimate, Region, SliceQuadrature};
use crate::solver::EnsembleField;

/// The field whose smallness propagates: u, or the coupled difference u1 − u2.
#[derive(Clone, Copy)]
pub enum Propagated<'a> {
    Single(&'a EnsembleField),
    Difference(&'a EnsembleField, &'a EnsembleField),
}

impl<'a> Propagated<'a> {
    fn first(&self) -> &'a EnsembleField {
        match self {
            Propagated::Single(u) | Propagated::Difference(u, _) => u,
        }
    }

    fn paths(&self) -> usize {
        match self {
            Propagated::Single(u) => u.stored_paths(),
            Propagated::Difference(a, b) => a.stored_paths().max(b.stored_paths()),
        }
    }

    fn check(&self) -> Result<()> {
        if let Propagated::Difference(a, b) = self {
            if a.key != b.key || a.slice_times() != b.slice_times() {
                return invalid("difference needs coupled fields with equal stored slices");
            }
        }
        Ok(())
    }

    /// E∫_{B_r(c) ∩ G(t0)} w(t0)².
    fn ball_mass(&self, t0: f64, c: &[f64], r: f64) -> Result<Estimate> {
        let u = self.first();
        let s = u.slice_at(t0)?;
        let region = Region::ball(c, r);
        let samples: Vec<f64> = match self {
            Propagated::Single(u) => {
                let q = SliceQuadrature::new(u, s, &region)?;
                (0..self.paths()).map(|p| q.mass(u, p)).collect()
            }
            Propagated::Difference(a, b) => {
                let h = physical_spacing(a, t0).min(physical_spacing(b, t0));
                let (qa, qb) = (SliceQuadrature::with_spacing(a, s, &region, h)?, SliceQuadrature::with_spacing(b, s, &region, h)?);
                if qa.nodes.len() != qb.nodes.len() {
                    return Err(Error::OutOfDomain(format!("B_{r}({c:?}) is not common to both domains")));
                }
                (0..self.paths())
                    .map(|p| {
                        let (va, vb) = (qa.values(a, p), qb.values(b, p));
                        qa.nodes.iter().zip(va.iter().zip(&vb)).map(|(n, (x, y))| n.weight * (x - y) * (x - y)).sum()
                    })
                    .collect()
            }
        };
        Ok(Estimate::from_samples(&samples))
    }

    /// E|w(t0, x)|².
    fn point_second_moment(&self, t0: f64, x: &[f64]) -> Result<Estimate> {
        let u = self.first();
        let s = u.slice_at(t0)?;
        let probe = |f: &EnsembleField| f.probe(s, x)?.ok_or_else(|| Error::OutOfDomain(format!("{x:?} outside G({t0})")));
        let samples: Vec<f64> = match self {
            Propagated::Single(u) => {
                let pr = probe(u)?;
                (0..self.paths()).map(|p| pr.value(u.path_values(s, p)).powi(2)).collect()
            }
            Propagated::Difference(a, b) => {
                let (pa, pb) = (probe(a)?, probe(b)?);
                (0..self.paths()).map(|p| (pa.value(a.path_values(s, p)) - pb.value(b.path_values(s, p))).powi(2)).collect()
            }
        };
        Ok(Estimate::from_samples(&samples))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PropagationReport {
    pub t0: f64,
    pub kappa0: f64,
    /// σ = E∫_{B_{ρ1}(w1)} w(t0)².
    pub sigma_local: f64,
    pub k_bar: usize,
    /// E∫_{B_{ρk}(w_k)} w(t0)², k = 1..k̄.
    pub masses: Vec<f64>,
    /// Exponent s of the empirical link inequality m_{k+1} ≤ C1 m_k^s.
    pub s: f64,
    /// Smallest C1 > 1 satisfying every link.
    pub link_constant: f64,
    /// C1^{1/(1−s)} σ^{s^{k̄−1}}.
    pub chain_mass_bound: f64,
    /// 2·chain_mass_bound/|B_{ρk̄}| + 2κ0²(μ_k̄ + ρ_k̄)².
    pub chain_bound: f64,
    /// E|w(t0, x0)|².
    pub measured: Estimate,
    /// Smallest C ≥ 1 with measured ≤ C κ0^C |ln σ|^{−α/C}.
    pub law_constant: f64,
    /// |ln σ| ≤ 1: the logarithmic law carries no information.
    pub non_informative: bool,
    /// measured ≤ chain_bound + 3·stderr.
    pub consistent: bool,
}

fn ball_volume(dim: usize, r: f64) -> f64 {
    match dim {
        1 => 2.0 * r,
        _ => std::f64::consts::PI * r * r,
    }
}

/// C κ0^C |ln σ|^{−α/C}.
pub fn propagation_law(c: f64, kappa0: f64, sigma: f64, alpha: f64) -> f64 {
    c * kappa0.powf(c) * sigma.ln().abs().powf(-alpha / c)
}

/// Smallest C ≥ 1 with value ≤ C κ0^C |ln σ|^{−α/C}; the right side is
/// increasing in C when κ0 ≥ e.
pub fn propagation_law_constant(value: f64, kappa0: f64, sigma: f64, alpha: f64) -> f64 {
    let f = |c: f64| propagation_law(c, kappa0, sigma, alpha) - value;
    if f(1.0) >= 0.0 {
        return 1.0;
    }
    let mut hi = 2.0;
    while f(hi) < 0.0 && hi < 1e6 {
        hi *= 2.0;
    }
    let mut lo = hi / 2.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Measures the chain masses, fits the link constant at exponent s,
/// applies the closed-form iteration bound and the κ0-Lipschitz surface
/// terms, and compares with the measured E|w(t0, x0)|².
pub fn small_propagation_check(w: Propagated<'_>, chain: &mut ConeChain, kappa0: f64, t0: f64, s: f64) -> Result<PropagationReport> {
    w.check()?;
    if !(kappa0 >= std::f64::consts::E) {
        return invalid(format!("kappa0 = {kappa0} must be >= e"));
    }
    if !(s > 0.0 && s < 1.0) {
        return invalid(format!("link exponent s = {s} must lie in (0, 1)"));
    }
    let u = w.first();
    for k in 1..=chain.k_bar {
        let (c, r) = chain.ball(k);
        for p in Region::ball(c, r).outline() {
            if !u.domain.contains(t0, &p) {
                return Err(Error::OutOfDomain(format!("chain ball {k} leaves G({t0}) at {p:?}")));
            }
        }
    }
    let masses: Vec<f64> = (1..=chain.k_bar)
        .map(|k| {
            let (c, r) = chain.ball(k);
            w.ball_mass(t0, c, r).map(|e| e.value)
        })
        .collect::<Result<_>>()?;
    let sigma = masses[0];
    chain.sigma_local = Some(sigma);
    if sigma >= 1.0 {
        return Err(Error::Precondition(format!("sigma_local = {sigma} must lie in (0, 1)")));
    }
    let measured = w.point_second_moment(t0, &chain.x0)?;
    let kb = chain.k_bar - 1;
    let alpha = chain.params.alpha;
    if sigma <= 0.0 {
        let consistent = measured.value <= 3.0 * measured.stderr;
        return Ok(PropagationReport {
            t0,
            kappa0,
            sigma_local: 0.0,
            k_bar: chain.k_bar,
            masses,
            s,
            link_constant: 1.0,
            chain_mass_bound: 0.0,
            chain_bound: 2.0 * kappa0 * kappa0 * (chain.mu[kb] + chain.rho[kb]).powi(2),
            measured,
            law_constant: 1.0,
            non_informative: false,
            consistent,
        });
    }
    let link = masses
        .windows(2)
        .map(|m| if m[0] > 0.0 { m[1] / m[0].powf(s) } else if m[1] > 0.0 { f64::INFINITY } else { 0.0 })
        .fold(1.0 + 1e-12, f64::max);
    if !link.is_finite() {
        return Err(Error::Numerical("chain mass vanishes and reappears; link constant is infinite".into()));
    }
    let chain_mass_bound =
        geometric_iteration_bound(&IterationState { x1: sigma, c1: link, s, n: chain.k_bar as u32 })?;
    let d = u.domain.dim();
    let chain_bound = 2.0 * chain_mass_bound / ball_volume(d, chain.rho[kb])
        + 2.0 * kappa0 * kappa0 * (chain.mu[kb] + chain.rho[kb]).powi(2);
    let non_informative = sigma.ln().abs() <= 1.0;
    let law_constant = if non_informative { f64::NAN } else { propagation_law_constant(measured.value, kappa0, sigma, alpha) };
    Ok(PropagationReport {
        t0,
        kappa0,
        sigma_local: sigma,
        k_bar: chain.k_bar,
        masses,
        s,
        link_constant: link,
        chain_mass_bound,
        chain_bound,
        consistent: measured.value <= chain_bound + 3.0 * measured.stderr,
        measured,
        law_constant,
        non_informative,
    })
}

/// One C covering every informative report of a σ sweep.
pub fn fit_propagation_law(reports: &[PropagationReport]) -> Result<f64> {
    let cs: Vec<f64> = reports.iter().filter(|r| !r.non_informative && r.sigma_local > 0.0).map(|r| r.law_constant).collect();
    if cs.is_empty() {
        return Err(Error::InsufficientData("no informative propagation report".into()));
    }
    Ok(cs.into_iter().fold(1.0, f64::max))
}
