//! Chains of balls marching down a Lipschitz cone towards its apex.
//!
//! With z = η1 sinα/(4E): μ1 = ρ0/(1 + sinα), ρ1 = zμ1, a = (1 − z)/(1 + z),
//! μ_k = a^{k−1}μ1, ρ_k = a^{k−1}ρ1, w_k = x0 + μ_kζ. All containment
//! checks run on integers after clearing the denominators of a^{k−1}.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::Serialize;

use super::iteration::exact;
use crate::error::{invalid, Error, Result};
use crate::geometry::GeometryParams;

const MAX_LINKS: usize = 1_000_000;

#[derive(Debug, Clone, Serialize)]
pub struct ConeChain {
    pub x0: Vec<f64>,
    pub zeta: Vec<f64>,
    pub params: GeometryParams,
    pub sigma_tilde: f64,
    /// Contraction ratio a.
    pub cone_ratio: f64,
    /// μ_1, …, μ_{k̄+1}.
    pub mu: Vec<f64>,
    pub w: Vec<Vec<f64>>,
    pub rho: Vec<f64>,
    /// Smallest k with μ_k − ρ_k < σ̃.
    pub k_bar: usize,
    /// (L + 1, L + 2), L = (ln σ̃ − ln(μ1 − ρ1))/ln a.
    pub bracket: (f64, f64),
    /// B_{ρ_{k+1}}(w_{k+1}) ⊂ B_{3ρ_k}(w_k) ⊂ B_{4ρ_k/η1}(w_k) ⊂ B_{4Eρ_k/η1}(w_k) ⊂ cone for k ≤ k̄.
    pub nesting_ok: bool,
    /// First k at which a containment fails.
    pub nesting_failure: Option<usize>,
    /// L + 1 ≤ k̄ ≤ L + 2 in exact arithmetic.
    pub bracket_ok: bool,
    /// ρ_{k+1}/ρ_k = a exactly for k ≤ k̄.
    pub ratio_exact: bool,
    /// E∫_{B_{ρ1}(w1)} u(t0)², once measured.
    pub sigma_local: Option<f64>,
}

impl ConeChain {
    pub fn ball(&self, k: usize) -> (&[f64], f64) {
        (&self.w[k - 1], self.rho[k - 1])
    }
}

/// c·P ≤ d·Q for positive rationals c, d and positive integers P, Q.
fn le(c: &BigRational, p: &BigInt, d: &BigRational, q: &BigInt) -> bool {
    c.numer() * d.denom() * p <= d.numer() * c.denom() * q
}

fn lt(c: &BigRational, p: &BigInt, d: &BigRational, q: &BigInt) -> bool {
    c.numer() * d.denom() * p < d.numer() * c.denom() * q
}

pub fn cone_chain_build(x0: &[f64], zeta: &[f64], g: &GeometryParams, sigma_tilde: f64) -> Result<ConeChain> {
    g.validate()?;
    if x0.len() != zeta.len() || x0.is_empty() {
        return invalid("x0 and zeta must share a positive dimension");
    }
    let zn = zeta.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(zn > 0.0) {
        return invalid("cone axis zeta must be nonzero");
    }
    let zeta: Vec<f64> = zeta.iter().map(|v| v / zn).collect();
    let sin = g.alpha.sin();
    let z = g.eta1 * sin / (4.0 * g.e);
    let mu1 = g.rho0 / (1.0 + sin);
    let rho1 = z * mu1;
    if !(sigma_tilde > 0.0 && sigma_tilde < mu1 - rho1) {
        return Err(Error::InvalidInput(format!(
            "sigma_tilde = {sigma_tilde} must lie in (0, mu1 − rho1 = {})",
            mu1 - rho1
        )));
    }

    let one = BigRational::one();
    let (s_q, e_q, eta_q, rho0_q, sig_q) =
        (exact(sin)?, exact(g.e)?, exact(g.eta1)?, exact(g.rho0)?, exact(sigma_tilde)?);
    let four = BigRational::from_integer(4.into());
    let three = BigRational::from_integer(3.into());
    let z_q = &eta_q * &s_q / (&four * &e_q);
    let a_q = (&one - &z_q) / (&one + &z_q);
    let (p, q) = (a_q.numer().clone(), a_q.denom().clone());
    if !(p.is_positive() && p < q) {
        return Err(Error::Numerical(format!("cone ratio {a_q} outside (0, 1)")));
    }
    let mu1_q = &rho0_q / (&one + &s_q);
    let rho1_q = &z_q * &mu1_q;
    let gap_q = &mu1_q - &rho1_q;
    let big_r_q = &four * &e_q * &rho1_q / &eta_q;
    let qr = BigRational::from_integer(q.clone());
    let pr = BigRational::from_integer(p.clone());
    // Step from k to k+1, scaled by q·Q_k: μ1(q − p) + ρ1 p against 3ρ1 q.
    let step_lhs = &mu1_q * (&qr - &pr) + &rho1_q * &pr;
    let step_rhs = &three * &rho1_q * &qr;
    let r3 = &three * &rho1_q;
    let r4 = &four * &rho1_q / &eta_q;
    let mu_sin = &mu1_q * &s_q;
    let outer = &mu1_q + &big_r_q;

    // a^{k−1} = p^{k−1}/q^{k−1}; k̄ is the smallest k with (μ1 − ρ1)a^{k−1} < σ̃.
    let power = |k: usize| (num_traits::pow(p.clone(), k), num_traits::pow(q.clone(), k));
    let below = |k: usize| {
        let (pk, qk) = power(k - 1);
        lt(&gap_q, &pk, &sig_q, &qk)
    };
    let a = (1.0 - z) / (1.0 + z);
    let l = ((sigma_tilde).ln() - (mu1 - rho1).ln()) / a.ln();
    if !(l + 2.0 < MAX_LINKS as f64) {
        return Err(Error::Numerical(format!("chain longer than {MAX_LINKS} links")));
    }
    let mut k_bar = ((l + 1.0).ceil() as usize).max(1);
    while k_bar > 1 && below(k_bar - 1) {
        k_bar -= 1;
    }
    while !below(k_bar) {
        k_bar += 1;
        if k_bar > MAX_LINKS {
            return Err(Error::Numerical(format!("chain longer than {MAX_LINKS} links")));
        }
    }
    let (pk, qk) = power(k_bar - 1);
    let bracket_ok = le(&gap_q, &pk, &sig_q, &qk)
        && if k_bar > 1 {
            let (pp, qp) = power(k_bar - 2);
            le(&sig_q, &qp, &gap_q, &pp)
        } else {
            le(&sig_q, &p, &gap_q, &q)
        };

    // Every containment but the last scales by a^{k−1} on both sides; the
    // last gains a factor a^{k−1} ≤ 1 on its left. Link 1 decides all k ≤ k̄.
    let unit = BigInt::one();
    let link_ok = le(&step_lhs, &unit, &step_rhs, &unit)
        && le(&r3, &unit, &r4, &unit)
        && le(&r4, &unit, &big_r_q, &unit)
        && le(&big_r_q, &unit, &mu_sin, &unit)
        && le(&outer, &unit, &rho0_q, &unit);
    let nesting_failure = if link_ok { None } else { Some(1) };
    // ρ_{k̄+1}/ρ_{k̄} from the exact radii.
    let (pn, qn) = (&pk * &p, &qk * &q);
    let ratio_exact = &pn * &qk * &q == &p * &pk * &qn;

    let n = k_bar + 1;
    let mu: Vec<f64> = (0..n).map(|j| mu1 * a.powi(j as i32)).collect();
    let rho: Vec<f64> = (0..n).map(|j| rho1 * a.powi(j as i32)).collect();
    let w = mu.iter().map(|m| x0.iter().zip(&zeta).map(|(x, e)| x + m * e).collect()).collect();
    Ok(ConeChain {
        x0: x0.to_vec(),
        zeta,
        params: *g,
        sigma_tilde,
        cone_ratio: a,
        mu,
        w,
        rho,
        k_bar,
        bracket: (l + 1.0, l + 2.0),
        nesting_ok: nesting_failure.is_none(),
        nesting_failure,
        bracket_ok,
        ratio_exact,
        sigma_local: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn params() -> GeometryParams {
        GeometryParams { r0: 0.1, e: 1.0, rho0: 0.2, alpha: PI / 6.0, d0: 1.0, eta1: 0.3 }
    }

    #[test]
    fn reference_chain() {
        let c = cone_chain_build(&[0.0, 0.0], &[0.0, 1.0], &params(), 1e-3).unwrap();
        assert!(c.nesting_ok && c.bracket_ok && c.ratio_exact);
        let k = c.k_bar as f64;
        assert!(c.bracket.0 - 1e-9 <= k && k <= c.bracket.1 + 1e-9, "{k} {:?}", c.bracket);
        assert!(c.cone_ratio > 0.0 && c.cone_ratio < 1.0);
        assert!(c.mu[c.k_bar - 1] - c.rho[c.k_bar - 1] < 1e-3);
    }

    /// Smallest k with (μ1 − ρ1)a^{k−1} < σ̃ by stepping BigRationals.
    fn k_bar_by_scan(g: &GeometryParams, sigma: f64) -> usize {
        let one = BigRational::one();
        let four = BigRational::from_integer(4.into());
        let (s, e, eta, rho0, sig) =
            (exact(g.alpha.sin()).unwrap(), exact(g.e).unwrap(), exact(g.eta1).unwrap(), exact(g.rho0).unwrap(), exact(sigma).unwrap());
        let z = &eta * &s / (&four * &e);
        let a = (&one - &z) / (&one + &z);
        let mu1 = &rho0 / (&one + &s);
        let mut gap = &mu1 - &z * &mu1;
        let mut k = 1;
        while gap >= sig {
            gap *= &a;
            k += 1;
        }
        k
    }

    #[test]
    fn k_bar_matches_linear_scan() {
        for (g, sigma) in [
            (params(), 1e-3),
            (params(), 0.05),
            (GeometryParams { rho0: 0.9, alpha: PI / 12.0, e: 1.9, eta1: 0.11, ..params() }, 0.3),
            (GeometryParams { rho0: 0.06, alpha: PI / 4.0, e: 1.0, eta1: 0.35, ..params() }, 4e-5),
        ] {
            let c = cone_chain_build(&[0.0], &[1.0], &g, sigma).unwrap();
            assert_eq!(c.k_bar, k_bar_by_scan(&g, sigma));
        }
    }

    #[test]
    fn sigma_tilde_too_large() {
        assert!(cone_chain_build(&[0.0], &[1.0], &params(), 0.2).is_err());
    }
}
