//! Term-by-term evaluation of the Carleman inequality on closed-form
//! solutions of du − Δu dt = g1 dt + g2 dW on G(t) = (0, s(t)).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::Estimate;
use crate::quadrature::trapezoid_weights;
use crate::solver::ManufacturedSolution;
use crate::stochastic::PathStream;
use crate::weights::CarlemanWeights;

/// Quadrature grid. `paths` and `seed` only matter when g2 ≠ 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CarlemanGrid {
    pub nx: usize,
    pub nt: usize,
    pub paths: usize,
    pub seed: u64,
}

impl Default for CarlemanGrid {
    fn default() -> Self {
        CarlemanGrid { nx: 801, nt: 801, paths: 64, seed: 0 }
    }
}

/// Per-path integrals.
#[derive(Debug, Clone, Copy, Default)]
struct Terms {
    lhs_u: f64,
    lhs_grad: f64,
    rhs_source: f64,
    m_gradient: f64,
    m_final_mass: f64,
    m_initial_mass: f64,
    m_flux: f64,
    m_flux_verbatim: f64,
    n_noise: f64,
    n_noise_gradient: f64,
}

impl Terms {
    fn lhs(&self) -> f64 {
        self.lhs_u + self.lhs_grad
    }

    fn m(&self, verbatim: bool) -> f64 {
        let flux = if verbatim { self.m_flux_verbatim } else { self.m_flux };
        self.m_gradient + self.m_final_mass + self.m_initial_mass + flux
    }

    fn n(&self) -> f64 {
        self.n_noise + self.n_noise_gradient
    }

    fn margin(&self, verbatim: bool) -> f64 {
        self.rhs_source + self.m(verbatim) + self.n() - self.lhs()
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MParts {
    /// ∫_{G(t0−b)} (a+b)²|∇(e^φu)|².
    pub gradient: Estimate,
    /// ∫_{G(t0)} aλe^{C0}σ(a)^{−2λ}u².
    pub final_mass: Estimate,
    /// ∫_{G(t0−b)} (|x−x0|²/16 + (a+b)/2)σ(a+b)^{−2λ}u².
    pub initial_mass: Estimate,
    /// −∫∫_{∂G} (x−x0)·ν(½(t0−t+a)|∇v|² + ¼(t0−t+a)e^{2φ}g2²), v = e^φu.
    pub flux: Estimate,
    /// The flux with coefficient 1 on |∇v|².
    pub flux_verbatim: Estimate,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct NParts {
    /// ∬ (½ + n/4)(t0−t+a)e^{2φ}g2².
    pub noise: Estimate,
    /// ∬ (t0−t+a)²e^{2φ}|∇g2|².
    pub noise_gradient: Estimate,
}

#[derive(Debug, Clone, Serialize)]
pub struct CarlemanResidualReport {
    pub solution: String,
    pub lambda: f64,
    pub a: f64,
    pub b: f64,
    pub t0: f64,
    pub c0: f64,
    pub grid: CarlemanGrid,
    pub lhs_u: Estimate,
    pub lhs_grad: Estimate,
    pub rhs_source: Estimate,
    #[serde(rename = "M")]
    pub m: Estimate,
    #[serde(rename = "M_parts")]
    pub m_parts: MParts,
    #[serde(rename = "N")]
    pub n: Estimate,
    #[serde(rename = "N_parts")]
    pub n_parts: NParts,
    /// rhs − lhs; its stderr is the standard error across paths.
    pub margin: Estimate,
    pub margin_verbatim: Estimate,
    /// margin / lhs.
    pub relative_margin: f64,
    pub stochastic: bool,
}

impl CarlemanResidualReport {
    /// margin ≥ −k·stderr − tol·lhs.
    pub fn holds(&self, k: f64, tol: f64) -> bool {
        self.margin.value >= -k * self.margin.stderr - tol * (self.lhs_u.value + self.lhs_grad.value)
    }
}

fn precondition(msg: String) -> Error {
    Error::Precondition(msg)
}

fn check(m: &ManufacturedSolution, w: &CarlemanWeights, grid: &CarlemanGrid) -> Result<()> {
    if !(w.lambda >= 1.0) {
        return Err(precondition(format!("lambda = {} violates lambda >= 1", w.lambda)));
    }
    if !(w.a > 0.0 && w.a + w.b <= (-1f64).exp()) {
        return Err(precondition(format!("a + b = {} violates a + b <= 1/e", w.a + w.b)));
    }
    if !(w.b > 0.0 && w.b <= w.t0) {
        return Err(precondition(format!("b = {} violates 0 < b <= t0 = {}", w.b, w.t0)));
    }
    if w.t0 > m.domain.horizon {
        return Err(precondition(format!("t0 = {} beyond the domain horizon {}", w.t0, m.domain.horizon)));
    }
    if w.dim() != 1 {
        return Err(precondition("closed-form solutions are one-dimensional".into()));
    }
    if grid.nx < 3 || grid.nt < 2 || grid.paths == 0 {
        return Err(Error::InvalidInput(format!("quadrature grid too small: {grid:?}")));
    }
    let times: Vec<f64> = (0..grid.nt).map(|j| w.t0 - w.b + w.b * j as f64 / (grid.nt - 1) as f64).collect();
    let scale = times
        .iter()
        .flat_map(|&t| (0..=8).map(move |i| (t, i as f64 / 8.0)))
        .map(|(t, f)| m.eval(t, f * m.right_end(t), 0.0).u.abs())
        .fold(1.0, f64::max);
    for &t in &times {
        for x in [0.0, m.right_end(t)] {
            let u = m.eval(t, x, 0.0).u;
            if u.abs() > 1e-10 * scale {
                return Err(precondition(format!("u = {u} at boundary point x = {x}, t = {t}; u must vanish on the boundary of G(t)")));
            }
        }
    }
    Ok(())
}

/// Brownian values on the time nodes: W(t_0) ~ N(0, t_0), then increments.
fn brownian(seed: u64, path: u64, times: &[f64]) -> Vec<f64> {
    let mut s = PathStream::new(seed, path);
    let mut w = Vec::with_capacity(times.len());
    let mut acc = times[0].max(0.0).sqrt() * s.next_normal();
    w.push(acc);
    for k in 1..times.len() {
        acc += (times[k] - times[k - 1]).sqrt() * s.next_normal();
        w.push(acc);
    }
    w
}

fn path_terms(m: &ManufacturedSolution, wts: &CarlemanWeights, grid: &CarlemanGrid, c0: f64, times: &[f64], wpath: &[f64]) -> Result<Terms> {
    let (lambda, a, b) = (wts.lambda, wts.a, wts.b);
    let x0 = wts.x0[0];
    let n_dim = 1.0;
    let tw = trapezoid_weights(times.len(), times[1] - times[0]);
    let unit = trapezoid_weights(grid.nx, 1.0);
    let mut t_acc = Terms::default();
    let eval_slice = |j: usize| -> (f64, Vec<f64>, Vec<crate::solver::ManufacturedPoint>) {
        let t = times[j];
        let r = m.right_end(t);
        let xs: Vec<f64> = (0..grid.nx).map(|i| r * i as f64 / (grid.nx - 1) as f64).collect();
        let pts = xs.iter().map(|&x| m.eval(t, x, wpath[j])).collect();
        (r, xs, pts)
    };
    for (j, &t) in times.iter().enumerate() {
        let s = wts.shift(t)?;
        let sa = wts.sigma_a(t)?;
        let ln_sa = wts.ln_sigma_a(t)?;
        let lg3 = s.ln().abs().powi(3);
        let (r, xs, pts) = eval_slice(j);
        let dx = r / (grid.nx - 1) as f64;
        let e2phi = |x: f64| (-(x - x0) * (x - x0) / (4.0 * s) - 2.0 * lambda * ln_sa).exp();
        let (mut lu, mut lg, mut rs, mut n1, mut n2) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for ((&x, p), &q) in xs.iter().zip(&pts).zip(&unit) {
            let e = e2phi(x) * q * dx;
            lu += lambda * (-c0).exp() / lg3 * e * p.u * p.u;
            lg += 0.5 * (-2.0 * c0).exp() * sa / lg3 * e * p.ux * p.ux;
            rs += (2.0 * c0).exp() * sa * sa * e * p.g1 * p.g1;
            n1 += (0.5 + n_dim / 4.0) * s * e * p.g2 * p.g2;
            n2 += s * s * e * p.g2x * p.g2x;
        }
        let wt = tw[j];
        t_acc.lhs_u += wt * lu;
        t_acc.lhs_grad += wt * lg;
        t_acc.rhs_source += wt * rs;
        t_acc.n_noise += wt * n1;
        t_acc.n_noise_gradient += wt * n2;

        // Boundary flux at x = 0 (ν = −1) and x = s(t) (ν = +1), |∇u| by
        // second-order one-sided differences.
        let last = grid.nx - 1;
        let ends = [
            (0.0, -1.0, (-3.0 * pts[0].u + 4.0 * pts[1].u - pts[2].u) / (2.0 * dx), pts[0].g2),
            (r, 1.0, (3.0 * pts[last].u - 4.0 * pts[last - 1].u + pts[last - 2].u) / (2.0 * dx), pts[last].g2),
        ];
        for (x, nu, ux, g2) in ends {
            let e = e2phi(x);
            let normal = (x - x0) * nu;
            let grad_v2 = e * ux * ux;
            let noise = 0.25 * s * e * g2 * g2;
            t_acc.m_flux -= wt * normal * (0.5 * s * grad_v2 + noise);
            t_acc.m_flux_verbatim -= wt * normal * (grad_v2 + noise);
        }

        if j == 0 {
            let sab = a + b;
            let sig_ab = wts.sigma.sigma(sab)?;
            for ((&x, p), &q) in xs.iter().zip(&pts).zip(&unit) {
                let phi = -(x - x0) * (x - x0) / (8.0 * s) - lambda * ln_sa;
                let phx = -(x - x0) / (4.0 * s);
                let vx = phi.exp() * (p.ux + phx * p.u);
                t_acc.m_gradient += q * dx * sab * sab * vx * vx;
                t_acc.m_initial_mass +=
                    q * dx * ((x - x0) * (x - x0) / 16.0 + 0.5 * sab) * sig_ab.powf(-2.0 * lambda) * p.u * p.u;
            }
        }
        if j + 1 == times.len() {
            let sig_a = wts.sigma.sigma(a)?;
            for (p, &q) in pts.iter().zip(&unit) {
                t_acc.m_final_mass += q * dx * a * lambda * c0.exp() * sig_a.powf(-2.0 * lambda) * p.u * p.u;
            }
        }
    }
    let all = [
        t_acc.lhs_u, t_acc.lhs_grad, t_acc.rhs_source, t_acc.m_gradient, t_acc.m_final_mass,
        t_acc.m_initial_mass, t_acc.m_flux, t_acc.n_noise, t_acc.n_noise_gradient,
    ];
    if all.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical(format!("non-finite Carleman integral for {} at lambda = {lambda}", m.name)));
    }
    Ok(t_acc)
}

pub fn carleman_residual(m: &ManufacturedSolution, w: &CarlemanWeights, grid: &CarlemanGrid) -> Result<CarlemanResidualReport> {
    check(m, w, grid)?;
    let c0 = w.sigma.lemma_c0;
    let times: Vec<f64> = (0..grid.nt).map(|j| w.t0 - w.b + w.b * j as f64 / (grid.nt - 1) as f64).collect();
    let stochastic = m.is_stochastic();
    let paths = if stochastic { grid.paths } else { 1 };
    let terms: Vec<Terms> = (0..paths as u64)
        .into_par_iter()
        .map(|p| {
            let wp = if stochastic { brownian(grid.seed, p, &times) } else { vec![0.0; times.len()] };
            path_terms(m, w, grid, c0, &times, &wp)
        })
        .collect::<Result<_>>()?;
    let est = |f: &dyn Fn(&Terms) -> f64| Estimate::from_samples(&terms.iter().map(f).collect::<Vec<_>>());
    let lhs = est(&|t| t.lhs());
    let margin = est(&|t| t.margin(false));
    Ok(CarlemanResidualReport {
        solution: m.name.clone(),
        lambda: w.lambda,
        a: w.a,
        b: w.b,
        t0: w.t0,
        c0,
        grid: *grid,
        lhs_u: est(&|t| t.lhs_u),
        lhs_grad: est(&|t| t.lhs_grad),
        rhs_source: est(&|t| t.rhs_source),
        m: est(&|t| t.m(false)),
        m_parts: MParts {
            gradient: est(&|t| t.m_gradient),
            final_mass: est(&|t| t.m_final_mass),
            initial_mass: est(&|t| t.m_initial_mass),
            flux: est(&|t| t.m_flux),
            flux_verbatim: est(&|t| t.m_flux_verbatim),
        },
        n: est(&|t| t.n()),
        n_parts: NParts { noise: est(&|t| t.n_noise), noise_gradient: est(&|t| t.n_noise_gradient) },
        relative_margin: if lhs.value > 0.0 { margin.value / lhs.value } else { 0.0 },
        margin,
        margin_verbatim: est(&|t| t.margin(true)),
        stochastic,
    })
}
