//! The σ profile: σ(s) = s·exp(−∫₀^s [1 − exp(−1/(ln t)²)] dt/t) on (0, 1/e].
//!
//! Under t = e^{−1/v} the exponent becomes I(u) = ∫₀^u (1 − e^{−v²})/v² dv with
//! u = 1/|ln s|, a smooth integrand on [0, 1]. Everything below works in u.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::integrate;

/// Right end of the σ domain.
pub const S_MAX: f64 = 1.0 / std::f64::consts::E;

const QUAD_TOL: f64 = 1e-14;

/// (1 − e^{−v²})/v², continuous at 0.
pub(crate) fn exponent_integrand(v: f64) -> f64 {
    let v2 = v * v;
    if v2 < 1e-6 {
        1.0 - v2 / 2.0 + v2 * v2 / 6.0
    } else {
        -(-v2).exp_m1() / v2
    }
}

fn exponent_integrand_prime(v: f64) -> f64 {
    let v2 = v * v;
    if v2 < 1e-4 {
        -v + 2.0 * v * v2 / 3.0 - v * v2 * v2 / 4.0
    } else {
        2.0 * (-v2).exp() / v + 2.0 * (-v2).exp_m1() / (v * v2)
    }
}

fn check_s(s: f64) -> Result<f64> {
    if !(s > 0.0 && s <= S_MAX * (1.0 + 1e-15)) {
        return Err(Error::Domain(format!("s = {s} outside (0, 1/e]")));
    }
    Ok(1.0 / s.ln().abs())
}

fn exponent_direct(u: f64, tol: f64) -> f64 {
    integrate(exponent_integrand, 0.0, u, tol)
}

/// σ(s) by direct adaptive quadrature.
pub fn sigma(s: f64) -> Result<f64> {
    let u = check_s(s)?;
    Ok(s * (-exponent_direct(u, QUAD_TOL)).exp())
}

/// σ′(s) = e^{−I}·e^{−1/(ln s)²} by direct adaptive quadrature.
pub fn sigma_prime(s: f64) -> Result<f64> {
    let u = check_s(s)?;
    Ok((-exponent_direct(u, QUAD_TOL) - u * u).exp())
}

/// Bound diagnostics on a set of s-values.
#[derive(Debug, Clone, Serialize)]
pub struct SigmaBoundsReport {
    pub points: usize,
    /// max of σ(s)/s − 1; nonpositive when σ ≤ s holds.
    pub upper_excess: f64,
    /// min of σ(s)/(s·e^{−c0}) − 1; nonnegative when the lower bound holds.
    pub lower_slack: f64,
    pub value_bounds_hold: bool,
    /// min of σ′ − e^{−c}, with c the constant under test.
    pub derivative_lower_slack: f64,
    /// max of σ′ − 1.
    pub derivative_upper_excess: f64,
    pub derivative_bounds_hold: bool,
}

/// Tabulated σ on (0, 1/e], interpolated in u = 1/|ln s| by quintic Hermite
/// pieces built from the exact integrand and its derivative.
#[derive(Debug, Clone)]
pub struct SigmaTable {
    /// s-values of the nodes, increasing, last = 1/e.
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub derivative: Vec<f64>,
    /// Tight constant: σ(1/e) = e^{−1}·e^{−c0}.
    pub c0: f64,
    /// c0 + 1: satisfies both s·e^{−c} ≤ σ ≤ s and e^{−c} ≤ σ′ ≤ 1.
    pub lemma_c0: f64,
    du: f64,
    exponent: Vec<f64>,
}

impl SigmaTable {
    /// Builds a table with `nodes` uniform intervals in u ∈ [0, 1].
    pub fn new(nodes: usize) -> Result<Self> {
        if nodes < 2 {
            return Err(Error::InvalidInput("SigmaTable needs at least 2 intervals".into()));
        }
        let du = 1.0 / nodes as f64;
        let mut exponent = Vec::with_capacity(nodes + 1);
        exponent.push(0.0);
        let mut acc = 0.0;
        for i in 0..nodes {
            let a = i as f64 * du;
            acc += integrate(exponent_integrand, a, a + du, QUAD_TOL * du);
            exponent.push(acc);
        }
        let mut grid = Vec::with_capacity(nodes);
        let mut values = Vec::with_capacity(nodes);
        let mut derivative = Vec::with_capacity(nodes);
        for (i, &ie) in exponent.iter().enumerate().skip(1) {
            let u = i as f64 * du;
            let s = if i == nodes { S_MAX } else { (-1.0 / u).exp() };
            grid.push(s);
            values.push(s * (-ie).exp());
            derivative.push((-ie - u * u).exp());
        }
        let c0 = exponent[nodes];
        Ok(SigmaTable { grid, values, derivative, c0, lemma_c0: c0 + 1.0, du, exponent })
    }

    /// Interpolated I(u) with its first two u-derivatives.
    fn exponent_at(&self, u: f64) -> (f64, f64, f64) {
        let n = self.exponent.len() - 1;
        let pos = (u / self.du).clamp(0.0, n as f64);
        let i = (pos.floor() as usize).min(n - 1);
        let t = pos - i as f64;
        let h = self.du;
        let (u0, u1) = (i as f64 * h, (i + 1) as f64 * h);
        let p0 = self.exponent[i];
        let p1 = self.exponent[i + 1];
        let m0 = exponent_integrand(u0) * h;
        let m1 = exponent_integrand(u1) * h;
        let a0 = exponent_integrand_prime(u0) * h * h;
        let a1 = exponent_integrand_prime(u1) * h * h;
        let dp = p1 - p0;
        let c3 = 10.0 * dp - 6.0 * m0 - 4.0 * m1 - 1.5 * a0 + 0.5 * a1;
        let c4 = -15.0 * dp + 8.0 * m0 + 7.0 * m1 + 1.5 * a0 - a1;
        let c5 = 6.0 * dp - 3.0 * m0 - 3.0 * m1 - 0.5 * a0 + 0.5 * a1;
        let c2 = 0.5 * a0;
        let v = p0 + t * (m0 + t * (c2 + t * (c3 + t * (c4 + t * c5))));
        let d1 = m0 + t * (2.0 * c2 + t * (3.0 * c3 + t * (4.0 * c4 + t * 5.0 * c5)));
        let d2 = 2.0 * c2 + t * (6.0 * c3 + t * (12.0 * c4 + t * 20.0 * c5));
        (v, d1 / h, d2 / (h * h))
    }

    /// (σ(s), σ′(s)) from the interpolant; σ′ is the exact derivative of the
    /// interpolated σ, so the ODE residual measures interpolation quality.
    pub fn eval(&self, s: f64) -> Result<(f64, f64)> {
        let u = check_s(s)?;
        let (ie, die, _) = self.exponent_at(u);
        let e = (-ie).exp();
        Ok((s * e, e * (1.0 - u * u * die)))
    }

    pub fn sigma(&self, s: f64) -> Result<f64> {
        self.eval(s).map(|v| v.0)
    }

    pub fn sigma_prime(&self, s: f64) -> Result<f64> {
        self.eval(s).map(|v| v.1)
    }

    /// ln σ(s), accurate for s far below f64 underflow of σ itself.
    pub fn ln_sigma(&self, s: f64) -> Result<f64> {
        let u = check_s(s)?;
        Ok(s.ln() - self.exponent_at(u).0)
    }

    /// Residual r(s) = d/ds ln(σ/(sσ′)) − 2/(s|ln s|³) of the interpolant,
    /// differentiated analytically.
    pub fn ode_residual_at(&self, s: f64) -> Result<f64> {
        let u = check_s(s)?;
        let (_, d1, d2) = self.exponent_at(u);
        // q = ln(σ/(sσ′)) = −ln(1 − u² I′); du/ds = u²/s.
        let g = 1.0 - u * u * d1;
        let dq_du = (2.0 * u * d1 + u * u * d2) / g;
        Ok(dq_du * u * u / s - 2.0 * u * u * u / s)
    }

    /// Sup-norm of the ODE residual over `points`.
    pub fn ode_residual(&self, points: &[f64]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for &s in points {
            worst = worst.max(self.ode_residual_at(s)?.abs());
        }
        Ok(worst)
    }

    /// Checks s·e^{−c} ≤ σ ≤ s and e^{−c} ≤ σ′ ≤ 1 at `points` for constant `c`.
    pub fn check_bounds(&self, points: &[f64], c: f64) -> Result<SigmaBoundsReport> {
        let floor = (-c).exp();
        let mut upper_excess = f64::NEG_INFINITY;
        let mut lower_slack = f64::INFINITY;
        let mut dlow = f64::INFINITY;
        let mut dup = f64::NEG_INFINITY;
        for &s in points {
            let (v, d) = self.eval(s)?;
            upper_excess = upper_excess.max(v / s - 1.0);
            lower_slack = lower_slack.min(v / (s * floor) - 1.0);
            dlow = dlow.min(d - floor);
            dup = dup.max(d - 1.0);
        }
        // Relative slack absorbs the last-ulp rounding at s = 1/e with c = c0.
        let tol = 1e-13;
        Ok(SigmaBoundsReport {
            points: points.len(),
            upper_excess,
            lower_slack,
            value_bounds_hold: upper_excess <= tol && lower_slack >= -tol,
            derivative_lower_slack: dlow,
            derivative_upper_excess: dup,
            derivative_bounds_hold: dlow >= -tol && dup <= tol,
        })
    }

    /// CSV rows `s,sigma,sigma_prime` at the nodes.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,sigma,sigma_prime\n");
        for i in 0..self.grid.len() {
            out.push_str(&format!("{:e},{:e},{:e}\n", self.grid[i], self.values[i], self.derivative[i]));
        }
        out
    }
}

/// C0 = ∫₀^{1/e} [1 − exp(−1/(ln t)²)] dt/t, read off the table's last node.
pub fn compute_c0(table: &SigmaTable) -> f64 {
    table.c0
}

/// `n` uniformly spaced points i·(1/e)/n, i = 1..=n.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    (1..=n).map(|i| S_MAX * i as f64 / n as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrand_branches_agree() {
        for &v in &[9.9e-4f64, 1.0e-3, 1.01e-3] {
            let series = 1.0 - v * v / 2.0 + v.powi(4) / 6.0;
            let exact = -(-v * v).exp_m1() / (v * v);
            assert!((series - exact).abs() < 1e-12);
            assert!((exponent_integrand(v) - exact).abs() < 1e-12);
        }
        for &v in &[0.0099f64, 0.01, 0.0101] {
            let h = 1e-6;
            let fd = (exponent_integrand(v + h) - exponent_integrand(v - h)) / (2.0 * h);
            assert!((exponent_integrand_prime(v) - fd).abs() < 1e-7);
        }
    }

    #[test]
    fn domain_errors() {
        assert!(sigma(0.0).is_err());
        assert!(sigma(0.5).is_err());
        assert!(sigma(-1.0).is_err());
        assert!(sigma(S_MAX).is_ok());
    }

    #[test]
    fn table_matches_direct_quadrature() {
        let t = SigmaTable::new(256).unwrap();
        for &s in &[1e-200, 1e-12, 1e-3, 0.05, 0.2, 0.3, S_MAX] {
            let (v, d) = t.eval(s).unwrap();
            assert!((v / sigma(s).unwrap() - 1.0).abs() < 1e-12, "s={s}");
            assert!((d / sigma_prime(s).unwrap() - 1.0).abs() < 1e-9, "s={s}");
        }
    }

    #[test]
    fn near_zero_limits() {
        let t = SigmaTable::new(256).unwrap();
        let (v, d) = t.eval(1e-300).unwrap();
        assert!(v < 1e-299);
        assert!((d - 1.0).abs() < 1e-2);
    }
}
