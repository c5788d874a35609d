//! Discrete pulled-back operator on the reference grid.
//!
//! With u(t, x) = v(t, ρ(t, x)) the equation on the fixed cylinder reads
//! dv = [A : D²v + β·∇v + b1 v] dt + c1 v dW where
//! A_kl = Σ_i ∂_{x_i}ρ_k ∂_{x_i}ρ_l and
//! β_k = Σ_i ∂²_{x_i}ρ_k − ∂_tρ_k + Σ_i a1_i ∂_{x_i}ρ_k.

use crate::error::{Error, Result};
use crate::geometry::MovingDomain;

use super::coefficients::SPDECoefficients;
use super::grid::ReferenceGrid;

/// Row-compressed operator with empty rows at Dirichlet nodes.
#[derive(Debug, Clone)]
pub struct PullbackOperator {
    pub time: f64,
    pub indptr: Vec<usize>,
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
    /// Smallest eigenvalue of A over the interior nodes.
    pub min_ellipticity: f64,
}

impl PullbackOperator {
    pub fn n(&self) -> usize {
        self.indptr.len() - 1
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.indptr[i]..self.indptr[i + 1];
        (&self.indices[r.clone()], &self.values[r])
    }

    /// out = L v.
    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            *o = cols.iter().zip(vals).map(|(c, a)| a * v[*c]).sum();
        }
    }

    /// Coefficient of column `c` in row `i`.
    pub fn entry(&self, i: usize, c: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.iter().zip(vals).filter(|(k, _)| **k == c).map(|(_, v)| *v).sum()
    }
}

#[derive(Debug, Clone, Copy)]
struct NodeCoefficients {
    a: [[f64; 2]; 2],
    beta: [f64; 2],
    b1: f64,
}

fn node_coefficients(
    domain: &MovingDomain,
    coeffs: Option<&SPDECoefficients>,
    t: f64,
    y: &[f64],
) -> Result<(NodeCoefficients, f64, f64)> {
    let n = y.len();
    let j = domain.pullback_jacobians(t, y)?;
    let x = domain.tau(t, y);
    let drift: Vec<f64> = match coeffs {
        Some(c) => c.a1.eval(&x).to_vec(),
        None => vec![0.0; n],
    };
    let mut a = [[0.0; 2]; 2];
    let mut beta = [0.0; 2];
    for k in 0..n {
        for l in 0..n {
            a[k][l] = (0..n).map(|i| j.grad[i][k] * j.grad[i][l]).sum();
        }
        beta[k] = (0..n).map(|i| j.hessian[i][k] + drift[i] * j.grad[i][k]).sum::<f64>() - j.time[k];
    }
    let det = if n == 1 { j.grad[0][0] } else { j.grad[0][0] * j.grad[1][1] - j.grad[0][1] * j.grad[1][0] };
    let lam = if n == 1 {
        a[0][0]
    } else {
        let m = 0.5 * (a[0][0] + a[1][1]);
        let r = (0.25 * (a[0][0] - a[1][1]).powi(2) + a[0][1] * a[0][1]).sqrt();
        m - r
    };
    let b1 = coeffs.map_or(0.0, |c| c.b1.eval(&x));
    Ok((NodeCoefficients { a, beta, b1 }, det, lam))
}

/// Geometric part of the pulled-back operator at time t: principal part
/// plus the first-order terms generated by ρ.
pub fn assemble_pullback_operator(domain: &MovingDomain, grid: &ReferenceGrid, t: f64) -> Result<PullbackOperator> {
    assemble_operator(domain, grid, None, t)
}

/// Full operator including a1·∇ and b1 when `coeffs` is given.
pub fn assemble_operator(
    domain: &MovingDomain,
    grid: &ReferenceGrid,
    coeffs: Option<&SPDECoefficients>,
    t: f64,
) -> Result<PullbackOperator> {
    let h = grid.h;
    let h2 = h * h;
    let mut indptr = Vec::with_capacity(grid.len() + 1);
    let mut indices = Vec::new();
    let mut values = Vec::new();
    let mut min_ell = f64::INFINITY;
    indptr.push(0);
    for node in 0..grid.len() {
        if grid.is_interior(node) {
            let (c, det, lam) = node_coefficients(domain, coeffs, t, grid.point(node))?;
            if det.abs() <= 1e-12 {
                return Err(Error::SingularGeometry(format!("det ∇ρ = {det} at node {node}, t = {t}")));
            }
            if !(lam > 0.0) {
                return Err(Error::SingularGeometry(format!("principal part not elliptic at node {node}, t = {t}")));
            }
            min_ell = min_ell.min(lam);
            let (i, j) = grid.lattice[node];
            let (i, j) = (i as i64, j as i64);
            let mut push = |di: i64, dj: i64, w: f64| -> Result<()> {
                if w == 0.0 && (di != 0 || dj != 0) {
                    return Ok(());
                }
                let col = grid
                    .at(i + di, j + dj)
                    .ok_or_else(|| Error::Numerical(format!("missing stencil neighbour of node {node}")))?;
                indices.push(col);
                values.push(w);
                Ok(())
            };
            if grid.dim == 1 {
                let (a, b) = (c.a[0][0], c.beta[0]);
                push(-1, 0, a / h2 - b / (2.0 * h))?;
                push(0, 0, -2.0 * a / h2 + c.b1)?;
                push(1, 0, a / h2 + b / (2.0 * h))?;
            } else {
                let (a11, a22, a12) = (c.a[0][0], c.a[1][1], c.a[0][1]);
                let (b1, b2) = (c.beta[0], c.beta[1]);
                let m = 2.0 * a12 / (4.0 * h2);
                push(-1, -1, m)?;
                push(0, -1, a22 / h2 - b2 / (2.0 * h))?;
                push(1, -1, -m)?;
                push(-1, 0, a11 / h2 - b1 / (2.0 * h))?;
                push(0, 0, -2.0 * (a11 + a22) / h2 + c.b1)?;
                push(1, 0, a11 / h2 + b1 / (2.0 * h))?;
                push(-1, 1, -m)?;
                push(0, 1, a22 / h2 + b2 / (2.0 * h))?;
                push(1, 1, m)?;
            }
        }
        indptr.push(indices.len());
    }
    Ok(PullbackOperator { time: t, indptr, indices, values, min_ellipticity: min_ell })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{FixedBoundary, Motion, RadialProfile, ReferenceDomain};

    #[test]
    fn identity_is_laplacian_1d() {
        let d = MovingDomain::static_interval(1.0, 1.0).unwrap();
        let g = ReferenceGrid::new(&d, 10).unwrap();
        let op = assemble_pullback_operator(&d, &g, 0.3).unwrap();
        let h2 = g.h * g.h;
        assert_eq!(op.row(0).0.len(), 0);
        assert_eq!(op.entry(5, 4), 1.0 / h2);
        assert_eq!(op.entry(5, 5), -2.0 / h2);
        assert_eq!(op.entry(5, 6), 1.0 / h2);
        assert_eq!(op.min_ellipticity, 1.0);
    }

    #[test]
    fn identity_is_five_point_2d() {
        let d = MovingDomain::new(
            ReferenceDomain::Star { center: [0.0, 0.0], radial: RadialProfile::circle(1.0) },
            Motion::Identity,
            1.0,
            FixedBoundary::Arc { lo: 0.0, hi: 1.0 },
            "rest",
        )
        .unwrap();
        let g = ReferenceGrid::new(&d, 16).unwrap();
        let op = assemble_pullback_operator(&d, &g, 0.0).unwrap();
        let node = (0..g.len()).find(|&n| g.is_interior(n) && g.point(n).iter().all(|v| v.abs() < 1e-12)).unwrap();
        let (cols, _) = op.row(node);
        assert_eq!(cols.len(), 5);
        assert_eq!(op.entry(node, node), -4.0 / (g.h * g.h));
    }
}
