//! Regularity assumptions on the domain family: interior balls, the speed
//! bound on cylinders, and Lipschitz-class cones.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::moving::MovingDomain;
use super::snapshot::DomainSnapshot;
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryParams {
    pub r0: f64,
    pub e: f64,
    pub rho0: f64,
    pub alpha: f64,
    pub d0: f64,
    pub eta1: f64,
}

impl GeometryParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.r0 > 0.0) {
            return invalid(format!("R0 = {} must be positive", self.r0));
        }
        if !(self.e >= 1.0) {
            return invalid(format!("E = {} must be >= 1", self.e));
        }
        if !(self.rho0 > 0.0) {
            return invalid(format!("rho0 = {} must be positive", self.rho0));
        }
        if !(self.alpha > 0.0 && self.alpha <= PI / 4.0) {
            return invalid(format!("alpha = {} must lie in (0, pi/4]", self.alpha));
        }
        if !(self.d0 > 0.0) {
            return invalid(format!("d0 = {} must be positive", self.d0));
        }
        if !(self.eta1 > 0.0 && self.eta1 < (-1f64).exp()) {
            return invalid(format!("eta1 = {} must lie in (0, 1/e)", self.eta1));
        }
        Ok(())
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Boundary samples whose ball B_{R0}(x − R0ν) is not inside G to tolerance.
pub fn interior_ball_violations(g: &DomainSnapshot, r0: f64) -> Result<Vec<usize>> {
    if g.boundary_points.is_empty() {
        return invalid("snapshot has no boundary samples");
    }
    if !(r0 > 0.0) {
        return invalid(format!("R0 = {r0} must be positive"));
    }
    let bc = g.boundary_cloud();
    let mut bad = Vec::new();
    for i in 0..g.boundary_count() {
        let c: Vec<f64> = g.boundary_point(i).iter().zip(g.normal(i)).map(|(x, v)| x - r0 * v).collect();
        if !g.membership(&bc, &c) || bc.distance(&c) < r0 - g.tolerance {
            bad.push(i);
        }
    }
    Ok(bad)
}

pub fn check_interior_ball(g: &DomainSnapshot, r0: f64) -> Result<bool> {
    Ok(interior_ball_violations(g, r0)?.is_empty())
}

/// Sample grid for the speed-bound check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpeedGrid {
    /// Focal times t0.
    pub times: Vec<f64>,
    /// Candidate centers x0.
    pub centers: Vec<Vec<f64>>,
    pub radii: Vec<f64>,
    /// Time samples per cylinder.
    pub cylinder_steps: usize,
}

fn ball_probe(center: &[f64], r: f64) -> Vec<Vec<f64>> {
    match center.len() {
        1 => vec![vec![center[0] - r], vec![center[0] + r]],
        _ => (0..64)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / 64.0;
                vec![center[0] + r * a.cos(), center[1] + r * a.sin()]
            })
            .collect(),
    }
}

fn ball_inside(family: &MovingDomain, t: f64, center: &[f64], r: f64) -> bool {
    family.contains(t, center) && ball_probe(center, r).iter().all(|p| family.contains(t, p))
}

/// First violating (t0, x0, R, t) when B_{ER}(x0) ⊂ G(t0) but
/// B_R(x0) ⊄ G(t) for some t in (max{t0 − R², 0}, t0].
pub fn speed_bound_violation(family: &MovingDomain, e: f64, grid: &SpeedGrid) -> Result<Option<(f64, Vec<f64>, f64, f64)>> {
    if !(e >= 1.0) {
        return invalid(format!("E = {e} must be >= 1"));
    }
    let steps = grid.cylinder_steps.max(1);
    for &t0 in &grid.times {
        for x0 in &grid.centers {
            for &r in &grid.radii {
                if !ball_inside(family, t0, x0, e * r) {
                    continue;
                }
                let start = (t0 - r * r).max(0.0);
                for k in 0..=steps {
                    let t = start + (t0 - start) * k as f64 / steps as f64;
                    if !ball_inside(family, t, x0, r) {
                        return Ok(Some((t0, x0.clone(), r, t)));
                    }
                }
            }
        }
    }
    Ok(None)
}

pub fn check_speed_bound(family: &MovingDomain, e: f64, grid: &SpeedGrid) -> Result<bool> {
    Ok(speed_bound_violation(family, e, grid)?.is_none())
}

fn unit(zeta: &[f64]) -> Result<Vec<f64>> {
    let n = zeta.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(n > 1e-14) {
        return invalid("cone axis has zero length");
    }
    Ok(zeta.iter().map(|v| v / n).collect())
}

/// Membership in {x ∈ B_{ρ0}(x0) : (x − x0)·ζ/|x − x0| > cos α}.
pub fn cone_contains(x0: &[f64], zeta: &[f64], rho0: f64, alpha: f64, x: &[f64]) -> bool {
    let r = dist(x, x0);
    if r == 0.0 || r >= rho0 {
        return false;
    }
    let zn = zeta.iter().map(|v| v * v).sum::<f64>().sqrt();
    let dot: f64 = x.iter().zip(x0).zip(zeta).map(|((a, b), z)| (a - b) * z).sum();
    dot / (r * zn) > alpha.cos()
}

/// Sampled truncated cone at spacing h. In 2-D the boundary consists of
/// the two lateral rays and the spherical cap.
pub fn lipschitz_cone(x0: &[f64], zeta: &[f64], rho0: f64, alpha: f64, h: f64) -> Result<DomainSnapshot> {
    let z = unit(zeta)?;
    if !(rho0 > 0.0 && alpha > 0.0 && alpha < PI && h > 0.0) {
        return invalid("cone needs rho0 > 0, 0 < alpha < pi, h > 0");
    }
    match x0.len() {
        1 => {
            // The 1-D cone is the open segment toward ζ.
            let end = x0[0] + z[0] * rho0;
            let (lo, hi) = if z[0] > 0.0 { (x0[0], end) } else { (end, x0[0]) };
            DomainSnapshot::interval(0.0, lo, hi, h)
        }
        2 => {
            let axis = z[1].atan2(z[0]);
            let cells = (rho0 / h).ceil() as i64;
            let mut interior = Vec::new();
            for i in -cells..=cells {
                for j in -cells..=cells {
                    let x = [x0[0] + i as f64 * h, x0[1] + j as f64 * h];
                    if cone_contains(x0, &z, rho0, alpha, &x) {
                        interior.extend_from_slice(&x);
                    }
                }
            }
            let mut boundary = Vec::new();
            let mut normals = Vec::new();
            let m = (rho0 / h).ceil() as usize;
            for side in [-1.0, 1.0] {
                let a = axis + side * alpha;
                // Outward normal of the lateral ray: rotate its direction away from the axis.
                let nv = [-a.sin() * side, a.cos() * side];
                for k in 0..=m {
                    let r = rho0 * k as f64 / m as f64;
                    boundary.extend_from_slice(&[x0[0] + r * a.cos(), x0[1] + r * a.sin()]);
                    normals.extend_from_slice(&nv);
                }
            }
            let arcs = ((2.0 * alpha * rho0) / h).ceil().max(2.0) as usize;
            for k in 1..arcs {
                let a = axis - alpha + 2.0 * alpha * k as f64 / arcs as f64;
                boundary.extend_from_slice(&[x0[0] + rho0 * a.cos(), x0[1] + rho0 * a.sin()]);
                normals.extend_from_slice(&[a.cos(), a.sin()]);
            }
            DomainSnapshot::new(0.0, 2, interior, boundary, normals, h)
        }
        n => invalid(format!("cone sampling supports n = 1, 2, got {n}")),
    }
}

/// For every boundary sample x with inward axis −ν(x), the sampled cone of
/// radius ρ0 and aperture α at x lies inside G to tolerance.
pub fn check_lipschitz_class(g: &DomainSnapshot, rho0: f64, alpha: f64) -> Result<bool> {
    if g.boundary_points.is_empty() {
        return invalid("snapshot has no boundary samples");
    }
    let bc = g.boundary_cloud();
    let h = g.spacing.max(rho0 / 16.0);
    for i in 0..g.boundary_count() {
        let zeta: Vec<f64> = g.normal(i).iter().map(|v| -v).collect();
        let cone = lipschitz_cone(g.boundary_point(i), &zeta, rho0, alpha, h)?;
        for p in cone.interior_points.chunks(g.dim) {
            if !g.membership(&bc, p) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_validation() {
        let ok = GeometryParams { r0: 0.1, e: 1.0, rho0: 0.05, alpha: 0.5, d0: 0.1, eta1: 0.3 };
        assert!(ok.validate().is_ok());
        assert!(GeometryParams { eta1: 0.5, ..ok }.validate().is_err());
        assert!(GeometryParams { alpha: 1.0, ..ok }.validate().is_err());
        assert!(GeometryParams { e: 0.5, ..ok }.validate().is_err());
    }

    #[test]
    fn cone_normals_point_outward() {
        let c = lipschitz_cone(&[0.0, 0.0], &[0.0, 1.0], 1.0, 0.5, 0.05).unwrap();
        for i in 0..c.boundary_count() {
            let p = c.boundary_point(i);
            let nv = c.normal(i);
            let q = [p[0] + 0.01 * nv[0], p[1] + 0.01 * nv[1]];
            assert!(!cone_contains(&[0.0, 0.0], &[0.0, 1.0], 1.0, 0.5, &q), "at {p:?}");
        }
    }

    #[test]
    fn zero_axis_rejected() {
        assert!(lipschitz_cone(&[0.0, 0.0], &[0.0, 0.0], 1.0, 0.5, 0.1).is_err());
    }
}
