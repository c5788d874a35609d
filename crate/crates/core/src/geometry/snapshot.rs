//! Sampled domains G(t) and the set-distance calculus on them.

use serde::Serialize;

use super::cloud::PointCloud;
use crate::error::{invalid, Error, Result};

/// A sampled domain: interior points, boundary points with outward unit
/// normals, all stored flat with `dim` coordinates per point.
#[derive(Debug, Clone, Serialize)]
pub struct DomainSnapshot {
    pub time: f64,
    pub dim: usize,
    pub interior_points: Vec<f64>,
    pub boundary_points: Vec<f64>,
    pub normals: Vec<f64>,
    pub spacing: f64,
    /// Membership and distance tolerance; 2 × spacing unless overridden.
    pub tolerance: f64,
    /// Set when a construction (e.g. a shrink) left no interior points.
    pub empty: bool,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

impl DomainSnapshot {
    pub fn new(
        time: f64,
        dim: usize,
        interior_points: Vec<f64>,
        boundary_points: Vec<f64>,
        normals: Vec<f64>,
        spacing: f64,
    ) -> Result<Self> {
        if dim == 0 || !interior_points.len().is_multiple_of(dim) || !boundary_points.len().is_multiple_of(dim) {
            return invalid("point arrays are not multiples of the dimension");
        }
        if normals.len() != boundary_points.len() {
            return invalid("one normal per boundary point required");
        }
        for nv in normals.chunks(dim) {
            if (norm(nv) - 1.0).abs() > 1e-9 {
                return invalid(format!("boundary normal {nv:?} is not unit length"));
            }
        }
        if !(spacing > 0.0) {
            return invalid("spacing must be positive");
        }
        let empty = interior_points.is_empty() && boundary_points.is_empty();
        Ok(DomainSnapshot {
            time,
            dim,
            interior_points,
            boundary_points,
            normals,
            spacing,
            tolerance: 2.0 * spacing,
            empty,
        })
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    /// Interval (lo, hi) sampled at spacing ≤ h; boundary {lo, hi}.
    pub fn interval(time: f64, lo: f64, hi: f64, h: f64) -> Result<Self> {
        if !(hi > lo) || !(h > 0.0) {
            return invalid(format!("interval needs lo < hi and h > 0, got ({lo}, {hi}), h = {h}"));
        }
        let cells = ((hi - lo) / h).ceil().max(1.0) as usize;
        let step = (hi - lo) / cells as f64;
        let interior = (1..cells).map(|k| lo + k as f64 * step).collect();
        DomainSnapshot::new(time, 1, interior, vec![lo, hi], vec![-1.0, 1.0], step)
    }

    /// Ball of `radius` about `center` (1-D: an interval; 2-D: lattice points
    /// plus an arc-length-uniform boundary ring).
    pub fn ball(time: f64, center: &[f64], radius: f64, h: f64) -> Result<Self> {
        match center.len() {
            1 => Self::interval(time, center[0] - radius, center[0] + radius, h),
            2 => Self::star(time, [center[0], center[1]], &|_| (radius, 0.0), h),
            n => invalid(format!("ball sampling supports n = 1, 2, got {n}")),
        }
    }

    /// Star-shaped 2-D domain with radial function r(φ), given as φ ↦ (r, r′).
    /// Normals come from the radial parametrization.
    pub fn star(time: f64, center: [f64; 2], radial: &dyn Fn(f64) -> (f64, f64), h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return invalid("spacing must be positive");
        }
        let probe = 720;
        let mut rmax: f64 = 0.0;
        let mut perimeter = 0.0;
        for k in 0..probe {
            let (r, dr) = radial(2.0 * std::f64::consts::PI * k as f64 / probe as f64);
            if !(r > 0.0) {
                return invalid("radial function must be positive");
            }
            rmax = rmax.max(r);
            perimeter += (r * r + dr * dr).sqrt() * 2.0 * std::f64::consts::PI / probe as f64;
        }
        let m = (perimeter / h).ceil().max(8.0) as usize;
        let mut boundary = Vec::with_capacity(2 * m);
        let mut normals = Vec::with_capacity(2 * m);
        for k in 0..m {
            let ph = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
            let (r, dr) = radial(ph);
            let (c, s) = (ph.cos(), ph.sin());
            boundary.push(center[0] + r * c);
            boundary.push(center[1] + r * s);
            // r e_r − r′ e_φ, e_φ = (−sin, cos).
            let nx = r * c + dr * s;
            let ny = r * s - dr * c;
            let nn = (nx * nx + ny * ny).sqrt();
            normals.push(nx / nn);
            normals.push(ny / nn);
        }
        let cells = (rmax / h).ceil() as i64 + 1;
        let mut interior = Vec::new();
        for i in -cells..=cells {
            for j in -cells..=cells {
                let (dx, dy) = (i as f64 * h, j as f64 * h);
                let rr = (dx * dx + dy * dy).sqrt();
                let r = radial(dy.atan2(dx)).0;
                if rr < r {
                    interior.push(center[0] + dx);
                    interior.push(center[1] + dy);
                }
            }
        }
        DomainSnapshot::new(time, 2, interior, boundary, normals, h)
    }

    /// L-shaped domain [0, 2s]² minus [s, 2s]², reentrant corner at (s, s).
    pub fn l_shape(time: f64, s: f64, h: f64) -> Result<Self> {
        if !(s > 0.0 && h > 0.0) {
            return invalid("L-shape needs s > 0 and h > 0");
        }
        let n = (s / h).round().max(1.0) as usize;
        let step = s / n as f64;
        let mut interior = Vec::new();
        for i in 1..2 * n {
            for j in 1..2 * n {
                if i >= n && j >= n {
                    continue;
                }
                interior.push(i as f64 * step);
                interior.push(j as f64 * step);
            }
        }
        let r = std::f64::consts::FRAC_1_SQRT_2;
        // Corners in counterclockwise order with their edge-averaged normals.
        let corners = [
            ([0.0, 0.0], [-r, -r]),
            ([2.0 * s, 0.0], [r, -r]),
            ([2.0 * s, s], [r, r]),
            ([s, s], [r, r]),
            ([s, 2.0 * s], [r, r]),
            ([0.0, 2.0 * s], [-r, r]),
        ];
        let mut boundary = Vec::new();
        let mut normals = Vec::new();
        for k in 0..6 {
            let (p, pn) = corners[k];
            let (q, _) = corners[(k + 1) % 6];
            boundary.extend_from_slice(&p);
            normals.extend_from_slice(&pn);
            let (ex, ey) = (q[0] - p[0], q[1] - p[1]);
            let len = (ex * ex + ey * ey).sqrt();
            // Outward normal of a counterclockwise edge is the tangent turned clockwise.
            let en = [ey / len, -ex / len];
            let m = (len / step).round() as usize;
            for i in 1..m {
                let f = i as f64 / m as f64;
                boundary.push(p[0] + f * ex);
                boundary.push(p[1] + f * ey);
                normals.extend_from_slice(&en);
            }
        }
        DomainSnapshot::new(time, 2, interior, boundary, normals, step)
    }

    pub fn interior_count(&self) -> usize {
        self.interior_points.len() / self.dim
    }

    pub fn boundary_count(&self) -> usize {
        self.boundary_points.len() / self.dim
    }

    pub fn boundary_point(&self, i: usize) -> &[f64] {
        &self.boundary_points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn normal(&self, i: usize) -> &[f64] {
        &self.normals[i * self.dim..(i + 1) * self.dim]
    }

    /// Interior and boundary samples together (the sampled closure).
    pub fn all_points(&self) -> Vec<f64> {
        let mut v = self.interior_points.clone();
        v.extend_from_slice(&self.boundary_points);
        v
    }

    pub fn boundary_cloud(&self) -> PointCloud {
        PointCloud::new(self.dim, &self.boundary_points)
    }

    pub fn closure_cloud(&self) -> PointCloud {
        PointCloud::new(self.dim, &self.all_points())
    }

    /// Sign test against the nearest boundary sample: inside unless the
    /// point lies more than `tolerance` along that sample's outward normal.
    pub fn contains(&self, p: &[f64]) -> bool {
        self.membership(&self.boundary_cloud(), p)
    }

    pub(crate) fn membership(&self, boundary: &PointCloud, p: &[f64]) -> bool {
        match boundary.nearest(p) {
            None => false,
            Some((i, _)) => {
                let b = self.boundary_point(i);
                let nv = self.normal(i);
                let along: f64 = p.iter().zip(b).zip(nv).map(|((pi, bi), ni)| (pi - bi) * ni).sum();
                along <= self.tolerance
            }
        }
    }

    /// CSV rows `x_1..x_n,boundary,nu_1..nu_n`.
    pub fn to_csv(&self) -> String {
        let n = self.dim;
        let mut out = String::new();
        let xs: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        let nus: Vec<String> = (1..=n).map(|i| format!("nu{i}")).collect();
        out.push_str(&format!("{},boundary,{}\n", xs.join(","), nus.join(",")));
        let zeros = vec!["0".to_string(); n].join(",");
        for p in self.interior_points.chunks(n) {
            let c: Vec<String> = p.iter().map(|v| format!("{v:e}")).collect();
            out.push_str(&format!("{},0,{}\n", c.join(","), zeros));
        }
        for i in 0..self.boundary_count() {
            let c: Vec<String> = self.boundary_point(i).iter().map(|v| format!("{v:e}")).collect();
            let nv: Vec<String> = self.normal(i).iter().map(|v| format!("{v:e}")).collect();
            out.push_str(&format!("{},1,{}\n", c.join(","), nv.join(",")));
        }
        out
    }
}

fn check_pair(a: &DomainSnapshot, b: &DomainSnapshot) -> Result<()> {
    if a.dim != b.dim {
        return invalid(format!("dimension mismatch {} vs {}", a.dim, b.dim));
    }
    if a.all_points().is_empty() || b.all_points().is_empty() {
        return invalid("empty point cloud");
    }
    Ok(())
}

fn directed(from: &[f64], dim: usize, to: &PointCloud) -> f64 {
    from.chunks(dim).map(|p| to.distance(p)).fold(0.0, f64::max)
}

/// max{sup_{x∈A} dist(x, B), sup_{y∈B} dist(y, A)} over the sampled closures.
pub fn hausdorff_distance(a: &DomainSnapshot, b: &DomainSnapshot) -> Result<f64> {
    check_pair(a, b)?;
    let (pa, pb) = (a.all_points(), b.all_points());
    let (ca, cb) = (PointCloud::new(a.dim, &pa), PointCloud::new(b.dim, &pb));
    Ok(directed(&pa, a.dim, &cb).max(directed(&pb, b.dim, &ca)))
}

/// max{sup_{x∈∂A} dist(x, closure B), sup_{y∈∂B} dist(y, closure A)}.
/// Boundary samples are a subset of the closure samples, so d_m ≤ d exactly.
pub fn modified_distance(a: &DomainSnapshot, b: &DomainSnapshot) -> Result<f64> {
    check_pair(a, b)?;
    if a.boundary_points.is_empty() || b.boundary_points.is_empty() {
        return invalid("modified distance needs boundary samples on both sides");
    }
    let (ca, cb) = (a.closure_cloud(), b.closure_cloud());
    Ok(directed(&a.boundary_points, a.dim, &cb).max(directed(&b.boundary_points, b.dim, &ca)))
}

/// {x ∈ G : B_δ(x) ⊂ G}: interior samples at boundary distance ≥ δ, and the
/// boundary pushed inward by δ along the normals where it stays δ-clear.
pub fn interior_shrink(g: &DomainSnapshot, delta: f64) -> Result<DomainSnapshot> {
    if !(delta >= 0.0) {
        return Err(Error::InvalidInput(format!("delta = {delta} must be nonnegative")));
    }
    if delta == 0.0 {
        return Ok(g.clone());
    }
    let n = g.dim;
    let bc = g.boundary_cloud();
    let slack = 1e-9 * (1.0 + delta);
    let mut interior = Vec::new();
    for p in g.interior_points.chunks(n) {
        if bc.distance(p) >= delta - slack {
            interior.extend_from_slice(p);
        }
    }
    let mut boundary = Vec::new();
    let mut normals = Vec::new();
    if !interior.is_empty() {
        for i in 0..g.boundary_count() {
            let q: Vec<f64> = g.boundary_point(i).iter().zip(g.normal(i)).map(|(b, v)| b - delta * v).collect();
            if bc.distance(&q) >= delta - 0.5 * g.spacing && g.membership(&bc, &q) {
                boundary.extend_from_slice(&q);
                normals.extend_from_slice(g.normal(i));
            }
        }
    }
    let mut out = DomainSnapshot::new(g.time, n, interior, boundary, normals, g.spacing)?;
    out.tolerance = g.tolerance;
    out.empty = out.interior_points.is_empty();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_unit_normals() {
        assert!(DomainSnapshot::new(0.0, 1, vec![0.5], vec![0.0, 1.0], vec![-1.0, 2.0], 0.1).is_err());
    }

    #[test]
    fn interval_distances() {
        let a = DomainSnapshot::interval(0.0, 0.0, 1.0, 0.01).unwrap();
        let b = DomainSnapshot::interval(0.0, 0.0, 1.2, 0.01).unwrap();
        assert!((hausdorff_distance(&a, &b).unwrap() - 0.2).abs() < 0.02);
        assert!((modified_distance(&a, &b).unwrap() - 0.2).abs() < 0.02);
    }

    #[test]
    fn l_shape_normals_outward() {
        let g = DomainSnapshot::l_shape(0.0, 1.0, 0.05).unwrap();
        for i in 0..g.boundary_count() {
            let p = g.boundary_point(i);
            let nv = g.normal(i);
            let out = [p[0] + 0.02 * nv[0], p[1] + 0.02 * nv[1]];
            let inside = out[0] > 0.0 && out[1] > 0.0 && out[0] < 2.0 && out[1] < 2.0 && !(out[0] > 1.0 && out[1] > 1.0);
            assert!(!inside, "normal at {p:?} points inward");
        }
    }

    #[test]
    fn csv_has_header_and_rows() {
        let g = DomainSnapshot::interval(0.0, 0.0, 1.0, 0.25).unwrap();
        let csv = g.to_csv();
        assert!(csv.starts_with("x1,boundary,nu1\n"));
        assert_eq!(csv.lines().count(), 1 + 3 + 2);
    }
}
