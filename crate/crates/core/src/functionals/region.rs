//! Quadrature over region ∩ G(t) at physical points.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::{MovingDomain, ReferenceDomain};
use crate::solver::{EnsembleField, Probe};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    Ball { center: Vec<f64>, radius: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// The whole of G(t).
    Everywhere,
}

impl Region {
    pub fn ball(center: &[f64], radius: f64) -> Self {
        Region::Ball { center: center.to_vec(), radius }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Region::Ball { center, radius } => {
                x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() < radius * radius
            }
            Region::Box { lo, hi } => x.iter().zip(lo.iter().zip(hi)).all(|(v, (l, h))| *v > *l && *v < *h),
            Region::Everywhere => true,
        }
    }

    /// Sample of closure points used for containment checks.
    pub fn outline(&self) -> Vec<Vec<f64>> {
        match self {
            Region::Ball { center, radius } if center.len() == 1 => {
                vec![vec![center[0] - radius], vec![center[0] + radius]]
            }
            Region::Ball { center, radius } => (0..64)
                .map(|k| {
                    let a = 2.0 * std::f64::consts::PI * k as f64 / 64.0;
                    vec![center[0] + radius * a.cos(), center[1] + radius * a.sin()]
                })
                .collect(),
            Region::Box { lo, hi } if lo.len() == 1 => vec![lo.clone(), hi.clone()],
            Region::Box { lo, hi } => {
                let mut v = Vec::new();
                for k in 0..=16 {
                    let s = k as f64 / 16.0;
                    let x = lo[0] + s * (hi[0] - lo[0]);
                    let y = lo[1] + s * (hi[1] - lo[1]);
                    v.extend([vec![x, lo[1]], vec![x, hi[1]], vec![lo[0], y], vec![hi[0], y]]);
                }
                v
            }
            Region::Everywhere => vec![],
        }
    }

    fn bbox(&self, domain: &MovingDomain, t: f64) -> (Vec<f64>, Vec<f64>) {
        match self {
            Region::Ball { center, radius } => {
                (center.iter().map(|c| c - radius).collect(), center.iter().map(|c| c + radius).collect())
            }
            Region::Box { lo, hi } => (lo.clone(), hi.clone()),
            Region::Everywhere => domain_bbox(domain, t),
        }
    }
}

/// Bounding box of G(t).
pub fn domain_bbox(domain: &MovingDomain, t: f64) -> (Vec<f64>, Vec<f64>) {
    match &domain.reference {
        ReferenceDomain::Interval { length } => {
            let (a, b) = (domain.tau(t, &[0.0])[0], domain.tau(t, &[*length])[0]);
            (vec![a.min(b)], vec![a.max(b)])
        }
        ReferenceDomain::Star { center, radial } => {
            let mut lo = vec![f64::INFINITY; 2];
            let mut hi = vec![f64::NEG_INFINITY; 2];
            for k in 0..720 {
                let a = 2.0 * std::f64::consts::PI * k as f64 / 720.0;
                let r = radial.eval(a).0;
                let p = domain.tau(t, &[center[0] + r * a.cos(), center[1] + r * a.sin()]);
                for d in 0..2 {
                    lo[d] = lo[d].min(p[d]);
                    hi[d] = hi[d].max(p[d]);
                }
            }
            (lo, hi)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureNode {
    pub x: Vec<f64>,
    pub weight: f64,
}

/// Nodes and weights for ∫_{region ∩ G(t)} at physical spacing ≈ h.
///
/// 1-D: midpoint rule on the exact intersection interval. 2-D: cells of
/// side h/2 with the cut fraction from 3×3 sub-samples, placed at the
/// centroid of the included sub-samples.
pub fn quadrature_nodes(domain: &MovingDomain, t: f64, region: &Region, h: f64) -> Result<Vec<QuadratureNode>> {
    if !(h > 0.0) {
        return invalid(format!("quadrature spacing h = {h} must be positive"));
    }
    let (lo, hi) = region.bbox(domain, t);
    if lo.len() != domain.dim() {
        return invalid(format!("region has dimension {}, domain {}", lo.len(), domain.dim()));
    }
    if domain.dim() == 1 {
        let (dlo, dhi) = domain_bbox(domain, t);
        let (a, b) = (lo[0].max(dlo[0]), hi[0].min(dhi[0]));
        if !(b > a) {
            return Ok(vec![]);
        }
        let m = ((b - a) / h * 2.0).ceil().max(8.0) as usize;
        let w = (b - a) / m as f64;
        return Ok((0..m).map(|i| QuadratureNode { x: vec![a + (i as f64 + 0.5) * w], weight: w }).collect());
    }
    let (dlo, dhi) = domain_bbox(domain, t);
    let lo = [lo[0].max(dlo[0]), lo[1].max(dlo[1])];
    let hi = [hi[0].min(dhi[0]), hi[1].min(dhi[1])];
    if !(hi[0] > lo[0] && hi[1] > lo[1]) {
        return Ok(vec![]);
    }
    let hq = 0.5 * h;
    let nx = ((hi[0] - lo[0]) / hq).ceil() as usize;
    let ny = ((hi[1] - lo[1]) / hq).ceil() as usize;
    let mut nodes = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let mut count = 0usize;
            let mut sum = [0.0; 2];
            for sj in 0..3 {
                for si in 0..3 {
                    let p = [lo[0] + (i as f64 + (si as f64 + 0.5) / 3.0) * hq, lo[1] + (j as f64 + (sj as f64 + 0.5) / 3.0) * hq];
                    if region.contains(&p) && domain.contains(t, &p) {
                        count += 1;
                        sum[0] += p[0];
                        sum[1] += p[1];
                    }
                }
            }
            if count > 0 {
                let c = count as f64;
                nodes.push(QuadratureNode { x: vec![sum[0] / c, sum[1] / c], weight: c / 9.0 * hq * hq });
            }
        }
    }
    Ok(nodes)
}

/// Quadrature prepared against one stored slice of a field.
#[derive(Debug, Clone)]
pub struct SliceQuadrature {
    pub slice: usize,
    pub time: f64,
    pub nodes: Vec<QuadratureNode>,
    probes: Vec<Probe>,
}

/// Physical spacing of the field's grid at slice time t.
pub fn physical_spacing(field: &EnsembleField, t: f64) -> f64 {
    match &field.domain.reference {
        ReferenceDomain::Interval { length } => {
            let s = (field.domain.tau(t, &[*length])[0] - field.domain.tau(t, &[0.0])[0]).abs();
            field.h() * s / length
        }
        ReferenceDomain::Star { .. } => field.h(),
    }
}

impl SliceQuadrature {
    pub fn new(field: &EnsembleField, slice: usize, region: &Region) -> Result<Self> {
        let t = field.slices[slice].time;
        Self::with_spacing(field, slice, region, physical_spacing(field, t))
    }

    pub fn with_spacing(field: &EnsembleField, slice: usize, region: &Region, h: f64) -> Result<Self> {
        let t = field.slices[slice].time;
        let raw = quadrature_nodes(&field.domain, t, region, h)?;
        let mut nodes = Vec::with_capacity(raw.len());
        let mut probes = Vec::with_capacity(raw.len());
        for n in raw {
            if let Some(p) = field.probe(slice, &n.x)? {
                nodes.push(n);
                probes.push(p);
            }
        }
        Ok(SliceQuadrature { slice, time: t, nodes, probes })
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn measure(&self) -> f64 {
        self.nodes.iter().map(|n| n.weight).sum()
    }

    /// ∫ f(u, ∇u, x) dx for path p.
    pub fn integrate(&self, field: &EnsembleField, p: usize, f: &dyn Fn(f64, &[f64], &[f64]) -> f64) -> f64 {
        let v = field.path_values(self.slice, p);
        self.nodes
            .iter()
            .zip(&self.probes)
            .map(|(n, pr)| n.weight * f(pr.value(v), &pr.gradient(v), &n.x))
            .sum()
    }

    /// ∫ u² dx for path p.
    pub fn mass(&self, field: &EnsembleField, p: usize) -> f64 {
        let v = field.path_values(self.slice, p);
        self.nodes
            .iter()
            .zip(&self.probes)
            .map(|(n, pr)| {
                let u = pr.value(v);
                n.weight * u * u
            })
            .sum()
    }

    /// u at every node for path p.
    pub fn values(&self, field: &EnsembleField, p: usize) -> Vec<f64> {
        let v = field.path_values(self.slice, p);
        self.probes.iter().map(|pr| pr.value(v)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{FixedBoundary, Motion, RadialProfile};

    #[test]
    fn interval_intersection_length() {
        let d = MovingDomain::static_interval(1.0, 1.0).unwrap();
        let q = quadrature_nodes(&d, 0.0, &Region::ball(&[0.9], 0.3), 0.01).unwrap();
        let len: f64 = q.iter().map(|n| n.weight).sum();
        assert!((len - 0.4).abs() < 1e-12);
        assert!(quadrature_nodes(&d, 0.0, &Region::ball(&[3.0], 0.3), 0.01).unwrap().is_empty());
    }

    #[test]
    fn disc_area() {
        let d = MovingDomain::new(
            ReferenceDomain::Star { center: [0.0, 0.0], radial: RadialProfile::circle(1.0) },
            Motion::Identity,
            1.0,
            FixedBoundary::Arc { lo: 0.0, hi: 1.0 },
            "rest",
        )
        .unwrap();
        let q = quadrature_nodes(&d, 0.0, &Region::ball(&[0.2, 0.1], 0.5), 0.02).unwrap();
        let area: f64 = q.iter().map(|n| n.weight).sum();
        assert!((area / (std::f64::consts::PI * 0.25) - 1.0).abs() < 2e-3, "{area}");
    }
}
