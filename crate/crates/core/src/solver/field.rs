//! Ensembles of pulled-back solution samples and their evaluation at
//! physical points.

use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::geometry::{BoundaryPart, MovingDomain};
use crate::stochastic::NoiseKey;

use super::coefficients::SPDECoefficients;
use super::grid::{GridSpec, ReferenceGrid};

/// Nodal values of every stored path at one time slice.
#[derive(Debug, Clone)]
pub struct Slice {
    pub step: usize,
    pub time: f64,
    /// Path-major: `values[p·n + i]` is node i of stored path p.
    pub values: Vec<f64>,
}

/// One path's pulled-back trajectory at the stored slices.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSample {
    pub path_index: usize,
    pub times: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

/// Linear functional of the nodal values giving u and ∇u at a physical
/// point: u = offset + Σ weights·v, ∂_i u = grad_offset[i] + Σ grad_weights[i]·v.
#[derive(Debug, Clone)]
pub struct Probe {
    pub nodes: Vec<usize>,
    pub weights: Vec<f64>,
    pub grad_weights: Vec<Vec<f64>>,
    pub offset: f64,
    pub grad_offset: Vec<f64>,
}

impl Probe {
    pub fn value(&self, v: &[f64]) -> f64 {
        self.offset + self.nodes.iter().zip(&self.weights).map(|(n, w)| w * v[*n]).sum::<f64>()
    }

    pub fn gradient(&self, v: &[f64]) -> Vec<f64> {
        self.grad_weights
            .iter()
            .zip(&self.grad_offset)
            .map(|(gw, o)| o + self.nodes.iter().zip(gw).map(|(n, w)| w * v[*n]).sum::<f64>())
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct EnsembleField {
    pub domain: MovingDomain,
    pub coeffs: SPDECoefficients,
    pub grid: Arc<ReferenceGrid>,
    pub spec: GridSpec,
    pub times: Arc<Vec<f64>>,
    pub key: NoiseKey,
    pub n_paths: usize,
    /// 1 when the noise does not enter and all paths coincide.
    pub(crate) stored_paths: usize,
    pub slices: Vec<Slice>,
}

impl EnsembleField {
    pub fn nodes(&self) -> usize {
        self.grid.len()
    }

    pub fn h(&self) -> f64 {
        self.grid.h
    }

    pub fn dt(&self) -> f64 {
        self.times[1] - self.times[0]
    }

    /// All paths share one trajectory.
    pub fn is_deterministic(&self) -> bool {
        self.stored_paths == 1
    }

    pub fn slice_times(&self) -> Vec<f64> {
        self.slices.iter().map(|s| s.time).collect()
    }

    /// Index of the stored slice nearest to t.
    pub fn nearest_slice(&self, t: f64) -> usize {
        let mut best = 0;
        for (i, s) in self.slices.iter().enumerate() {
            if (s.time - t).abs() < (self.slices[best].time - t).abs() {
                best = i;
            }
        }
        best
    }

    /// Stored slice at time t within a quarter step.
    pub fn slice_at(&self, t: f64) -> Result<usize> {
        let i = self.nearest_slice(t);
        if (self.slices[i].time - t).abs() > 0.25 * self.dt() {
            return invalid(format!(
                "no stored slice at t = {t} (nearest {}); lower the stride",
                self.slices[i].time
            ));
        }
        Ok(i)
    }

    /// Nodal values of path p at stored slice s.
    pub fn path_values(&self, s: usize, p: usize) -> &[f64] {
        let n = self.nodes();
        let q = if self.stored_paths == 1 { 0 } else { p };
        &self.slices[s].values[q * n..(q + 1) * n]
    }

    pub fn sample(&self, p: usize) -> FieldSample {
        FieldSample {
            path_index: p,
            times: self.slice_times(),
            values: (0..self.slices.len()).map(|s| self.path_values(s, p).to_vec()).collect(),
        }
    }

    /// Path-ordered nodal second moment E[v²] at slice s.
    pub fn second_moment(&self, s: usize) -> Vec<f64> {
        let n = self.nodes();
        let mut acc = vec![0.0; n];
        for p in 0..self.stored_paths {
            for (a, v) in acc.iter_mut().zip(self.path_values(s, p)) {
                *a += v * v;
            }
        }
        acc.iter().map(|a| a / self.stored_paths as f64).collect()
    }

    /// Probe at physical x for stored slice s; None when x ∉ closure of G(t).
    pub fn probe(&self, s: usize, x: &[f64]) -> Result<Option<Probe>> {
        let t = self.slices[s].time;
        probe_at(&self.domain, &self.grid, &self.coeffs, t, x)
    }

    /// Number of distinct stored trajectories.
    pub fn stored_paths(&self) -> usize {
        self.stored_paths
    }
}

/// Bilinear (linear in 1-D) interpolation probe of the reference grid at
/// y = ρ(t, x), with the chain rule for ∂_x.
pub fn probe_at(
    domain: &MovingDomain,
    grid: &ReferenceGrid,
    coeffs: &SPDECoefficients,
    t: f64,
    x: &[f64],
) -> Result<Option<Probe>> {
    let dim = grid.dim;
    if x.len() != dim {
        return invalid(format!("point has {} coordinates, grid has {dim}", x.len()));
    }
    let y = domain.rho(t, x);
    if !domain.reference.contains(&y, 1e-10 * domain.reference.scale()) {
        return Ok(None);
    }
    let jac = domain.pullback_jacobians(t, &y)?;
    let ((i, j), [wx, wy]) = grid.cell_of(&y);
    let h = grid.h;
    let f_t = coeffs.f.eval(t);
    // Corners with their bilinear weight and reference-gradient weights.
    let corners: Vec<((i64, i64), f64, [f64; 2])> = if dim == 1 {
        vec![((0, 0), 1.0 - wx, [-1.0 / h, 0.0]), ((1, 0), wx, [1.0 / h, 0.0])]
    } else {
        vec![
            ((0, 0), (1.0 - wx) * (1.0 - wy), [-(1.0 - wy) / h, -(1.0 - wx) / h]),
            ((1, 0), wx * (1.0 - wy), [(1.0 - wy) / h, -wx / h]),
            ((0, 1), (1.0 - wx) * wy, [-wy / h, (1.0 - wx) / h]),
            ((1, 1), wx * wy, [wy / h, wx / h]),
        ]
    };
    let mut probe = Probe {
        nodes: Vec::with_capacity(corners.len()),
        weights: Vec::with_capacity(corners.len()),
        grad_weights: vec![Vec::with_capacity(corners.len()); dim],
        offset: 0.0,
        grad_offset: vec![0.0; dim],
    };
    for ((di, dj), w, gref) in corners {
        let (ci, cj) = (i as i64 + di, j as i64 + dj);
        // ∂_{x_r} = Σ_k ∂_{x_r}ρ_k ∂_{y_k}.
        let gphys: Vec<f64> = (0..dim).map(|r| (0..dim).map(|k| jac.grad[r][k] * gref[k]).sum()).collect();
        match grid.at(ci, cj) {
            Some(node) => {
                probe.nodes.push(node);
                probe.weights.push(w);
                for r in 0..dim {
                    probe.grad_weights[r].push(gphys[r]);
                }
            }
            None => {
                // Lattice corner outside the stored nodes carries its boundary value.
                let yc = [grid.origin[0] + ci as f64 * h, grid.origin[1] + cj as f64 * h];
                let val = match domain.boundary_part(&yc[..dim]) {
                    BoundaryPart::Fixed => f_t,
                    BoundaryPart::Moving => 0.0,
                };
                probe.offset += w * val;
                for r in 0..dim {
                    probe.grad_offset[r] += gphys[r] * val;
                }
            }
        }
    }
    Ok(Some(probe))
}
