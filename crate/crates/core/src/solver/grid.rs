//! Structured grids on the reference domain G(0).

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::{BoundaryPart, MovingDomain, ReferenceDomain};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Interior,
    Dirichlet(BoundaryPart),
}

/// Discretization parameters of a forward solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// 1-D: cells on (0, L0). 2-D: lattice cells across the reference diameter.
    pub cells: usize,
    pub steps: usize,
    /// Implicitness of the θ-scheme; 1 is backward Euler, ½ is Crank–Nicolson.
    #[serde(default = "default_theta")]
    pub theta: f64,
    /// Store every `stride`-th time slice (plus the first and last).
    #[serde(default = "default_stride")]
    pub stride: usize,
}

fn default_theta() -> f64 {
    0.5
}

fn default_stride() -> usize {
    128
}

impl Default for GridSpec {
    /// 128 cells, 512 steps, Crank–Nicolson.
    fn default() -> Self {
        GridSpec::new(128, 512)
    }
}

impl GridSpec {
    pub fn new(cells: usize, steps: usize) -> Self {
        GridSpec { cells, steps, theta: default_theta(), stride: default_stride() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.cells < 2 || self.steps < 1 || self.stride < 1 {
            return invalid(format!("grid needs cells >= 2, steps >= 1, stride >= 1 (got {self:?})"));
        }
        if !(0.0..=1.0).contains(&self.theta) {
            return invalid(format!("theta = {} outside [0, 1]", self.theta));
        }
        Ok(())
    }
}

/// Lattice nodes of G(0) that carry unknowns or Dirichlet values.
///
/// Nodes sit at `origin + (i, j)·h`; in 1-D `ny = 1`. Interior nodes lie
/// strictly inside G(0). Every lattice neighbour (including diagonals) of an
/// interior node is a node.
#[derive(Debug, Clone)]
pub struct ReferenceGrid {
    pub dim: usize,
    pub h: f64,
    pub origin: [f64; 2],
    pub nx: usize,
    pub ny: usize,
    /// Node coordinates, `dim` per node.
    pub coords: Vec<f64>,
    pub kinds: Vec<NodeKind>,
    /// Lattice position of each node.
    pub lattice: Vec<(usize, usize)>,
    /// Node index at lattice slot i + j·nx.
    slot: Vec<Option<usize>>,
}

impl ReferenceGrid {
    pub fn new(domain: &MovingDomain, cells: usize) -> Result<Self> {
        if cells < 2 {
            return invalid("reference grid needs at least 2 cells");
        }
        match &domain.reference {
            ReferenceDomain::Interval { length } => {
                let h = length / cells as f64;
                let mut coords = Vec::with_capacity(cells + 1);
                let mut kinds = Vec::with_capacity(cells + 1);
                for j in 0..=cells {
                    let y = if j == cells { *length } else { j as f64 * h };
                    coords.push(y);
                    kinds.push(if j == 0 || j == cells {
                        NodeKind::Dirichlet(domain.boundary_part(&[y]))
                    } else {
                        NodeKind::Interior
                    });
                }
                Ok(ReferenceGrid {
                    dim: 1,
                    h,
                    origin: [0.0, 0.0],
                    nx: cells + 1,
                    ny: 1,
                    coords,
                    kinds,
                    lattice: (0..=cells).map(|j| (j, 0)).collect(),
                    slot: (0..=cells).map(Some).collect(),
                })
            }
            ReferenceDomain::Star { center, radial } => {
                let rmax = (0..720)
                    .map(|k| radial.eval(k as f64 * std::f64::consts::PI / 360.0).0)
                    .fold(0.0, f64::max);
                let h = 2.0 * rmax / cells as f64;
                let pad = 2;
                let nx = cells + 1 + 2 * pad;
                let origin = [center[0] - rmax - pad as f64 * h, center[1] - rmax - pad as f64 * h];
                let reference = &domain.reference;
                let tol = -1e-12 * reference.scale();
                let inside = |i: usize, j: usize| {
                    reference.contains(&[origin[0] + i as f64 * h, origin[1] + j as f64 * h], tol)
                };
                let mut interior = vec![false; nx * nx];
                for j in 0..nx {
                    for i in 0..nx {
                        interior[i + j * nx] = inside(i, j);
                    }
                }
                let mut slot = vec![None; nx * nx];
                let mut coords = Vec::new();
                let mut kinds = Vec::new();
                let mut lattice = Vec::new();
                for j in 0..nx {
                    for i in 0..nx {
                        let near_interior = interior[i + j * nx]
                            || (-1i64..=1).any(|dj| {
                                (-1i64..=1).any(|di| {
                                    let (a, b) = (i as i64 + di, j as i64 + dj);
                                    a >= 0 && b >= 0 && (a as usize) < nx && (b as usize) < nx && interior[a as usize + b as usize * nx]
                                })
                            });
                        if !near_interior {
                            continue;
                        }
                        let y = [origin[0] + i as f64 * h, origin[1] + j as f64 * h];
                        slot[i + j * nx] = Some(kinds.len());
                        coords.extend_from_slice(&y);
                        lattice.push((i, j));
                        kinds.push(if interior[i + j * nx] {
                            NodeKind::Interior
                        } else {
                            NodeKind::Dirichlet(domain.boundary_part(&y))
                        });
                    }
                }
                if !kinds.contains(&NodeKind::Interior) {
                    return invalid("reference grid has no interior nodes; increase cells");
                }
                Ok(ReferenceGrid { dim: 2, h, origin, nx, ny: nx, coords, kinds, lattice, slot })
            }
        }
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn is_interior(&self, i: usize) -> bool {
        self.kinds[i] == NodeKind::Interior
    }

    pub fn interior_count(&self) -> usize {
        self.kinds.iter().filter(|k| **k == NodeKind::Interior).count()
    }

    /// Node at lattice position (i, j), when present.
    pub fn at(&self, i: i64, j: i64) -> Option<usize> {
        if i < 0 || j < 0 || i as usize >= self.nx || j as usize >= self.ny {
            return None;
        }
        self.slot[i as usize + j as usize * self.nx]
    }

    /// Lattice cell containing reference point y and its local coordinates
    /// in [0, 1]^dim; clamped to the lattice.
    pub fn cell_of(&self, y: &[f64]) -> ((usize, usize), [f64; 2]) {
        let locate = |v: f64, o: f64, n: usize| -> (usize, f64) {
            let s = (v - o) / self.h;
            let c = (s.floor().max(0.0) as usize).min(n.saturating_sub(2));
            (c, (s - c as f64).clamp(0.0, 1.0))
        };
        let (i, wx) = locate(y[0], self.origin[0], self.nx);
        if self.dim == 1 {
            return ((i, 0), [wx, 0.0]);
        }
        let (j, wy) = locate(y[1], self.origin[1], self.ny);
        ((i, j), [wx, wy])
    }

    /// Dirichlet value of node i at time t: f on Γ, 0 on I.
    pub fn dirichlet_value(&self, i: usize, f_t: f64) -> f64 {
        match self.kinds[i] {
            NodeKind::Dirichlet(BoundaryPart::Fixed) => f_t,
            _ => 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{FixedBoundary, Motion, RadialProfile};

    #[test]
    fn interval_grid_ends() {
        let d = MovingDomain::static_interval(2.0, 1.0).unwrap();
        let g = ReferenceGrid::new(&d, 8).unwrap();
        assert_eq!(g.len(), 9);
        assert_eq!(g.kinds[0], NodeKind::Dirichlet(BoundaryPart::Fixed));
        assert_eq!(g.kinds[8], NodeKind::Dirichlet(BoundaryPart::Moving));
        assert_eq!(g.interior_count(), 7);
        assert_eq!(g.point(8)[0], 2.0);
    }

    #[test]
    fn star_grid_interior_neighbours_exist() {
        let d = MovingDomain::new(
            ReferenceDomain::Star { center: [0.0, 0.0], radial: RadialProfile::circle(1.0) },
            Motion::Identity,
            1.0,
            FixedBoundary::Arc { lo: -0.5, hi: 0.5 },
            "rest",
        )
        .unwrap();
        let g = ReferenceGrid::new(&d, 20).unwrap();
        for n in 0..g.len() {
            if !g.is_interior(n) {
                continue;
            }
            let (i, j) = g.lattice[n];
            for dj in -1..=1 {
                for di in -1..=1 {
                    assert!(g.at(i as i64 + di, j as i64 + dj).is_some());
                }
            }
        }
        let fixed = g.kinds.iter().filter(|k| **k == NodeKind::Dirichlet(BoundaryPart::Fixed)).count();
        assert!(fixed > 0);
    }
}
