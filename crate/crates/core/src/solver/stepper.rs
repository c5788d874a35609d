//! θ-scheme time stepping of the pulled-back equation with explicit Itô noise:
//! (I − θΔt L^{k+1}) v^{k+1} = (I + (1−θ)Δt L^k) v^k + c1 v^k ΔW_k,
//! Dirichlet rows pinned to f on Γ and 0 on I.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::geometry::MovingDomain;
use crate::stochastic::Ensemble;

use super::coefficients::SPDECoefficients;
use super::field::{EnsembleField, Slice};
use super::grid::{GridSpec, ReferenceGrid};
use super::linalg::{bicgstab, Tridiagonal};
use super::operator::{assemble_operator, PullbackOperator};

enum Implicit {
    Tri(Tridiagonal),
    Sparse { indptr: Vec<usize>, indices: Vec<usize>, values: Vec<f64>, diag: Vec<f64> },
}

/// Everything one step needs, shared by all paths.
struct StepSystem {
    explicit: PullbackOperator,
    explicit_weight: f64,
    implicit: Implicit,
    /// c1 at the physical location of each node at t_k.
    noise: Vec<f64>,
    /// Dirichlet values at t_{k+1}.
    pinned: Vec<(usize, f64)>,
}

impl StepSystem {
    fn advance(&self, state: &mut [f64], dw: f64, scratch: &mut Vec<f64>) -> Result<()> {
        let n = state.len();
        scratch.resize(n, 0.0);
        self.explicit.apply(state, scratch);
        for i in 0..n {
            scratch[i] = state[i] + self.explicit_weight * scratch[i] + self.noise[i] * state[i] * dw;
        }
        for &(i, g) in &self.pinned {
            scratch[i] = g;
        }
        match &self.implicit {
            Implicit::Tri(f) => {
                f.solve_in_place(scratch);
                state.copy_from_slice(scratch);
            }
            Implicit::Sparse { indptr, indices, values, diag } => {
                let mv = |v: &[f64], out: &mut [f64]| {
                    for (i, o) in out.iter_mut().enumerate() {
                        let r = indptr[i]..indptr[i + 1];
                        *o = indices[r.clone()].iter().zip(&values[r]).map(|(c, a)| a * v[*c]).sum();
                    }
                };
                for &(i, g) in &self.pinned {
                    state[i] = g;
                }
                bicgstab(&mv, diag, scratch, state, 1e-12, 2000)?;
            }
        }
        for &(i, g) in &self.pinned {
            state[i] = g;
        }
        Ok(())
    }
}

pub struct Stepper<'a> {
    pub domain: &'a MovingDomain,
    pub coeffs: &'a SPDECoefficients,
    pub grid: &'a ReferenceGrid,
    pub theta: f64,
    noise_static: bool,
}

impl<'a> Stepper<'a> {
    pub fn new(domain: &'a MovingDomain, coeffs: &'a SPDECoefficients, grid: &'a ReferenceGrid, theta: f64) -> Result<Self> {
        coeffs.validate(domain)?;
        if !(0.0..=1.0).contains(&theta) {
            return invalid(format!("theta = {theta} outside [0, 1]"));
        }
        let noise_static = matches!(coeffs.c1, super::coefficients::ScalarField::Constant { .. });
        Ok(Stepper { domain, coeffs, grid, theta, noise_static })
    }

    pub fn operator(&self, t: f64) -> Result<PullbackOperator> {
        assemble_operator(self.domain, self.grid, Some(self.coeffs), t)
    }

    /// v(0, ·) = u0 at interior nodes, Dirichlet data on boundary nodes.
    pub fn initial_state(&self) -> Vec<f64> {
        let f0 = self.coeffs.f.eval(0.0);
        (0..self.grid.len())
            .map(|i| {
                if self.grid.is_interior(i) {
                    self.coeffs.u0.eval(&self.domain.reference, self.grid.point(i))
                } else {
                    self.grid.dirichlet_value(i, f0)
                }
            })
            .collect()
    }

    fn pinned(&self, t: f64) -> Vec<(usize, f64)> {
        let f = self.coeffs.f.eval(t);
        (0..self.grid.len()).filter(|i| !self.grid.is_interior(*i)).map(|i| (i, self.grid.dirichlet_value(i, f))).collect()
    }

    fn noise(&self, t: f64) -> Vec<f64> {
        (0..self.grid.len())
            .map(|i| {
                if !self.grid.is_interior(i) {
                    0.0
                } else if let (true, super::coefficients::ScalarField::Constant { value }) = (self.noise_static, &self.coeffs.c1) {
                    *value
                } else {
                    self.coeffs.c1.eval(&self.domain.tau(t, self.grid.point(i)))
                }
            })
            .collect()
    }

    fn system(&self, l_k: PullbackOperator, l_k1: &PullbackOperator, t_k: f64, t_k1: f64) -> Result<StepSystem> {
        let dt = t_k1 - t_k;
        let w = self.theta * dt;
        let n = self.grid.len();
        let implicit = if self.grid.dim == 1 {
            let mut lo = vec![0.0; n];
            let mut di = vec![1.0; n];
            let mut up = vec![0.0; n];
            for i in 0..n {
                if !self.grid.is_interior(i) {
                    continue;
                }
                lo[i] = -w * l_k1.entry(i, i - 1);
                di[i] = 1.0 - w * l_k1.entry(i, i);
                up[i] = -w * l_k1.entry(i, i + 1);
            }
            Implicit::Tri(Tridiagonal::factor(&lo, &di, &up)?)
        } else {
            let mut indptr = vec![0];
            let mut indices = Vec::new();
            let mut values = Vec::new();
            let mut diag = vec![1.0; n];
            for (i, d) in diag.iter_mut().enumerate() {
                if self.grid.is_interior(i) {
                    let (cols, vals) = l_k1.row(i);
                    for (c, a) in cols.iter().zip(vals) {
                        let v = if *c == i { 1.0 - w * a } else { -w * a };
                        if *c == i {
                            *d = v;
                        }
                        indices.push(*c);
                        values.push(v);
                    }
                } else {
                    indices.push(i);
                    values.push(1.0);
                }
                indptr.push(indices.len());
            }
            Implicit::Sparse { indptr, indices, values, diag }
        };
        Ok(StepSystem {
            explicit: l_k,
            explicit_weight: (1.0 - self.theta) * dt,
            implicit,
            noise: self.noise(t_k),
            pinned: self.pinned(t_k1),
        })
    }

    /// One step of a single path from t_k to t_k1 with increment dw.
    pub fn step(&self, state: &[f64], t_k: f64, t_k1: f64, dw: f64) -> Result<Vec<f64>> {
        if state.len() != self.grid.len() {
            return invalid(format!("state has {} values, grid has {} nodes", state.len(), self.grid.len()));
        }
        let sys = self.system(self.operator(t_k)?, &self.operator(t_k1)?, t_k, t_k1)?;
        let mut out = state.to_vec();
        let mut scratch = Vec::new();
        sys.advance(&mut out, dw, &mut scratch)?;
        Ok(out)
    }
}

/// Solves every path of `ensemble` on its time grid and stores slices at
/// `spec.stride`. Without noise a single trajectory is computed and shared.
pub fn solve(domain: &MovingDomain, coeffs: &SPDECoefficients, ensemble: &Ensemble, spec: &GridSpec) -> Result<EnsembleField> {
    spec.validate()?;
    let times = ensemble.times.clone();
    if ensemble.steps() != spec.steps {
        return invalid(format!("ensemble has {} steps, grid spec {}", ensemble.steps(), spec.steps));
    }
    let horizon = *times.last().expect("nonempty grid");
    if horizon > domain.horizon * (1.0 + 1e-12) {
        return invalid(format!("time grid ends at {horizon}, past the horizon {}", domain.horizon));
    }
    let grid = Arc::new(ReferenceGrid::new(domain, spec.cells)?);
    let stepper = Stepper::new(domain, coeffs, &grid, spec.theta)?;
    let n = grid.len();
    let stored = if coeffs.is_stochastic() { ensemble.n } else { 1 };
    let init = stepper.initial_state();
    let mut states = Vec::with_capacity(stored * n);
    for _ in 0..stored {
        states.extend_from_slice(&init);
    }
    let mut slices = vec![Slice { step: 0, time: 0.0, values: states.clone() }];
    let reuse = domain.is_static();
    let mut l_k = stepper.operator(times[0])?;
    let mut cached: Option<(f64, StepSystem)> = None;
    for k in 0..spec.steps {
        let (t_k, t_k1) = (times[k], times[k + 1]);
        let dt = t_k1 - t_k;
        let sys = match cached.take() {
            Some((cdt, mut sys)) if reuse && (cdt - dt).abs() <= 1e-15 * dt => {
                sys.pinned = stepper.pinned(t_k1);
                sys
            }
            _ => {
                let l_k1 = if reuse { l_k.clone() } else { stepper.operator(t_k1)? };
                let sys = stepper.system(l_k, &l_k1, t_k, t_k1)?;
                l_k = l_k1;
                sys
            }
        };
        states
            .par_chunks_mut(n)
            .enumerate()
            .try_for_each_init(Vec::new, |scratch, (p, state)| {
                let dw = ensemble.paths[p].increments[k];
                sys.advance(state, dw, scratch)
                    .map_err(|e| Error::Numerical(format!("path {p}, step {k} (t = {t_k1}): {e}")))
            })?;
        if states.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!("non-finite state after step {k} (t = {t_k1})")));
        }
        if (k + 1) % spec.stride == 0 || k + 1 == spec.steps {
            slices.push(Slice { step: k + 1, time: t_k1, values: states.clone() });
        }
        cached = Some((dt, sys));
    }
    Ok(EnsembleField {
        domain: domain.clone(),
        coeffs: coeffs.clone(),
        grid,
        spec: *spec,
        times,
        key: ensemble.key(),
        n_paths: ensemble.n,
        stored_paths: stored,
        slices,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::InitialDatum;
    use crate::stochastic::{generate_paths, uniform_times};

    #[test]
    fn eigenmode_decay() {
        let d = MovingDomain::static_interval(1.0, 0.1).unwrap();
        let c = SPDECoefficients::heat(1, 0.0, 0.0, InitialDatum::SineMode { amp: 1.0, mode: 1 });
        let spec = GridSpec { cells: 128, steps: 256, theta: 0.5, stride: 256 };
        let e = generate_paths(1, 3, &uniform_times(0.1, 256)).unwrap();
        let f = solve(&d, &c, &e, &spec).unwrap();
        let last = f.slices.len() - 1;
        let v = f.path_values(last, 2);
        let exact = (-std::f64::consts::PI.powi(2) * 0.1).exp();
        assert!((v[64] / exact - 1.0).abs() < 1e-3, "{} vs {exact}", v[64]);
        assert!(f.is_deterministic());
    }

    #[test]
    fn single_step_matches_solve() {
        let d = MovingDomain::moving_interval(1.0, crate::geometry::TimeProfile::Linear { rate: 0.3 }, 1.0).unwrap();
        let c = SPDECoefficients::heat(1, 0.7, 1.0, InitialDatum::Linear { amp: 1.0 });
        let spec = GridSpec { cells: 16, steps: 4, theta: 0.5, stride: 1 };
        let times = uniform_times(0.2, 4);
        let e = generate_paths(3, 1, &times).unwrap();
        let f = solve(&d, &c, &e, &spec).unwrap();
        let g = ReferenceGrid::new(&d, 16).unwrap();
        let s = Stepper::new(&d, &c, &g, 0.5).unwrap();
        let mut v = s.initial_state();
        for k in 0..4 {
            v = s.step(&v, times[k], times[k + 1], e.paths[0].increments[k]).unwrap();
            assert_eq!(v.as_slice(), f.path_values(k + 1, 0));
        }
    }
}
