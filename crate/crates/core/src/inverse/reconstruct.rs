//! Derivative-free boundary recovery: tensor grid search followed by
//! coordinate descent with shrinking steps, inside the admissible box.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::model::ForwardModel;
use super::parametrization::BoundaryParametrization;
use crate::error::{invalid, Error, Result};
use crate::functionals::observation_misfit;
use crate::solver::EnsembleField;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Grid points per coordinate.
    pub grid_points: usize,
    /// Largest tensor grid evaluated exhaustively.
    pub exhaustive_limit: usize,
    pub max_sweeps: usize,
    /// Descent stops once every step is below this fraction of its box side.
    pub min_step_fraction: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { grid_points: 9, exhaustive_limit: 729, max_sweeps: 40, min_step_fraction: 1e-3 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReconstructionResult {
    pub params: BoundaryParametrization,
    pub misfit: f64,
    pub misfit_stderr: f64,
    /// Best fit on a face of the admissible box.
    pub at_bound: bool,
    pub evaluations: usize,
    /// (θ, misfit) in evaluation order.
    pub history: Vec<(Vec<f64>, f64)>,
}

struct Evaluator<'a> {
    obs: &'a EnsembleField,
    model: &'a ForwardModel<'a>,
    family: &'a BoundaryParametrization,
    horizon: f64,
    history: Vec<(Vec<f64>, f64, f64)>,
}

impl<'a> Evaluator<'a> {
    fn misfit(&self, theta: &[f64]) -> Result<(f64, f64)> {
        let wrap = |e: Error| Error::Numerical(format!("theta = {theta:?}: {e}"));
        let d = self.family.domain_at(theta, self.horizon).map_err(wrap)?;
        let u = self.model.solve(&d).map_err(wrap)?;
        let g = observation_misfit(&u, self.obs, self.model.window).map_err(wrap)?;
        if !g.value.is_finite() {
            return Err(Error::Numerical(format!("theta = {theta:?}: non-finite misfit")));
        }
        Ok((g.value, g.stderr))
    }

    fn cached(&self, theta: &[f64]) -> Option<(f64, f64)> {
        self.history.iter().find(|h| h.0 == theta).map(|h| (h.1, h.2))
    }

    fn batch(&mut self, thetas: Vec<Vec<f64>>) -> Result<Vec<f64>> {
        let todo: Vec<Vec<f64>> = thetas.iter().filter(|t| self.cached(t).is_none()).cloned().collect();
        let fresh: Vec<(f64, f64)> = todo.par_iter().map(|t| self.misfit(t)).collect::<Result<_>>()?;
        for (t, (v, s)) in todo.into_iter().zip(fresh) {
            if self.cached(&t).is_none() {
                self.history.push((t, v, s));
            }
        }
        Ok(thetas.iter().map(|t| self.cached(t).expect("evaluated").0).collect())
    }
}

fn tensor_grid(family: &BoundaryParametrization, m: usize) -> Vec<Vec<f64>> {
    let p = family.dim();
    let axis = |i: usize| -> Vec<f64> {
        let (l, u) = (family.lower[i], family.upper[i]);
        if m == 1 || l == u {
            return vec![0.5 * (l + u)];
        }
        (0..m).map(|k| l + (u - l) * k as f64 / (m - 1) as f64).collect()
    };
    let axes: Vec<Vec<f64>> = (0..p).map(axis).collect();
    let mut out = vec![vec![]];
    for ax in &axes {
        out = out.into_iter().flat_map(|pre: Vec<f64>| ax.iter().map(move |v| [pre.clone(), vec![*v]].concat())).collect();
    }
    out
}

pub fn reconstruct_boundary(
    obs: &EnsembleField,
    model: &ForwardModel<'_>,
    family: &BoundaryParametrization,
    search: &SearchConfig,
) -> Result<ReconstructionResult> {
    if search.grid_points == 0 || !(search.min_step_fraction > 0.0) {
        return invalid(format!("bad search config {search:?}"));
    }
    model.check_condition()?;
    let horizon = obs.domain.horizon;
    let mut ev = Evaluator { obs, model, family, horizon, history: Vec::new() };
    let p = family.dim();
    let grid_size = search.grid_points.checked_pow(p as u32).unwrap_or(usize::MAX);
    let mut best: Vec<f64> = if grid_size <= search.exhaustive_limit {
        let grid = tensor_grid(family, search.grid_points);
        let vals = ev.batch(grid.clone())?;
        let k = (0..vals.len()).fold(0, |b, k| if vals[k] < vals[b] { k } else { b });
        grid[k].clone()
    } else {
        family.coeffs.iter().zip(family.lower.iter().zip(&family.upper)).map(|(c, (l, u))| c.clamp(*l, *u)).collect()
    };
    let mut best_val = ev.batch(vec![best.clone()])?[0];
    let side: Vec<f64> = (0..p).map(|i| family.upper[i] - family.lower[i]).collect();
    let mut step: Vec<f64> =
        side.iter().map(|s| if search.grid_points > 1 { 0.5 * s / (search.grid_points - 1) as f64 } else { 0.25 * s }).collect();
    for _ in 0..search.max_sweeps {
        if best_val == 0.0 || step.iter().zip(&side).all(|(h, s)| *h <= search.min_step_fraction * s) {
            break;
        }
        let mut improved = false;
        for i in 0..p {
            if side[i] == 0.0 {
                continue;
            }
            let cands: Vec<Vec<f64>> = [-1.0, 1.0]
                .iter()
                .map(|sg| {
                    let mut c = best.clone();
                    c[i] = (c[i] + sg * step[i]).clamp(family.lower[i], family.upper[i]);
                    c
                })
                .filter(|c| *c != best)
                .collect();
            let vals = ev.batch(cands.clone())?;
            for (c, v) in cands.into_iter().zip(vals) {
                if v < best_val {
                    best = c;
                    best_val = v;
                    improved = true;
                }
            }
        }
        if !improved {
            step.iter_mut().for_each(|h| *h *= 0.5);
        }
    }
    let (misfit, misfit_stderr) = ev.cached(&best).expect("best was evaluated");
    Ok(ReconstructionResult {
        at_bound: family.on_boundary(&best),
        params: family.with_coeffs(best),
        misfit,
        misfit_stderr,
        evaluations: ev.history.len(),
        history: ev.history.into_iter().map(|(t, v, _)| (t, v)).collect(),
    })
}
