use movbound::inverse::{domain_distances, reconstruct_boundary, ForwardModel, ReconstructionResult};
use serde::Serialize;

use super::Outcome;
use crate::config::{ReconstructSpec, RunConfig};
use crate::error::CliError;
use crate::output::Writer;

#[derive(Serialize)]
struct ReconstructOutput {
    spec: ReconstructSpec,
    observation_seed: u64,
    truth: Vec<f64>,
    found: Vec<f64>,
    /// Found coefficients equal the truth bit for bit.
    exact_recovery: bool,
    /// (d, d_m) between the true and found domains at the horizon.
    distance_at_horizon: (f64, f64),
    result: ReconstructionResult,
}

pub fn run(cfg: &RunConfig, w: &mut Writer) -> Result<Outcome, CliError> {
    let spec = cfg.reconstruct.clone().ok_or_else(|| CliError::Config("reconstruct needs a [reconstruct] section".into()))?;
    let (family, horizon) = cfg.family()?;
    if spec.truth.len() != family.dim() || !family.in_box(&spec.truth) {
        return Err(CliError::Config(format!("truth {:?} must have {} coefficients inside the admissible box", spec.truth, family.dim())));
    }
    let reference = family.domain(horizon)?;
    let ens = cfg.ensemble(horizon)?;
    let coeffs = cfg.coefficients(&reference, &ens)?;
    let truth_domain = family.domain_at(&spec.truth, horizon)?;
    let observation_seed = spec.observation_seed.unwrap_or(cfg.ensemble.seed);
    let obs_ens = if observation_seed == cfg.ensemble.seed { ens.clone() } else { cfg.ensemble_with_seed(observation_seed, horizon)? };
    let obs_model = ForwardModel { coeffs: &coeffs, ensemble: &obs_ens, spec: &cfg.grid, window: &spec.window };
    spec.window.validate(&[&reference, &truth_domain], &ens.times)?;
    let obs = obs_model.solve(&truth_domain)?;
    let model = ForwardModel { ensemble: &ens, ..obs_model };
    let result = reconstruct_boundary(&obs, &model, &family, &spec.search)?;
    let found = result.params.coeffs.clone();
    let distance_at_horizon = domain_distances(&truth_domain, &family.domain_at(&found, horizon)?, horizon, 1e-3)?;
    let mut history = String::from("evaluation,misfit");
    for k in 0..family.dim() {
        history.push_str(&format!(",c{k}"));
    }
    history.push('\n');
    for (i, (theta, m)) in result.history.iter().enumerate() {
        history.push_str(&format!("{i},{m}"));
        for c in theta {
            history.push_str(&format!(",{c}"));
        }
        history.push('\n');
    }
    let exact_recovery = found == spec.truth;
    let line = format!(
        "found {found:?} (truth {:?}), misfit {:e}, {} evaluations{}",
        spec.truth,
        result.misfit,
        result.evaluations,
        if result.at_bound { ", on the box boundary" } else { "" }
    );
    let out = ReconstructOutput { truth: spec.truth.clone(), spec, observation_seed, found, exact_recovery, distance_at_horizon, result };
    w.json("reconstruct.json", &out)?;
    w.csv("reconstruct_history.csv", &history)?;
    Ok(Outcome { passed: None, summary: line })
}
