use movbound::geometry::MovingDomain;
use movbound::solver::{solve, EnsembleField, GridSpec};
use movbound::stochastic::{generate_paths, uniform_times};
use movbound::verify::{
    sucp_probe, two_sphere_fit, two_sphere_report, two_sphere_validate, HoldoutReport, SucpReport, TwoSphereFit,
    TwoSphereParams, TwoSphereReport,
};
use serde::Serialize;

use super::Outcome;
use crate::config::{RunConfig, UcpSpec};
use crate::error::CliError;
use crate::output::Writer;

#[derive(Serialize)]
struct Refinement {
    grid: GridSpec,
    fit: TwoSphereFit,
    /// max relative change of C_mult and C_exp against the primary grid.
    drift: f64,
}

#[derive(Serialize)]
struct UcpOutput {
    spec: UcpSpec,
    t0: f64,
    training: Vec<TwoSphereReport>,
    holdout: Vec<TwoSphereReport>,
    fit: TwoSphereFit,
    validation: HoldoutReport,
    refinement: Option<Refinement>,
    sucp: Option<SucpReport>,
    passed: bool,
}

/// Triples (r, ρ, R) split by the parity of their sweep index.
fn sweep(u: &EnsembleField, spec: &UcpSpec, t0: f64) -> Result<(Vec<TwoSphereReport>, Vec<TwoSphereReport>), CliError> {
    let (mut train, mut hold) = (Vec::new(), Vec::new());
    for (i, big_r) in spec.big_r.iter().enumerate() {
        for (j, fr) in spec.rho_fractions.iter().enumerate() {
            for (k, fr2) in spec.r_fractions.iter().enumerate() {
                let rho = fr * big_r;
                let p = TwoSphereParams { variant: spec.variant, t0, x0: spec.x0.clone(), r: fr2 * rho, rho, big_r: *big_r };
                let rep = two_sphere_report(u, &p, spec.eta1, spec.r0)?;
                if (i + j + k) % 2 == 0 {
                    train.push(rep)
                } else {
                    hold.push(rep)
                }
            }
        }
    }
    Ok((train, hold))
}

fn field(cfg: &RunConfig, d: &MovingDomain, spec: &GridSpec) -> Result<EnsembleField, CliError> {
    let ens = generate_paths(cfg.ensemble.seed, cfg.ensemble.samples, &uniform_times(d.horizon, spec.steps))?;
    let c = cfg.coefficients(d, &ens)?;
    Ok(solve(d, &c, &ens, spec)?)
}

pub fn run(cfg: &RunConfig, w: &mut Writer) -> Result<Outcome, CliError> {
    let spec = cfg.ucp.clone().unwrap_or_default();
    let d = cfg.resolve_domain()?;
    let t0 = spec.t0.unwrap_or(d.horizon);
    let u = field(cfg, &d, &cfg.grid)?;
    let (training, holdout) = sweep(&u, &spec, t0)?;
    if holdout.is_empty() {
        return Err(CliError::Config("two-sphere sweep needs at least two triples".into()));
    }
    let fit = two_sphere_fit(&training)?;
    let validation = two_sphere_validate(&fit, &holdout, spec.k_sigma);
    let refinement = if spec.refine_check {
        let g = cfg.grid;
        let coarse = GridSpec { cells: g.cells / 2, steps: g.steps / 2, stride: (g.stride / 2).max(1), ..g };
        coarse.validate()?;
        let (t, _) = sweep(&field(cfg, &d, &coarse)?, &spec, t0)?;
        let f = two_sphere_fit(&t)?;
        let drift = ((f.c_mult - fit.c_mult).abs() / fit.c_mult).max((f.c_exp - fit.c_exp).abs() / fit.c_exp);
        Some(Refinement { grid: coarse, fit: f, drift })
    } else {
        None
    };
    let sucp = if spec.sucp_radii.is_empty() { None } else { Some(sucp_probe(&u, t0, &spec.x0, &spec.sucp_radii)?) };
    let passed = validation.violations.is_empty()
        && refinement.as_ref().is_none_or(|r| r.drift < spec.max_drift)
        && sucp.as_ref().is_none_or(|s| s.bounded || s.inconclusive);
    let line = format!(
        "C_mult {:e}, C_exp {:e}, {}/{} hold-out violations{}",
        fit.c_mult,
        fit.c_exp,
        validation.violations.len(),
        validation.checked,
        refinement.as_ref().map_or(String::new(), |r| format!(", drift {:.3}", r.drift))
    );
    let out = UcpOutput { spec, t0, training, holdout, fit, validation, refinement, sucp, passed };
    w.json("ucp.json", &out)?;
    Ok(Outcome { passed: Some(passed), summary: line })
}
