use movbound::geometry::{check_lipschitz_class, interior_ball_violations, speed_bound_violation, SpeedGrid};
use serde::Serialize;

use super::Outcome;
use crate::config::{GeometrySpec, RunConfig};
use crate::error::CliError;
use crate::output::Writer;

#[derive(Serialize)]
struct TimeCheck {
    t: f64,
    boundary_samples: usize,
    interior_ball_violations: usize,
    lipschitz_class: bool,
}

#[derive(Serialize)]
struct SpeedViolation {
    t0: f64,
    x0: Vec<f64>,
    radius: f64,
    t: f64,
}

#[derive(Serialize)]
struct GeometryOutput {
    spec: GeometrySpec,
    checks: Vec<TimeCheck>,
    speed_grid: SpeedGrid,
    speed_violation: Option<SpeedViolation>,
    passed: bool,
}

pub fn run(cfg: &RunConfig, w: &mut Writer) -> Result<Outcome, CliError> {
    let spec = cfg.geometry.clone().ok_or_else(|| CliError::Config("check-geometry needs a [geometry] section".into()))?;
    spec.params.validate()?;
    if !(spec.spacing > 0.0) {
        return Err(CliError::Config(format!("snapshot spacing = {} must be positive", spec.spacing)));
    }
    let d = cfg.resolve_domain()?;
    let times = spec.times.clone().unwrap_or_else(|| vec![0.0, 0.5 * d.horizon, d.horizon]);
    let mut checks = Vec::new();
    for &t in &times {
        let snap = d.snapshot(t, spec.spacing)?;
        checks.push(TimeCheck {
            t,
            boundary_samples: snap.boundary_count(),
            interior_ball_violations: interior_ball_violations(&snap, spec.params.r0)?.len(),
            lipschitz_class: check_lipschitz_class(&snap, spec.params.rho0, spec.params.alpha)?,
        });
    }
    let speed_grid = SpeedGrid {
        times: times.iter().copied().filter(|t| *t > 0.0).collect(),
        centers: if spec.centers.is_empty() { vec![d.reference.center()] } else { spec.centers.clone() },
        radii: if spec.radii.is_empty() { vec![0.05, 0.1, 0.2] } else { spec.radii.clone() },
        cylinder_steps: spec.cylinder_steps,
    };
    let speed_violation = speed_bound_violation(&d, spec.params.e, &speed_grid)?.map(|(t0, x0, radius, t)| SpeedViolation { t0, x0, radius, t });
    let passed = speed_violation.is_none() && checks.iter().all(|c| c.interior_ball_violations == 0 && c.lipschitz_class);
    let bad = checks.iter().filter(|c| c.interior_ball_violations > 0 || !c.lipschitz_class).count();
    let line = format!(
        "{} at {} times ({bad} failing), speed bound {}",
        if passed { "pass" } else { "fail" },
        checks.len(),
        if speed_violation.is_some() { "violated" } else { "holds" }
    );
    w.json("geometry.json", &GeometryOutput { spec, checks, speed_grid, speed_violation, passed })?;
    Ok(Outcome { passed: Some(passed), summary: line })
}
