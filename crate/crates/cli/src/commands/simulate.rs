use movbound::functionals::{Estimate, Region, SliceQuadrature};
use movbound::solver::solve;
use serde::Serialize;

use super::Outcome;
use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::Writer;

#[derive(Serialize)]
struct ProbeValue {
    x: Vec<f64>,
    mean: f64,
    second_moment: f64,
}

#[derive(Serialize)]
struct SliceSummary {
    time: f64,
    /// E∫_{G(t)} u².
    mass: Estimate,
    probes: Vec<ProbeValue>,
}

#[derive(Serialize)]
struct SimulateReport {
    domain: movbound::geometry::MovingDomain,
    coefficients: movbound::solver::SPDECoefficients,
    paths: usize,
    stored_paths: usize,
    slices: Vec<SliceSummary>,
}

pub fn run(cfg: &RunConfig, w: &mut Writer) -> Result<Outcome, CliError> {
    let d = cfg.resolve_domain()?;
    let ens = cfg.ensemble(d.horizon)?;
    let c = cfg.coefficients(&d, &ens)?;
    let u = solve(&d, &c, &ens, &cfg.grid)?;
    let probes = cfg.simulate.clone().unwrap_or_default().probes;
    let mut slices = Vec::new();
    let mut csv = String::from("slice,time,node");
    for k in 0..d.dim() {
        csv.push_str(&format!(",x{k}"));
    }
    csv.push_str(",second_moment\n");
    for s in 0..u.slices.len() {
        let t = u.slices[s].time;
        let q = SliceQuadrature::new(&u, s, &Region::Everywhere)?;
        let masses: Vec<f64> = (0..u.stored_paths()).map(|p| q.mass(&u, p)).collect();
        let mut values = Vec::new();
        for x in &probes {
            if let Some(pr) = u.probe(s, x)? {
                let v: Vec<f64> = (0..u.stored_paths()).map(|p| pr.value(u.path_values(s, p))).collect();
                let n = v.len() as f64;
                values.push(ProbeValue {
                    x: x.clone(),
                    mean: v.iter().sum::<f64>() / n,
                    second_moment: v.iter().map(|a| a * a).sum::<f64>() / n,
                });
            }
        }
        slices.push(SliceSummary { time: t, mass: Estimate::from_samples(&masses), probes: values });
        for (i, m2) in u.second_moment(s).iter().enumerate() {
            let x = d.tau(t, u.grid.point(i));
            csv.push_str(&format!("{s},{t},{i}"));
            for v in &x {
                csv.push_str(&format!(",{v}"));
            }
            csv.push_str(&format!(",{m2}\n"));
        }
    }
    if slices.iter().any(|s| !s.mass.value.is_finite()) {
        return Err(CliError::Numerical("non-finite mass in the simulated field".into()));
    }
    let last = slices.last().map(|s| s.mass.value).unwrap_or(0.0);
    let report = SimulateReport { domain: d, coefficients: c, paths: u.n_paths, stored_paths: u.stored_paths(), slices };
    w.json("simulate.json", &report)?;
    w.csv("second_moment.csv", &csv)?;
    Ok(Outcome { passed: None, summary: format!("{} slices, final mass {last:e}", report.slices.len()) })
}
