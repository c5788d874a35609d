use std::sync::Arc;

use movbound::solver::ManufacturedSolution;
use movbound::verify::{carleman_residual, CarlemanGrid, CarlemanResidualReport};
use movbound::weights::{CarlemanWeights, SigmaTable};
use serde::Serialize;

use super::Outcome;
use crate::config::{CarlemanSpec, RunConfig};
use crate::error::CliError;
use crate::output::Writer;

#[derive(Serialize)]
struct Entry {
    holds: bool,
    #[serde(flatten)]
    report: CarlemanResidualReport,
}

#[derive(Serialize)]
struct CarlemanSummary {
    configurations: usize,
    holding: usize,
    all_hold: bool,
    min_relative_margin: f64,
    /// Largest −margin/stderr; nonpositive when every margin is nonnegative.
    worst_sigmas: f64,
}

#[derive(Serialize)]
struct CarlemanOutput {
    spec: CarlemanSpec,
    c0: f64,
    lemma_c0: f64,
    summary: CarlemanSummary,
    entries: Vec<Entry>,
}

pub fn run(cfg: &RunConfig, w: &mut Writer) -> Result<Outcome, CliError> {
    let spec = cfg.carleman.clone().unwrap_or_default();
    if spec.lambdas.is_empty() || spec.windows.is_empty() {
        return Err(CliError::Config("carleman sweep needs at least one lambda and one (a, b) window".into()));
    }
    let table = Arc::new(SigmaTable::new(spec.sigma_nodes)?);
    let grid = CarlemanGrid { nx: spec.nx, nt: spec.nt, paths: cfg.ensemble.samples, seed: cfg.ensemble.seed };
    let mut entries = Vec::new();
    for m in ManufacturedSolution::corpus(spec.length, spec.horizon)? {
        for &lambda in &spec.lambdas {
            for &(a, b) in &spec.windows {
                let wts = CarlemanWeights::new(spec.t0, spec.x0.clone(), a, b, lambda, table.clone())?;
                let report = carleman_residual(&m, &wts, &grid)?;
                if !report.margin.value.is_finite() {
                    return Err(CliError::Numerical(format!("{} lambda {lambda} a {a} b {b}: non-finite margin", m.name)));
                }
                entries.push(Entry { holds: report.holds(spec.k_sigma, spec.tolerance), report });
            }
        }
    }
    let holding = entries.iter().filter(|e| e.holds).count();
    let min_relative_margin = entries.iter().map(|e| e.report.relative_margin).fold(f64::INFINITY, f64::min);
    let worst_sigmas = entries
        .iter()
        .map(|e| {
            let m = &e.report.margin;
            if m.stderr > 0.0 {
                -m.value / m.stderr
            } else if m.value < 0.0 {
                f64::MAX
            } else {
                0.0
            }
        })
        .fold(f64::MIN, f64::max);
    let summary = CarlemanSummary {
        configurations: entries.len(),
        holding,
        all_hold: holding == entries.len(),
        min_relative_margin,
        worst_sigmas,
    };
    let line = format!("{}/{} configurations hold, min relative margin {:e}", holding, entries.len(), min_relative_margin);
    let passed = summary.all_hold;
    let out = CarlemanOutput { c0: table.c0, lemma_c0: table.lemma_c0, spec, summary, entries };
    w.json("carleman.json", &out)?;
    Ok(Outcome { passed: Some(passed), summary: line })
}
