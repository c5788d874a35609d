//! Run configuration: TOML sections for the domain, coefficients, grid,
//! ensemble, output and one section per subcommand.

use std::path::{Path, PathBuf};

use movbound::functionals::ObservationWindow;
use movbound::geometry::{GeometryParams, MovingDomain};
use movbound::inverse::{BoundaryBasis, BoundaryParametrization, SearchConfig};
use movbound::solver::{BoundaryData, GridSpec, InitialDatum, SPDECoefficients, ScalarField, VectorField};
use movbound::verify::TwoSphereVariant;
use movbound::stochastic::{generate_paths, uniform_times, Ensemble};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub domain: Option<MovingDomain>,
    pub family: Option<FamilySpec>,
    pub coefficients: CoefficientSpec,
    pub grid: GridSpec,
    pub ensemble: EnsembleSpec,
    pub output: OutputSpec,
    pub simulate: Option<SimulateSpec>,
    pub carleman: Option<CarlemanSpec>,
    pub ucp: Option<UcpSpec>,
    pub reconstruct: Option<ReconstructSpec>,
    pub stability: Option<StabilitySpec>,
    pub geometry: Option<GeometrySpec>,
}

/// Parametric boundary family; its `coeffs` are the reference member.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub basis: BoundaryBasis,
    pub coeffs: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub horizon: f64,
}

impl FamilySpec {
    pub fn build(&self) -> Result<BoundaryParametrization, CliError> {
        if !(self.horizon > 0.0) {
            return Err(CliError::Config(format!("family horizon = {} must be positive", self.horizon)));
        }
        Ok(BoundaryParametrization::new(self.basis.clone(), self.coeffs.clone(), self.lower.clone(), self.upper.clone())?)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoefficientSpec {
    /// Zero drift of the domain dimension when absent.
    pub a1: Option<VectorField>,
    pub b1: ScalarField,
    pub c1: ScalarField,
    pub f: BoundaryData,
    /// min f² over the time grid when absent.
    pub big_f: Option<f64>,
    pub u0: InitialDatum,
    pub kappa0: f64,
}

impl Default for CoefficientSpec {
    fn default() -> Self {
        CoefficientSpec {
            a1: None,
            b1: ScalarField::zero(),
            c1: ScalarField::zero(),
            f: BoundaryData::Constant { value: 1.0 },
            big_f: None,
            u0: InitialDatum::Zero,
            kappa0: std::f64::consts::E,
        }
    }
}

impl CoefficientSpec {
    pub fn build(&self, domain: &MovingDomain, times: &[f64]) -> Result<SPDECoefficients, CliError> {
        let a1 = self.a1.clone().unwrap_or_else(|| VectorField::zero(domain.dim()));
        let big_f = self.big_f.unwrap_or_else(|| times.iter().map(|&t| self.f.eval(t).powi(2)).fold(f64::INFINITY, f64::min));
        let c = SPDECoefficients::new(a1, self.b1.clone(), self.c1.clone(), self.f.clone(), big_f, self.u0.clone(), self.kappa0);
        c.validate(domain)?;
        Ok(c)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleSpec {
    pub seed: u64,
    pub samples: usize,
}

impl Default for EnsembleSpec {
    fn default() -> Self {
        EnsembleSpec { seed: 0, samples: 64 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: PathBuf,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec { dir: PathBuf::from("out") }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateSpec {
    /// Physical points reported per slice when inside G(t).
    pub probes: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CarlemanSpec {
    pub length: f64,
    pub horizon: f64,
    pub t0: f64,
    pub x0: Vec<f64>,
    pub lambdas: Vec<f64>,
    /// (a, b) pairs.
    pub windows: Vec<(f64, f64)>,
    pub nx: usize,
    pub nt: usize,
    pub sigma_nodes: usize,
    /// Gate band in standard errors.
    pub k_sigma: f64,
    pub tolerance: f64,
}

impl Default for CarlemanSpec {
    fn default() -> Self {
        CarlemanSpec {
            length: 1.0,
            horizon: 1.0,
            t0: 0.5,
            x0: vec![0.5],
            lambdas: vec![1.0, 2.0, 4.0, 8.0, 16.0],
            windows: vec![(0.05, 0.3), (0.1, 0.2), (0.001, 0.35), (0.2, 0.15)],
            nx: 801,
            nt: 801,
            sigma_nodes: 4096,
            k_sigma: 3.0,
            tolerance: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UcpSpec {
    pub variant: TwoSphereVariant,
    /// The domain horizon when absent.
    pub t0: Option<f64>,
    pub x0: Vec<f64>,
    pub eta1: f64,
    pub r0: f64,
    pub big_r: Vec<f64>,
    /// ρ = fraction · R.
    pub rho_fractions: Vec<f64>,
    /// r = fraction · ρ.
    pub r_fractions: Vec<f64>,
    pub k_sigma: f64,
    /// Refit on a grid with half the cells and steps and report the drift.
    pub refine_check: bool,
    pub max_drift: f64,
    /// Strictly decreasing radii for the vanishing-order probe; empty skips it.
    pub sucp_radii: Vec<f64>,
}

impl Default for UcpSpec {
    fn default() -> Self {
        UcpSpec {
            variant: TwoSphereVariant::Interior,
            t0: None,
            x0: vec![0.5],
            eta1: 0.36,
            r0: 0.5,
            big_r: vec![0.3, 0.35, 0.4],
            rho_fractions: vec![0.15, 0.25, 0.35],
            r_fractions: vec![0.1, 0.4, 1.0],
            k_sigma: 3.0,
            refine_check: true,
            max_drift: 0.2,
            sucp_radii: vec![],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReconstructSpec {
    /// Coefficients generating the observations.
    pub truth: Vec<f64>,
    pub window: ObservationWindow,
    #[serde(default)]
    pub search: SearchConfig,
    /// Observations from an independent ensemble when set.
    #[serde(default)]
    pub observation_seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilitySpec {
    pub amplitudes: Vec<f64>,
    /// Perturbation direction in coefficient space.
    pub direction: Vec<f64>,
    pub window: ObservationWindow,
    /// {T/4, T/2, T} when absent.
    #[serde(default)]
    pub t0: Option<Vec<f64>>,
    #[serde(default = "default_spacing")]
    pub spacing: f64,
}

fn default_spacing() -> f64 {
    1e-3
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    pub params: GeometryParams,
    /// {0, T/2, T} when absent.
    #[serde(default)]
    pub times: Option<Vec<f64>>,
    #[serde(default = "default_snapshot_spacing")]
    pub spacing: f64,
    /// Speed-bound centers; the reference center when empty.
    #[serde(default)]
    pub centers: Vec<Vec<f64>>,
    /// Speed-bound radii; {0.05, 0.1, 0.2} when empty.
    #[serde(default)]
    pub radii: Vec<f64>,
    #[serde(default = "default_cylinder_steps")]
    pub cylinder_steps: usize,
}

fn default_snapshot_spacing() -> f64 {
    0.02
}

fn default_cylinder_steps() -> usize {
    16
}

/// Command-line and environment overrides, applied over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>, o: &Overrides) -> Result<Self, CliError> {
        let mut cfg: RunConfig = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
                toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
            }
            None => RunConfig::default(),
        };
        if let Some(s) = o.seed {
            cfg.ensemble.seed = s;
        }
        if let Some(n) = o.samples {
            cfg.ensemble.samples = n;
        }
        if let Some(d) = &o.out {
            cfg.output.dir = d.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.grid.validate()?;
        if self.ensemble.samples == 0 {
            return Err(CliError::Config("ensemble.samples must be at least 1".into()));
        }
        if let Some(d) = &self.domain {
            MovingDomain::new(d.reference.clone(), d.motion.clone(), d.horizon, d.fixed_boundary.clone(), d.moving_boundary_id.clone())?;
        }
        if let Some(f) = &self.family {
            f.build()?.domain(f.horizon)?;
        }
        if self.domain.is_some() && self.family.is_some() {
            return Err(CliError::Config("give either [domain] or [family], not both".into()));
        }
        Ok(())
    }

    /// sha256 of the canonical JSON of the effective configuration, output
    /// directory excluded.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output.dir = PathBuf::new();
        let canonical = serde_json::to_string(&c).expect("config serializes");
        format!("{:x}", Sha256::digest(canonical.as_bytes()))
    }

    /// [domain], or the reference member of [family].
    pub fn resolve_domain(&self) -> Result<MovingDomain, CliError> {
        match (&self.domain, &self.family) {
            (Some(d), _) => Ok(d.clone()),
            (None, Some(f)) => Ok(f.build()?.domain(f.horizon)?),
            (None, None) => Err(CliError::Config("this subcommand needs a [domain] or [family] section".into())),
        }
    }

    pub fn family(&self) -> Result<(BoundaryParametrization, f64), CliError> {
        let f = self.family.as_ref().ok_or_else(|| CliError::Config("this subcommand needs a [family] section".into()))?;
        Ok((f.build()?, f.horizon))
    }

    pub fn ensemble(&self, horizon: f64) -> Result<Ensemble, CliError> {
        self.ensemble_with_seed(self.ensemble.seed, horizon)
    }

    pub fn ensemble_with_seed(&self, seed: u64, horizon: f64) -> Result<Ensemble, CliError> {
        Ok(generate_paths(seed, self.ensemble.samples, &uniform_times(horizon, self.grid.steps))?)
    }

    pub fn coefficients(&self, domain: &MovingDomain, ens: &Ensemble) -> Result<SPDECoefficients, CliError> {
        self.coefficients.build(domain, &ens.times)
    }
}
