//! Low-dimensional families of moving boundaries.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::{
    check_interior_ball, check_speed_bound, FixedBoundary, GeometryParams, Motion, MovingDomain, RadialProfile,
    ReferenceDomain, SpeedGrid, TimeProfile,
};

pub const MAX_PARAMETERS: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundaryBasis {
    /// 1-D: s(t) = length + Σ_k c_k t^k, k = 1..p.
    EndpointPolynomial { length: f64 },
    /// 2-D: r(t, φ) = radius·(1 + t·m(φ)), m(φ) = c_0 + Σ_j c_{2j−1}cos(jφ) + c_{2j}sin(jφ).
    RadialFourier { center: [f64; 2], radius: f64, arc: (f64, f64) },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryParametrization {
    pub basis: BoundaryBasis,
    pub coeffs: Vec<f64>,
    /// Admissible box, lower corner.
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

/// One admissibility failure inside the box.
#[derive(Debug, Clone, Serialize)]
pub struct AdmissibilityFailure {
    pub coeffs: Vec<f64>,
    pub reason: String,
}

impl BoundaryParametrization {
    pub fn new(basis: BoundaryBasis, coeffs: Vec<f64>, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let p = coeffs.len();
        if p == 0 || p > MAX_PARAMETERS {
            return invalid(format!("parametrization needs 1..={MAX_PARAMETERS} coefficients, got {p}"));
        }
        if lower.len() != p || upper.len() != p {
            return invalid("box bounds must match the coefficient count");
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l <= u)) {
            return invalid("box lower corner exceeds the upper corner");
        }
        if let BoundaryBasis::RadialFourier { .. } = basis {
            if p.is_multiple_of(2) {
                return invalid("radial Fourier coefficients come as c0 plus (cos, sin) pairs");
            }
        }
        Ok(BoundaryParametrization { basis, coeffs, lower, upper })
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn with_coeffs(&self, coeffs: Vec<f64>) -> Self {
        BoundaryParametrization { coeffs, ..self.clone() }
    }

    pub fn in_box(&self, c: &[f64]) -> bool {
        c.iter().zip(self.lower.iter().zip(&self.upper)).all(|(v, (l, u))| v >= l && v <= u)
    }

    /// Coordinates that sit on a face of the box.
    pub fn on_boundary(&self, c: &[f64]) -> bool {
        c.iter().zip(self.lower.iter().zip(&self.upper)).any(|(v, (l, u))| {
            let tol = 1e-12 * (1.0 + l.abs().max(u.abs()));
            l < u && ((v - l).abs() <= tol || (u - v).abs() <= tol)
        })
    }

    pub fn domain(&self, horizon: f64) -> Result<MovingDomain> {
        self.domain_at(&self.coeffs, horizon)
    }

    pub fn domain_at(&self, c: &[f64], horizon: f64) -> Result<MovingDomain> {
        if c.len() != self.dim() {
            return invalid(format!("expected {} coefficients, got {}", self.dim(), c.len()));
        }
        match &self.basis {
            BoundaryBasis::EndpointPolynomial { length } => {
                MovingDomain::moving_interval(*length, TimeProfile::Polynomial { coeffs: c.to_vec() }, horizon)
            }
            BoundaryBasis::RadialFourier { center, radius, arc } => {
                let m = (c.len() - 1) / 2;
                let modes = RadialProfile {
                    mean: c[0],
                    cos: (0..m).map(|j| c[1 + 2 * j]).collect(),
                    sin: (0..m).map(|j| c[2 + 2 * j]).collect(),
                };
                MovingDomain::new(
                    ReferenceDomain::Star { center: *center, radial: RadialProfile::circle(*radius) },
                    Motion::Radial { profile: TimeProfile::Linear { rate: 1.0 }, modes },
                    horizon,
                    FixedBoundary::Arc { lo: arc.0, hi: arc.1 },
                    "radial",
                )
            }
        }
    }

    /// Box vertices for p ≤ 4, otherwise the center and the 2p face centers.
    pub fn probe_points(&self) -> Vec<Vec<f64>> {
        let p = self.dim();
        let mid: Vec<f64> = self.lower.iter().zip(&self.upper).map(|(l, u)| 0.5 * (l + u)).collect();
        let mut out = vec![mid.clone()];
        if p <= 4 {
            for mask in 0..(1usize << p) {
                out.push((0..p).map(|i| if mask >> i & 1 == 1 { self.upper[i] } else { self.lower[i] }).collect());
            }
        } else {
            for i in 0..p {
                for v in [self.lower[i], self.upper[i]] {
                    let mut c = mid.clone();
                    c[i] = v;
                    out.push(c);
                }
            }
        }
        out
    }

    /// Interior-ball and speed-bound checks at the probe points and sample times.
    pub fn check_admissible(&self, g: &GeometryParams, horizon: f64, times: &[f64], grid: &SpeedGrid, h: f64) -> Result<Vec<AdmissibilityFailure>> {
        g.validate()?;
        let mut fails = Vec::new();
        for c in self.probe_points() {
            let d = match self.domain_at(&c, horizon) {
                Ok(d) => d,
                Err(e) => {
                    fails.push(AdmissibilityFailure { coeffs: c, reason: e.to_string() });
                    continue;
                }
            };
            for &t in times {
                if !check_interior_ball(&d.snapshot(t, h)?, g.r0)? {
                    fails.push(AdmissibilityFailure { coeffs: c.clone(), reason: format!("interior ball R0 = {} fails at t = {t}", g.r0) });
                    break;
                }
            }
            if !check_speed_bound(&d, g.e, grid)? {
                fails.push(AdmissibilityFailure { coeffs: c.clone(), reason: format!("speed bound E = {} fails", g.e) });
            }
        }
        Ok(fails)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoint_family() {
        let p = BoundaryParametrization::new(
            BoundaryBasis::EndpointPolynomial { length: 1.0 },
            vec![0.1],
            vec![-0.2],
            vec![0.2],
        )
        .unwrap();
        let d = p.domain(1.0).unwrap();
        assert!((d.tau(0.5, &[1.0])[0] - 1.05).abs() < 1e-14);
        assert!(p.on_boundary(&[0.2]) && !p.on_boundary(&[0.1]));
        assert_eq!(p.probe_points().len(), 3);
    }

    #[test]
    fn radial_needs_pairs() {
        let b = BoundaryBasis::RadialFourier { center: [0.0, 0.0], radius: 1.0, arc: (0.0, 1.0) };
        assert!(BoundaryParametrization::new(b.clone(), vec![0.0, 0.1], vec![-1.0; 2], vec![1.0; 2]).is_err());
        let p = BoundaryParametrization::new(b, vec![0.1, 0.05, 0.0], vec![-0.2; 3], vec![0.2; 3]).unwrap();
        assert!(p.domain(1.0).is_ok());
    }
}
