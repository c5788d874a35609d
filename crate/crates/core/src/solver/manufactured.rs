//! Closed-form solutions of du − Δu dt = g1 dt + g2 dW on 1-D intervals
//! (0, s(t)) that vanish on the boundary.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::{MovingDomain, ReferenceDomain, TimeProfile};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ManufacturedKind {
    /// u ≡ 0 with g1 = g2 = 0.
    Zero,
    /// sin(kπx/L) e^{−(kπ/L)² t} on a static interval.
    Eigenmode { mode: u32 },
    /// U(ξ) = ξ(1 − ξ) exp(−(ξ − c0 − speed·t)²/width) at ξ = x/s(t).
    AdvectedBump { c0: f64, speed: f64, width: f64 },
    /// X(t) sin(kπx/L), X = exp((μ − σ²/2)t + σW(t)).
    GeometricBrownian { mode: u32, mu: f64, sigma: f64 },
}

/// Field values at (t, x).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManufacturedPoint {
    pub u: f64,
    pub ux: f64,
    pub g1: f64,
    pub g2: f64,
    pub g2x: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManufacturedSolution {
    pub name: String,
    pub kind: ManufacturedKind,
    pub domain: MovingDomain,
}

impl ManufacturedSolution {
    pub fn new(name: impl Into<String>, kind: ManufacturedKind, domain: MovingDomain) -> Result<Self> {
        if !matches!(domain.reference, ReferenceDomain::Interval { .. }) {
            return invalid("manufactured solutions live on 1-D intervals");
        }
        let moving = !domain.is_static();
        match &kind {
            ManufacturedKind::Eigenmode { mode } | ManufacturedKind::GeometricBrownian { mode, .. } => {
                if moving {
                    return invalid("separable modes need a static interval");
                }
                if *mode == 0 {
                    return invalid("mode must be >= 1");
                }
            }
            ManufacturedKind::AdvectedBump { width, .. } => {
                if !(*width > 0.0) {
                    return invalid("bump width must be positive");
                }
            }
            ManufacturedKind::Zero => {}
        }
        Ok(ManufacturedSolution { name: name.into(), kind, domain })
    }

    /// Default corpus on (0, length): two eigenmodes, a bump advected with
    /// a dilating interval, and a geometric-Brownian mode.
    pub fn corpus(length: f64, horizon: f64) -> Result<Vec<Self>> {
        let fixed = MovingDomain::static_interval(length, horizon)?;
        let moving = MovingDomain::moving_interval(length, TimeProfile::Linear { rate: 0.2 * length }, horizon)?;
        Ok(vec![
            Self::new("eigenmode_1", ManufacturedKind::Eigenmode { mode: 1 }, fixed.clone())?,
            Self::new("eigenmode_2", ManufacturedKind::Eigenmode { mode: 2 }, fixed.clone())?,
            Self::new("advected_bump", ManufacturedKind::AdvectedBump { c0: 0.3, speed: 0.4, width: 0.02 }, moving)?,
            Self::new("geometric_brownian", ManufacturedKind::GeometricBrownian { mode: 1, mu: 0.3, sigma: 0.8 }, fixed)?,
        ])
    }

    pub fn is_stochastic(&self) -> bool {
        matches!(self.kind, ManufacturedKind::GeometricBrownian { sigma, .. } if sigma != 0.0)
    }

    fn length(&self) -> f64 {
        match self.domain.reference {
            ReferenceDomain::Interval { length } => length,
            _ => unreachable!("checked in new"),
        }
    }

    /// Right endpoint s(t) of G(t) = (0, s(t)).
    pub fn right_end(&self, t: f64) -> f64 {
        self.domain.tau(t, &[self.length()])[0]
    }

    /// Values at (t, x) given the Brownian value w = W(t).
    pub fn eval(&self, t: f64, x: f64, w: f64) -> ManufacturedPoint {
        let l = self.length();
        match &self.kind {
            ManufacturedKind::Zero => ManufacturedPoint { u: 0.0, ux: 0.0, g1: 0.0, g2: 0.0, g2x: 0.0 },
            ManufacturedKind::Eigenmode { mode } => {
                let k = *mode as f64 * PI / l;
                let d = (-k * k * t).exp();
                ManufacturedPoint { u: (k * x).sin() * d, ux: k * (k * x).cos() * d, g1: 0.0, g2: 0.0, g2x: 0.0 }
            }
            ManufacturedKind::GeometricBrownian { mode, mu, sigma } => {
                let k = *mode as f64 * PI / l;
                let xp = ((mu - 0.5 * sigma * sigma) * t + sigma * w).exp();
                let (psi, psx) = ((k * x).sin(), k * (k * x).cos());
                ManufacturedPoint {
                    u: xp * psi,
                    ux: xp * psx,
                    g1: xp * (mu + k * k) * psi,
                    g2: sigma * xp * psi,
                    g2x: sigma * xp * psx,
                }
            }
            ManufacturedKind::AdvectedBump { c0, speed, width } => {
                let s = self.right_end(t);
                let sp = match &self.domain.motion {
                    crate::geometry::Motion::Endpoint { profile } => profile.derivative(t),
                    _ => 0.0,
                };
                let xi = x / s;
                let c = c0 + speed * t;
                let d = xi - c;
                let e = (-d * d / width).exp();
                let ex = -2.0 * d / width * e;
                let exx = (4.0 * d * d / (width * width) - 2.0 / width) * e;
                let q = xi * (1.0 - xi);
                let (qx, qxx) = (1.0 - 2.0 * xi, -2.0);
                let u = q * e;
                let u_xi = qx * e + q * ex;
                let u_xixi = qxx * e + 2.0 * qx * ex + q * exx;
                let u_t_fixed_xi = q * e * 2.0 * d * speed / width;
                let ut = u_t_fixed_xi - u_xi * xi * sp / s;
                let uxx = u_xixi / (s * s);
                ManufacturedPoint { u, ux: u_xi / s, g1: ut - uxx, g2: 0.0, g2x: 0.0 }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vanishes_on_boundary() {
        for m in ManufacturedSolution::corpus(1.0, 1.0).unwrap() {
            for &t in &[0.0, 0.3, 0.9] {
                assert!(m.eval(t, 0.0, 0.4).u.abs() < 1e-14);
                assert!(m.eval(t, m.right_end(t), 0.4).u.abs() < 1e-12, "{}", m.name);
            }
        }
    }

    #[test]
    fn deterministic_sources_by_substitution() {
        let h = 1e-4;
        for m in ManufacturedSolution::corpus(1.0, 1.0).unwrap() {
            if m.is_stochastic() {
                continue;
            }
            let (t, x) = (0.4, 0.37);
            let ut = (m.eval(t + h, x, 0.0).u - m.eval(t - h, x, 0.0).u) / (2.0 * h);
            let uxx = (m.eval(t, x + h, 0.0).u - 2.0 * m.eval(t, x, 0.0).u + m.eval(t, x - h, 0.0).u) / (h * h);
            let p = m.eval(t, x, 0.0);
            assert!((ut - uxx - p.g1).abs() < 1e-4 * (1.0 + p.g1.abs()), "{}: {} vs {}", m.name, ut - uxx, p.g1);
            let ux = (m.eval(t, x + h, 0.0).u - m.eval(t, x - h, 0.0).u) / (2.0 * h);
            assert!((ux - p.ux).abs() < 1e-6);
        }
    }
}
