//! Smooth step ψ2 built from the normalized bump on (d1, d2).

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::quadrature::integrate;

/// ∫₀¹ exp(−1/(z(1−z))) dz.
fn unit_bump_mass() -> f64 {
    integrate(unit_bump, 0.0, 1.0, 1e-15)
}

fn unit_bump(z: f64) -> f64 {
    if z <= 0.0 || z >= 1.0 {
        0.0
    } else {
        (-1.0 / (z * (1.0 - z))).exp()
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Mollifier {
    pub d1: f64,
    pub d2: f64,
    /// ∫_{d1}^{d2} ψ1.
    pub normalization: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Psi2 {
    pub value: f64,
    pub first: f64,
    pub second: f64,
}

impl Mollifier {
    pub fn new(d1: f64, d2: f64) -> Result<Self> {
        if !(d1 < d2) || !d1.is_finite() || !d2.is_finite() {
            return invalid(format!("mollifier needs finite d1 < d2, got ({d1}, {d2})"));
        }
        Ok(Mollifier { d1, d2, normalization: (d2 - d1) * unit_bump_mass() })
    }

    /// ψ1(τ) = exp(−(d2−d1)²/((τ−d1)(d2−τ))) on (d1, d2), zero elsewhere.
    pub fn psi1(&self, tau: f64) -> f64 {
        unit_bump((tau - self.d1) / (self.d2 - self.d1))
    }

    /// ψ2(τ) = ∫_τ^{d2} ψ1 / normalization with its first two derivatives.
    pub fn psi2(&self, tau: f64) -> Psi2 {
        let (d1, d2) = (self.d1, self.d2);
        if tau <= d1 {
            return Psi2 { value: 1.0, first: 0.0, second: 0.0 };
        }
        if tau >= d2 {
            return Psi2 { value: 0.0, first: 0.0, second: 0.0 };
        }
        let w = d2 - d1;
        let z = (tau - d1) / w;
        let mass = self.normalization / w;
        // Integrate over the shorter side to keep the tail accurate.
        let value = if z > 0.5 {
            integrate(unit_bump, z, 1.0, 1e-16) / mass
        } else {
            1.0 - integrate(unit_bump, 0.0, z, 1e-16) / mass
        };
        let b = unit_bump(z);
        let first = -b / self.normalization;
        // d/dτ of −1/(z(1−z)) = (1 − 2z)/(z(1−z))² / w.
        let zz = z * (1.0 - z);
        let second = -b * (1.0 - 2.0 * z) / (zz * zz * w) / self.normalization;
        Psi2 { value, first, second }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateaus() {
        let m = Mollifier::new(-1.0, 2.0).unwrap();
        assert_eq!(m.psi2(-2.0).value, 1.0);
        assert_eq!(m.psi2(3.0).value, 0.0);
        assert!(Mollifier::new(1.0, 1.0).is_err());
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let m = Mollifier::new(0.5, 1.5).unwrap();
        let h = 1e-5;
        for &t in &[0.6, 0.8, 1.0, 1.2, 1.4] {
            let p = m.psi2(t);
            let fd1 = (m.psi2(t + h).value - m.psi2(t - h).value) / (2.0 * h);
            let fd2 = (m.psi2(t + h).first - m.psi2(t - h).first) / (2.0 * h);
            assert!((p.first - fd1).abs() < 1e-7, "{t}: {} vs {fd1}", p.first);
            assert!((p.second - fd2).abs() < 1e-5 * (1.0 + p.second.abs()), "{t}");
        }
    }

    #[test]
    fn symmetric_midpoint_is_half() {
        let m = Mollifier::new(0.0, 1.0).unwrap();
        assert!((m.psi2(0.5).value - 0.5).abs() < 1e-13);
    }
}
