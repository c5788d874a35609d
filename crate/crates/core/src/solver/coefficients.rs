//! Named parametric coefficient forms for du − Δu dt = (a1·∇u + b1 u)dt + c1 u dW.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::{MovingDomain, ReferenceDomain};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalarField {
    Constant { value: f64 },
    /// offset + amp·sin(wavenumber·x₁ + phase).
    Sine { offset: f64, amp: f64, wavenumber: f64, phase: f64 },
}

impl ScalarField {
    pub fn zero() -> Self {
        ScalarField::Constant { value: 0.0 }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            ScalarField::Constant { value } => *value,
            ScalarField::Sine { offset, amp, wavenumber, phase } => offset + amp * (wavenumber * x[0] + phase).sin(),
        }
    }

    /// Sup norm over ℝⁿ.
    pub fn sup_norm(&self) -> f64 {
        match self {
            ScalarField::Constant { value } => value.abs(),
            ScalarField::Sine { offset, amp, .. } => offset.abs() + amp.abs(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ScalarField::Constant { value } => *value == 0.0,
            ScalarField::Sine { offset, amp, .. } => *offset == 0.0 && *amp == 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VectorField {
    Constant { value: Vec<f64> },
}

impl VectorField {
    pub fn zero(n: usize) -> Self {
        VectorField::Constant { value: vec![0.0; n] }
    }

    pub fn eval(&self, _x: &[f64]) -> &[f64] {
        match self {
            VectorField::Constant { value } => value,
        }
    }

    pub fn sup_norm(&self) -> f64 {
        match self {
            VectorField::Constant { value } => value.iter().map(|v| v * v).sum::<f64>().sqrt(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            VectorField::Constant { value } => value.len(),
        }
    }
}

/// Spatially constant boundary datum f(t) on Γ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundaryData {
    Constant { value: f64 },
    /// mean + amp·sin(2π·freq·t).
    Sine { mean: f64, amp: f64, freq: f64 },
}

impl BoundaryData {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            BoundaryData::Constant { value } => *value,
            BoundaryData::Sine { mean, amp, freq } => mean + amp * (2.0 * PI * freq * t).sin(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, BoundaryData::Constant { value } if *value == 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialDatum {
    Zero,
    /// 1-D: amp·(1 − y/L0), matching a boundary value amp on Γ = {0}.
    Linear { amp: f64 },
    /// 1-D: amp·sin(mode·π·y/L0).
    SineMode { amp: f64, mode: u32 },
    /// Star domain: amp·(1 − |y − c|²/r0(φ)²).
    Parabolic { amp: f64 },
    /// amp·exp(−|y − center|²/width²).
    Gaussian { amp: f64, center: Vec<f64>, width: f64 },
}

impl InitialDatum {
    pub fn eval(&self, reference: &ReferenceDomain, y: &[f64]) -> f64 {
        match (self, reference) {
            (InitialDatum::Zero, _) => 0.0,
            (InitialDatum::Linear { amp }, ReferenceDomain::Interval { length }) => amp * (1.0 - y[0] / length),
            (InitialDatum::SineMode { amp, mode }, ReferenceDomain::Interval { length }) => {
                amp * (*mode as f64 * PI * y[0] / length).sin()
            }
            (InitialDatum::Parabolic { amp }, ReferenceDomain::Star { center, radial }) => {
                let (dx, dy) = (y[0] - center[0], y[1] - center[1]);
                let r = radial.eval(dy.atan2(dx)).0;
                amp * (1.0 - (dx * dx + dy * dy) / (r * r))
            }
            (InitialDatum::Gaussian { amp, center, width }, _) => {
                let d2: f64 = y.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
                amp * (-d2 / (width * width)).exp()
            }
            _ => 0.0,
        }
    }

    fn compatible(&self, reference: &ReferenceDomain) -> bool {
        match (self, reference) {
            (InitialDatum::Zero, _) => true,
            (InitialDatum::Linear { .. }, ReferenceDomain::Interval { .. }) => true,
            (InitialDatum::SineMode { .. }, ReferenceDomain::Interval { .. }) => true,
            (InitialDatum::Parabolic { .. }, ReferenceDomain::Star { .. }) => true,
            (InitialDatum::Gaussian { center, .. }, r) => center.len() == r.dim(),
            _ => false,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            InitialDatum::Zero => true,
            InitialDatum::Linear { amp } | InitialDatum::SineMode { amp, .. } | InitialDatum::Parabolic { amp } => {
                *amp == 0.0
            }
            InitialDatum::Gaussian { amp, .. } => *amp == 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SPDECoefficients {
    pub a1: VectorField,
    pub b1: ScalarField,
    pub c1: ScalarField,
    pub f: BoundaryData,
    /// Lower bound F with f(t)² ≥ F on Γ.
    pub big_f: f64,
    pub u0: InitialDatum,
    pub kappa0: f64,
    pub q1: f64,
    pub q2: f64,
}

/// (q1, q2) = (‖a1‖² + 2‖b1‖ + ‖c1‖² + 1, ½‖a1‖² + ‖b1‖ + ½‖c1‖² + 1).
pub fn integrating_factors(a1: &VectorField, b1: &ScalarField, c1: &ScalarField) -> (f64, f64) {
    let (a, b, c) = (a1.sup_norm(), b1.sup_norm(), c1.sup_norm());
    (a * a + 2.0 * b + c * c + 1.0, 0.5 * a * a + b + 0.5 * c * c + 1.0)
}

impl SPDECoefficients {
    /// Builds coefficients with q1, q2 derived from the fields.
    pub fn new(
        a1: VectorField,
        b1: ScalarField,
        c1: ScalarField,
        f: BoundaryData,
        big_f: f64,
        u0: InitialDatum,
        kappa0: f64,
    ) -> Self {
        let (q1, q2) = integrating_factors(&a1, &b1, &c1);
        SPDECoefficients { a1, b1, c1, f, big_f, u0, kappa0, q1, q2 }
    }

    /// Heat equation with noise intensity c1 = `noise`, datum f ≡ `boundary`.
    pub fn heat(n: usize, noise: f64, boundary: f64, u0: InitialDatum) -> Self {
        Self::new(
            VectorField::zero(n),
            ScalarField::zero(),
            ScalarField::Constant { value: noise },
            BoundaryData::Constant { value: boundary },
            boundary * boundary,
            u0,
            std::f64::consts::E,
        )
    }

    /// Stored q1, q2 match the fields and the datum is consistent with `domain`.
    pub fn validate(&self, domain: &MovingDomain) -> Result<()> {
        let (q1, q2) = integrating_factors(&self.a1, &self.b1, &self.c1);
        if (q1 - self.q1).abs() > 1e-12 * q1 || (q2 - self.q2).abs() > 1e-12 * q2 {
            return invalid(format!("stored (q1, q2) = ({}, {}) differ from recomputed ({q1}, {q2})", self.q1, self.q2));
        }
        if self.a1.dim() != domain.dim() {
            return invalid("drift a1 dimension differs from the domain");
        }
        if !self.u0.compatible(&domain.reference) {
            return invalid(format!("initial datum {:?} does not fit the reference domain", self.u0));
        }
        if !(self.kappa0 >= std::f64::consts::E) {
            return invalid(format!("kappa0 = {} must be >= e", self.kappa0));
        }
        Ok(())
    }

    /// Condition on the datum: F > 0 and f(t)² ≥ F at every sample time.
    pub fn check_nontrivial_boundary(&self, times: &[f64]) -> Result<()> {
        if !(self.big_f > 0.0) {
            return invalid(format!("F = {} must be positive", self.big_f));
        }
        for &t in times {
            let v = self.f.eval(t);
            if v * v < self.big_f * (1.0 - 1e-12) {
                return invalid(format!("f({t})² = {} below F = {}", v * v, self.big_f));
            }
        }
        Ok(())
    }

    /// Noise enters the equation.
    pub fn is_stochastic(&self) -> bool {
        !self.c1.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factors_recompute() {
        let c = SPDECoefficients::new(
            VectorField::Constant { value: vec![3.0, 4.0] },
            ScalarField::Constant { value: -0.5 },
            ScalarField::Sine { offset: 0.2, amp: 0.3, wavenumber: 1.0, phase: 0.0 },
            BoundaryData::Constant { value: 1.0 },
            1.0,
            InitialDatum::Zero,
            3.0,
        );
        assert!((c.q1 - (25.0 + 1.0 + 0.25 + 1.0)).abs() < 1e-14);
        assert!((c.q2 - (12.5 + 0.5 + 0.125 + 1.0)).abs() < 1e-14);
    }

    #[test]
    fn tampered_factors_rejected() {
        let d = MovingDomain::static_interval(1.0, 1.0).unwrap();
        let mut c = SPDECoefficients::heat(1, 0.5, 1.0, InitialDatum::Linear { amp: 1.0 });
        assert!(c.validate(&d).is_ok());
        c.q1 += 0.1;
        assert!(c.validate(&d).is_err());
    }

    #[test]
    fn nontrivial_boundary() {
        let c = SPDECoefficients::heat(1, 0.0, 1.0, InitialDatum::Zero);
        assert!(c.check_nontrivial_boundary(&[0.0, 0.5, 1.0]).is_ok());
        let mut z = c.clone();
        z.f = BoundaryData::Sine { mean: 1.0, amp: 0.5, freq: 1.0 };
        assert!(z.check_nontrivial_boundary(&[0.75]).is_err());
        let zero = SPDECoefficients::heat(1, 0.0, 0.0, InitialDatum::Zero);
        assert!(zero.check_nontrivial_boundary(&[0.0]).is_err());
    }
}
