//! Backward heat kernel and the kernel-weighted local mass H.

use crate::error::{Error, Result};
use crate::functionals::{Estimate, Region, SliceQuadrature};
use crate::weights::Mollifier;

use super::field::EnsembleField;

/// K(t, x; t0, y) = (t0 − t)^{−n/2} exp(−|x − y|²/(4(t0 − t))), t < t0.
pub fn heat_kernel(t: f64, x: &[f64], t0: f64, y: &[f64]) -> Result<f64> {
    if !(t < t0) {
        return Err(Error::Domain(format!("heat kernel needs t < t0, got t = {t}, t0 = {t0}")));
    }
    let tau = t0 - t;
    let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(tau.powf(-(x.len() as f64) / 2.0) * (-d2 / (4.0 * tau)).exp())
}

/// Central-difference K_t + ΔK at (t, x) with steps (dt, h).
pub fn heat_kernel_residual(t: f64, x: &[f64], t0: f64, y: &[f64], h: f64, dt: f64) -> Result<f64> {
    let kt = (heat_kernel(t + dt, x, t0, y)? - heat_kernel(t - dt, x, t0, y)?) / (2.0 * dt);
    let k0 = heat_kernel(t, x, t0, y)?;
    let mut lap = 0.0;
    let mut p = x.to_vec();
    for i in 0..x.len() {
        p[i] = x[i] + h;
        let kp = heat_kernel(t, &p, t0, y)?;
        p[i] = x[i] - h;
        let km = heat_kernel(t, &p, t0, y)?;
        p[i] = x[i];
        lap += (kp - 2.0 * k0 + km) / (h * h);
    }
    Ok(kt + lap)
}

/// Smooth radial cutoff ψ(x) = ψ2(|x − center|) equal to 1 on B_inner
/// and 0 outside B_outer.
#[derive(Debug, Clone)]
pub struct RadialCutoff {
    pub center: Vec<f64>,
    pub mollifier: Mollifier,
}

impl RadialCutoff {
    pub fn new(center: &[f64], inner: f64, outer: f64) -> Result<Self> {
        Ok(RadialCutoff { center: center.to_vec(), mollifier: Mollifier::new(inner, outer)? })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let r = x.iter().zip(&self.center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        self.mollifier.psi2(r).value
    }

    pub fn support(&self) -> Region {
        Region::ball(&self.center, self.mollifier.d2)
    }
}

/// H(t; t0, y) = E∫_{G(t)} (ψu)² K(t, x; t0, y) dx at the stored slice
/// nearest to t.
pub fn weighted_mass_h(field: &EnsembleField, t: f64, t0: f64, y: &[f64], cutoff: &RadialCutoff) -> Result<Estimate> {
    let s = field.slice_at(t)?;
    let ts = field.slices[s].time;
    heat_kernel(ts, y, t0, y)?;
    let q = SliceQuadrature::new(field, s, &cutoff.support())?;
    let f = |u: f64, _: &[f64], x: &[f64]| {
        let c = cutoff.eval(x) * u;
        c * c * heat_kernel(ts, x, t0, y).unwrap_or(0.0)
    };
    let samples: Vec<f64> = (0..field.stored_paths()).map(|p| q.integrate(field, p, &f)).collect();
    Ok(Estimate::from_samples(&samples))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_on_diagonal() {
        assert_eq!(heat_kernel(0.0, &[0.3], 0.25, &[0.3]).unwrap(), 2.0);
        assert!(heat_kernel(0.5, &[0.0], 0.5, &[0.0]).is_err());
    }

    #[test]
    fn kernel_residual_small() {
        let r = heat_kernel_residual(0.0, &[0.1, -0.2], 0.1, &[0.0, 0.0], 1e-3, 1e-5).unwrap();
        assert!(r.abs() < 1e-2, "{r}");
    }
}
