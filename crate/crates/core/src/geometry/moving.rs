//! Moving domains G(t) = τ(t, G(0)) given by named parametric motion laws.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::snapshot::DomainSnapshot;
use crate::error::{invalid, Error, Result};

/// Scalar law p(t) with p(0) = 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TimeProfile {
    Zero,
    Linear { rate: f64 },
    /// Σ_k coeffs[k−1]·t^k.
    Polynomial { coeffs: Vec<f64> },
    /// amp·sin(2π·freq·t).
    Sine { amp: f64, freq: f64 },
    /// 0 before `at`, `jump` from `at` on.
    Step { at: f64, jump: f64 },
}

impl TimeProfile {
    pub fn value(&self, t: f64) -> f64 {
        match self {
            TimeProfile::Zero => 0.0,
            TimeProfile::Linear { rate } => rate * t,
            TimeProfile::Polynomial { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| (acc + c) * t),
            TimeProfile::Sine { amp, freq } => amp * (2.0 * PI * freq * t).sin(),
            TimeProfile::Step { at, jump } => {
                if t >= *at {
                    *jump
                } else {
                    0.0
                }
            }
        }
    }

    /// p′(t); the step law reports 0 away from its jump.
    pub fn derivative(&self, t: f64) -> f64 {
        match self {
            TimeProfile::Zero | TimeProfile::Step { .. } => 0.0,
            TimeProfile::Linear { rate } => *rate,
            TimeProfile::Polynomial { coeffs } => {
                let mut acc = 0.0;
                for (k, c) in coeffs.iter().enumerate().rev() {
                    acc = acc * t + (k + 1) as f64 * c;
                }
                acc
            }
            TimeProfile::Sine { amp, freq } => amp * 2.0 * PI * freq * (2.0 * PI * freq * t).cos(),
        }
    }

    pub fn is_continuous(&self) -> bool {
        !matches!(self, TimeProfile::Step { jump, .. } if *jump != 0.0)
    }
}

/// r(φ) = mean + Σ_k cos[k−1]·cos(kφ) + sin[k−1]·sin(kφ).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub mean: f64,
    #[serde(default)]
    pub cos: Vec<f64>,
    #[serde(default)]
    pub sin: Vec<f64>,
}

impl RadialProfile {
    pub fn circle(radius: f64) -> Self {
        RadialProfile { mean: radius, cos: vec![], sin: vec![] }
    }

    /// (r(φ), r′(φ)).
    pub fn eval(&self, phi: f64) -> (f64, f64) {
        let mut r = self.mean;
        let mut dr = 0.0;
        for (k, c) in self.cos.iter().enumerate() {
            let m = (k + 1) as f64;
            r += c * (m * phi).cos();
            dr -= c * m * (m * phi).sin();
        }
        for (k, s) in self.sin.iter().enumerate() {
            let m = (k + 1) as f64;
            r += s * (m * phi).sin();
            dr += s * m * (m * phi).cos();
        }
        (r, dr)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReferenceDomain {
    /// (0, length); Γ = {0}, I = {length}.
    Interval { length: f64 },
    /// {c + r e_r : r < radial(φ)}.
    Star { center: [f64; 2], radial: RadialProfile },
}

impl ReferenceDomain {
    pub fn dim(&self) -> usize {
        match self {
            ReferenceDomain::Interval { .. } => 1,
            ReferenceDomain::Star { .. } => 2,
        }
    }

    pub fn center(&self) -> Vec<f64> {
        match self {
            ReferenceDomain::Interval { .. } => vec![0.0],
            ReferenceDomain::Star { center, .. } => center.to_vec(),
        }
    }

    /// Closure membership with slack `tol`.
    pub fn contains(&self, y: &[f64], tol: f64) -> bool {
        match self {
            ReferenceDomain::Interval { length } => y[0] >= -tol && y[0] <= length + tol,
            ReferenceDomain::Star { center, radial } => {
                let (dx, dy) = (y[0] - center[0], y[1] - center[1]);
                (dx * dx + dy * dy).sqrt() <= radial.eval(dy.atan2(dx)).0 + tol
            }
        }
    }

    /// Characteristic size used to scale tolerances.
    pub fn scale(&self) -> f64 {
        match self {
            ReferenceDomain::Interval { length } => *length,
            ReferenceDomain::Star { radial, .. } => radial.mean,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Motion {
    Identity,
    /// τ = c + (1 + rate·t)(y − c), c the reference center (0 for intervals).
    Dilation { rate: f64 },
    /// τ = y + velocity·t.
    Translation { velocity: Vec<f64> },
    /// 1-D: s(t) = L0 + profile(t), τ = y·s(t)/L0.
    Endpoint { profile: TimeProfile },
    /// 2-D: τ = c + (y − c)(1 + profile(t)·modes(φ)).
    Radial { profile: TimeProfile, modes: RadialProfile },
    /// 2-D: τ = (y1 + eps·t·sin(π y2), y2).
    Shear { eps: f64 },
}

/// Γ, the part of ∂G(t) that carries the boundary datum f.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FixedBoundary {
    /// 1-D left endpoint y = 0.
    LeftEndpoint,
    /// 2-D reference boundary arc of angles [lo, hi] (radians, lo < hi).
    Arc { lo: f64, hi: f64 },
}

/// Classification of a reference boundary location.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryPart {
    Fixed,
    Moving,
}

/// Derivatives of ρ at x = τ(t, y): `grad[i][k]` = ∂_{x_i}ρ_k,
/// `hessian[i][k]` = ∂²_{x_i}ρ_k, `time[k]` = ∂_tρ_k.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PullbackJacobians {
    pub grad: Vec<Vec<f64>>,
    pub hessian: Vec<Vec<f64>>,
    pub time: Vec<f64>,
}

/// Invariant diagnostics of a moving domain on a sample grid.
#[derive(Debug, Clone, Serialize)]
pub struct DomainInvariants {
    pub identity_at_zero: f64,
    pub roundtrip: f64,
    pub max_speed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MovingDomain {
    pub reference: ReferenceDomain,
    pub motion: Motion,
    pub horizon: f64,
    pub fixed_boundary: FixedBoundary,
    pub moving_boundary_id: String,
}

impl MovingDomain {
    pub fn new(
        reference: ReferenceDomain,
        motion: Motion,
        horizon: f64,
        fixed_boundary: FixedBoundary,
        moving_boundary_id: impl Into<String>,
    ) -> Result<Self> {
        if !(horizon > 0.0) {
            return invalid(format!("horizon T = {horizon} must be positive"));
        }
        let n = reference.dim();
        match &reference {
            ReferenceDomain::Interval { length } if !(*length > 0.0) => {
                return invalid("interval length must be positive")
            }
            ReferenceDomain::Star { radial, .. } => {
                for k in 0..360 {
                    if !(radial.eval(k as f64 * PI / 180.0).0 > 0.0) {
                        return invalid("reference radial function must be positive");
                    }
                }
            }
            _ => {}
        }
        let ok = match (&motion, n) {
            (Motion::Identity, _) | (Motion::Dilation { .. }, _) => true,
            (Motion::Translation { velocity }, _) => velocity.len() == n,
            (Motion::Endpoint { .. }, 1) => true,
            (Motion::Radial { .. }, 2) | (Motion::Shear { .. }, 2) => true,
            _ => false,
        };
        if !ok {
            return invalid(format!("motion {motion:?} incompatible with dimension {n}"));
        }
        match (&fixed_boundary, n) {
            (FixedBoundary::LeftEndpoint, 1) => {}
            (FixedBoundary::Arc { lo, hi }, 2) if lo < hi => {}
            _ => return invalid(format!("fixed boundary {fixed_boundary:?} incompatible with dimension {n}")),
        }
        let d = MovingDomain { reference, motion, horizon, fixed_boundary, moving_boundary_id: moving_boundary_id.into() };
        let steps = 256;
        for k in 0..=steps {
            let t = horizon * k as f64 / steps as f64;
            if !(d.stretch_min(t) > 0.0) {
                return Err(Error::SingularGeometry(format!("motion degenerates at t = {t}")));
            }
        }
        Ok(d)
    }

    /// Static interval (0, length) with Γ = {0}.
    pub fn static_interval(length: f64, horizon: f64) -> Result<Self> {
        Self::new(ReferenceDomain::Interval { length }, Motion::Identity, horizon, FixedBoundary::LeftEndpoint, "right")
    }

    /// Interval (0, s(t)), s(t) = length + profile(t), Γ = {0}.
    pub fn moving_interval(length: f64, profile: TimeProfile, horizon: f64) -> Result<Self> {
        Self::new(
            ReferenceDomain::Interval { length },
            Motion::Endpoint { profile },
            horizon,
            FixedBoundary::LeftEndpoint,
            "right",
        )
    }

    pub fn dim(&self) -> usize {
        self.reference.dim()
    }

    pub fn is_static(&self) -> bool {
        match &self.motion {
            Motion::Identity => true,
            Motion::Dilation { rate } => *rate == 0.0,
            Motion::Translation { velocity } => velocity.iter().all(|v| *v == 0.0),
            Motion::Endpoint { profile } | Motion::Radial { profile, .. } => *profile == TimeProfile::Zero,
            Motion::Shear { eps } => *eps == 0.0,
        }
    }

    /// Smallest local stretch factor at time t (positive for a diffeomorphism).
    fn stretch_min(&self, t: f64) -> f64 {
        match (&self.motion, &self.reference) {
            (Motion::Dilation { rate }, _) => 1.0 + rate * t,
            (Motion::Endpoint { profile }, ReferenceDomain::Interval { length }) => 1.0 + profile.value(t) / length,
            (Motion::Radial { profile, modes }, _) => {
                let p = profile.value(t);
                (0..360).map(|k| 1.0 + p * modes.eval(k as f64 * PI / 180.0).0).fold(f64::INFINITY, f64::min)
            }
            _ => 1.0,
        }
    }

    fn radial_gain(&self, t: f64, angle: f64) -> f64 {
        match &self.motion {
            Motion::Radial { profile, modes } => 1.0 + profile.value(t) * modes.eval(angle).0,
            _ => 1.0,
        }
    }

    /// τ(t, y).
    pub fn tau(&self, t: f64, y: &[f64]) -> Vec<f64> {
        let c = self.reference.center();
        match (&self.motion, &self.reference) {
            (Motion::Identity, _) => y.to_vec(),
            (Motion::Dilation { rate }, _) => y.iter().zip(&c).map(|(yi, ci)| ci + (1.0 + rate * t) * (yi - ci)).collect(),
            (Motion::Translation { velocity }, _) => y.iter().zip(velocity).map(|(yi, v)| yi + v * t).collect(),
            (Motion::Endpoint { profile }, ReferenceDomain::Interval { length }) => {
                vec![y[0] * (length + profile.value(t)) / length]
            }
            (Motion::Radial { .. }, _) => {
                let g = self.radial_gain(t, (y[1] - c[1]).atan2(y[0] - c[0]));
                vec![c[0] + g * (y[0] - c[0]), c[1] + g * (y[1] - c[1])]
            }
            (Motion::Shear { eps }, _) => vec![y[0] + eps * t * (PI * y[1]).sin(), y[1]],
            _ => unreachable!("validated in MovingDomain::new"),
        }
    }

    /// ρ(t, x) = τ(t, ·)^{−1}(x).
    pub fn rho(&self, t: f64, x: &[f64]) -> Vec<f64> {
        let c = self.reference.center();
        match (&self.motion, &self.reference) {
            (Motion::Identity, _) => x.to_vec(),
            (Motion::Dilation { rate }, _) => x.iter().zip(&c).map(|(xi, ci)| ci + (xi - ci) / (1.0 + rate * t)).collect(),
            (Motion::Translation { velocity }, _) => x.iter().zip(velocity).map(|(xi, v)| xi - v * t).collect(),
            (Motion::Endpoint { profile }, ReferenceDomain::Interval { length }) => {
                vec![x[0] * length / (length + profile.value(t))]
            }
            (Motion::Radial { .. }, _) => {
                let g = self.radial_gain(t, (x[1] - c[1]).atan2(x[0] - c[0]));
                vec![c[0] + (x[0] - c[0]) / g, c[1] + (x[1] - c[1]) / g]
            }
            (Motion::Shear { eps }, _) => vec![x[0] - eps * t * (PI * x[1]).sin(), x[1]],
            _ => unreachable!("validated in MovingDomain::new"),
        }
    }

    /// x ∈ G(t) (open set, boundary excluded up to 1e-12 relative slack).
    pub fn contains(&self, t: f64, x: &[f64]) -> bool {
        let y = self.rho(t, x);
        let tol = -1e-12 * self.reference.scale();
        self.reference.contains(&y, tol)
    }

    /// Which part of ∂G(0) a reference boundary point belongs to.
    pub fn boundary_part(&self, y: &[f64]) -> BoundaryPart {
        match (&self.fixed_boundary, &self.reference) {
            (FixedBoundary::LeftEndpoint, ReferenceDomain::Interval { length }) => {
                if y[0] < 0.5 * length {
                    BoundaryPart::Fixed
                } else {
                    BoundaryPart::Moving
                }
            }
            (FixedBoundary::Arc { lo, hi }, ReferenceDomain::Star { center, .. }) => {
                let ang = (y[1] - center[1]).atan2(y[0] - center[0]);
                let wrapped = |a: f64| {
                    let mut a = a;
                    while a < *lo {
                        a += 2.0 * PI;
                    }
                    a
                };
                if wrapped(ang) <= *hi {
                    BoundaryPart::Fixed
                } else {
                    BoundaryPart::Moving
                }
            }
            _ => BoundaryPart::Moving,
        }
    }

    /// Point-set Γ sampled on the reference boundary at spacing ≈ h.
    pub fn fixed_boundary_points(&self, h: f64) -> Vec<Vec<f64>> {
        match (&self.fixed_boundary, &self.reference) {
            (FixedBoundary::LeftEndpoint, _) => vec![vec![0.0]],
            (FixedBoundary::Arc { lo, hi }, ReferenceDomain::Star { center, radial }) => {
                let m = ((hi - lo) * radial.mean / h).ceil().max(1.0) as usize;
                (0..=m)
                    .map(|k| {
                        let a = lo + (hi - lo) * k as f64 / m as f64;
                        let r = radial.eval(a).0;
                        vec![center[0] + r * a.cos(), center[1] + r * a.sin()]
                    })
                    .collect()
            }
            _ => vec![],
        }
    }

    fn check_time(&self, t: f64) -> Result<()> {
        let eps = 1e-12 * self.horizon;
        if t < -eps || t > self.horizon + eps {
            return Err(Error::OutOfDomain(format!("t = {t} outside [0, {}]", self.horizon)));
        }
        Ok(())
    }

    /// Derivatives of ρ at (t, τ(t, y)).
    pub fn pullback_jacobians(&self, t: f64, y: &[f64]) -> Result<PullbackJacobians> {
        self.check_time(t)?;
        let n = self.dim();
        if y.len() != n {
            return invalid(format!("point has {} coordinates, domain has {n}", y.len()));
        }
        if !self.reference.contains(y, 1e-9 * self.reference.scale()) {
            return Err(Error::OutOfDomain(format!("reference point {y:?} outside G(0)")));
        }
        let eye = |s: f64| -> Vec<Vec<f64>> {
            (0..n).map(|i| (0..n).map(|k| if i == k { s } else { 0.0 }).collect()).collect()
        };
        let zeros = vec![vec![0.0; n]; n];
        let c = self.reference.center();
        Ok(match (&self.motion, &self.reference) {
            (Motion::Identity, _) => PullbackJacobians { grad: eye(1.0), hessian: zeros, time: vec![0.0; n] },
            (Motion::Dilation { rate }, _) => {
                let g = 1.0 + rate * t;
                PullbackJacobians {
                    grad: eye(1.0 / g),
                    hessian: zeros,
                    time: y.iter().zip(&c).map(|(yi, ci)| -(yi - ci) * rate / g).collect(),
                }
            }
            (Motion::Translation { velocity }, _) => {
                PullbackJacobians { grad: eye(1.0), hessian: zeros, time: velocity.iter().map(|v| -v).collect() }
            }
            (Motion::Endpoint { profile }, ReferenceDomain::Interval { length }) => {
                let s = length + profile.value(t);
                PullbackJacobians {
                    grad: vec![vec![length / s]],
                    hessian: vec![vec![0.0]],
                    time: vec![-y[0] * profile.derivative(t) / s],
                }
            }
            (Motion::Shear { eps }, _) => {
                let x2 = y[1];
                PullbackJacobians {
                    grad: vec![vec![1.0, 0.0], vec![-eps * t * PI * (PI * x2).cos(), 1.0]],
                    hessian: vec![vec![0.0, 0.0], vec![eps * t * PI * PI * (PI * x2).sin(), 0.0]],
                    time: vec![-eps * (PI * x2).sin(), 0.0],
                }
            }
            (Motion::Radial { .. }, _) => self.jacobians_fd(t, &self.tau(t, y), 1e-3 * self.reference.scale()),
            _ => unreachable!("validated in MovingDomain::new"),
        })
    }

    /// Central-difference derivatives of ρ at physical point x with spatial
    /// step h (gradient uses h/100).
    pub fn jacobians_fd(&self, t: f64, x: &[f64], h: f64) -> PullbackJacobians {
        let n = x.len();
        let mut grad = vec![vec![0.0; n]; n];
        let mut hessian = vec![vec![0.0; n]; n];
        let r0 = self.rho(t, x);
        let hg = h / 100.0;
        for i in 0..n {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[i] += hg;
            xm[i] -= hg;
            let (rp, rm) = (self.rho(t, &xp), self.rho(t, &xm));
            xp[i] = x[i] + h;
            xm[i] = x[i] - h;
            let (rp2, rm2) = (self.rho(t, &xp), self.rho(t, &xm));
            for k in 0..n {
                grad[i][k] = (rp[k] - rm[k]) / (2.0 * hg);
                hessian[i][k] = (rp2[k] - 2.0 * r0[k] + rm2[k]) / (h * h);
            }
        }
        let ht = 1e-6 * self.horizon;
        let (ta, tb) = ((t - ht).max(0.0), (t + ht).min(self.horizon));
        let (ra, rb) = (self.rho(ta, x), self.rho(tb, x));
        let time = (0..n).map(|k| (rb[k] - ra[k]) / (tb - ta)).collect();
        PullbackJacobians { grad, hessian, time }
    }

    /// Sampled snapshot of G(t) at spacing h. Normals in 2-D are the
    /// reference radial normals pushed forward by (∇ρ)ᵀ.
    pub fn snapshot(&self, t: f64, h: f64) -> Result<DomainSnapshot> {
        self.check_time(t)?;
        match &self.reference {
            ReferenceDomain::Interval { length } => {
                let (lo, hi) = (self.tau(t, &[0.0])[0], self.tau(t, &[*length])[0]);
                DomainSnapshot::interval(t, lo, hi, h)
            }
            ReferenceDomain::Star { center, radial } => {
                let probe = 720;
                let mut perimeter = 0.0;
                let mut prev = self.tau(t, &[center[0] + radial.eval(0.0).0, center[1]]);
                let mut lo = prev.clone();
                let mut hi = prev.clone();
                for k in 1..=probe {
                    let a = 2.0 * PI * k as f64 / probe as f64;
                    let r = radial.eval(a).0;
                    let p = self.tau(t, &[center[0] + r * a.cos(), center[1] + r * a.sin()]);
                    perimeter += ((p[0] - prev[0]).powi(2) + (p[1] - prev[1]).powi(2)).sqrt();
                    for d in 0..2 {
                        lo[d] = lo[d].min(p[d]);
                        hi[d] = hi[d].max(p[d]);
                    }
                    prev = p;
                }
                let m = (perimeter / h).ceil().max(8.0) as usize;
                let mut boundary = Vec::with_capacity(2 * m);
                let mut normals = Vec::with_capacity(2 * m);
                for k in 0..m {
                    let a = 2.0 * PI * k as f64 / m as f64;
                    let (r, dr) = radial.eval(a);
                    let (ca, sa) = (a.cos(), a.sin());
                    let x = self.tau(t, &[center[0] + r * ca, center[1] + r * sa]);
                    let nref = [r * ca + dr * sa, r * sa - dr * ca];
                    let j = self.jacobians_fd(t, &x, 1e-4 * radial.mean);
                    let mut nv = [0.0; 2];
                    for (i, item) in nv.iter_mut().enumerate() {
                        *item = j.grad[i][0] * nref[0] + j.grad[i][1] * nref[1];
                    }
                    let nn = (nv[0] * nv[0] + nv[1] * nv[1]).sqrt();
                    boundary.extend_from_slice(&x);
                    normals.extend_from_slice(&[nv[0] / nn, nv[1] / nn]);
                }
                let mut interior = Vec::new();
                let (i0, i1) = ((lo[0] / h).floor() as i64, (hi[0] / h).ceil() as i64);
                let (j0, j1) = ((lo[1] / h).floor() as i64, (hi[1] / h).ceil() as i64);
                for i in i0..=i1 {
                    for j in j0..=j1 {
                        let x = [i as f64 * h, j as f64 * h];
                        if self.contains(t, &x) {
                            interior.extend_from_slice(&x);
                        }
                    }
                }
                DomainSnapshot::new(t, 2, interior, boundary, normals, h)
            }
        }
    }

    /// Identity-at-zero error, ρ∘τ roundtrip error and the largest
    /// finite-difference speed of τ over `nt` time steps and reference `samples`.
    pub fn invariants(&self, nt: usize, samples: &[Vec<f64>]) -> DomainInvariants {
        let mut id0: f64 = 0.0;
        let mut rt: f64 = 0.0;
        let mut speed: f64 = 0.0;
        let dt = self.horizon / nt as f64;
        for y in samples {
            let x0 = self.tau(0.0, y);
            id0 = id0.max(x0.iter().zip(y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
            let mut prev = x0;
            for k in 0..=nt {
                let t = k as f64 * dt;
                let x = self.tau(t, y);
                let back = self.rho(t, &x);
                rt = rt.max(back.iter().zip(y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
                if k > 0 {
                    let v = x.iter().zip(&prev).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt() / dt;
                    speed = speed.max(v);
                }
                prev = x;
            }
        }
        DomainInvariants { identity_at_zero: id0, roundtrip: rt, max_speed: speed }
    }
}

pub fn pullback_jacobians(family: &MovingDomain, t: f64, y: &[f64]) -> Result<PullbackJacobians> {
    family.pullback_jacobians(t, y)
}
