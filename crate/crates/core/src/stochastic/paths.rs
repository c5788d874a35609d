//! Brownian paths and seeded ensembles.

use std::io::{Read, Write};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::rng::PathStream;
use crate::error::{invalid, Error, Result};

const MAGIC: &[u8; 8] = b"MBWPATH1";

/// Increments ΔW_k on a shared time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BrownianPath {
    pub times: Arc<Vec<f64>>,
    pub increments: Vec<f64>,
    /// Master seed; the path's stream index is `index`.
    pub seed: u64,
    pub index: u64,
}

impl BrownianPath {
    /// Generates path `index` under `seed` on `times`.
    pub fn generate(seed: u64, index: u64, times: Arc<Vec<f64>>) -> Self {
        let mut stream = PathStream::new(seed, index);
        let increments = times.windows(2).map(|w| (w[1] - w[0]).sqrt() * stream.next_normal()).collect();
        BrownianPath { times, increments, seed, index }
    }

    /// W(t_k), k = 0..=M, with W(0) = 0.
    pub fn values(&self) -> Vec<f64> {
        let mut w = Vec::with_capacity(self.increments.len() + 1);
        let mut acc = 0.0;
        w.push(0.0);
        for d in &self.increments {
            acc += d;
            w.push(acc);
        }
        w
    }

    pub fn terminal(&self) -> f64 {
        self.increments.iter().sum()
    }
}

/// Identity of the noise driving an ensemble; equal keys mean equal paths.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseKey {
    pub base_seed: u64,
    pub n: usize,
    pub times: Arc<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct Ensemble {
    pub paths: Vec<BrownianPath>,
    pub base_seed: u64,
    pub n: usize,
    pub times: Arc<Vec<f64>>,
}

fn check_grid(times: &[f64]) -> Result<()> {
    if times.len() < 2 {
        return invalid("time grid needs at least two points");
    }
    if times[0] != 0.0 {
        return invalid(format!("time grid must start at 0, starts at {}", times[0]));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return invalid("time grid is not strictly increasing");
    }
    Ok(())
}

/// Uniform grid 0, T/M, …, T.
pub fn uniform_times(horizon: f64, steps: usize) -> Vec<f64> {
    (0..=steps).map(|k| horizon * k as f64 / steps as f64).collect()
}

/// N paths keyed by (base_seed, path index, step index).
pub fn generate_paths(base_seed: u64, n: usize, times: &[f64]) -> Result<Ensemble> {
    if n == 0 {
        return invalid("ensemble needs N >= 1");
    }
    check_grid(times)?;
    let times = Arc::new(times.to_vec());
    let paths = (0..n as u64)
        .into_par_iter()
        .map(|i| BrownianPath::generate(base_seed, i, times.clone()))
        .collect();
    Ok(Ensemble { paths, base_seed, n, times })
}

impl Ensemble {
    pub fn key(&self) -> NoiseKey {
        NoiseKey { base_seed: self.base_seed, n: self.n, times: self.times.clone() }
    }

    pub fn steps(&self) -> usize {
        self.times.len() - 1
    }

    /// Sample mean and variance of W(T).
    pub fn terminal_moments(&self) -> (f64, f64) {
        let w: Vec<f64> = self.paths.iter().map(|p| p.terminal()).collect();
        let n = w.len() as f64;
        let mean = w.iter().sum::<f64>() / n;
        let var = w.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0).max(1.0);
        (mean, var)
    }

    /// Binary dump: magic, M, N (u64 LE), M+1 times, then N·M increments
    /// path-major, all little-endian f64.
    pub fn write_binary<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(MAGIC)?;
        out.write_all(&(self.steps() as u64).to_le_bytes())?;
        out.write_all(&(self.n as u64).to_le_bytes())?;
        for t in self.times.iter() {
            out.write_all(&t.to_le_bytes())?;
        }
        for p in &self.paths {
            for d in &p.increments {
                out.write_all(&d.to_le_bytes())?;
            }
        }
        Ok(())
    }
}

/// Contents of a binary path dump.
#[derive(Debug, Clone, PartialEq)]
pub struct PathDump {
    pub times: Vec<f64>,
    /// `increments[p]` holds path p.
    pub increments: Vec<Vec<f64>>,
}

pub fn read_binary<R: Read>(mut input: R) -> Result<PathDump> {
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::InvalidInput("not a path dump (bad magic)".into()));
    }
    let mut word = [0u8; 8];
    input.read_exact(&mut word)?;
    let m = u64::from_le_bytes(word) as usize;
    input.read_exact(&mut word)?;
    let n = u64::from_le_bytes(word) as usize;
    let read_f64 = |inp: &mut R| -> Result<f64> {
        let mut b = [0u8; 8];
        inp.read_exact(&mut b)?;
        Ok(f64::from_le_bytes(b))
    };
    let times = (0..=m).map(|_| read_f64(&mut input)).collect::<Result<Vec<_>>>()?;
    let mut increments = Vec::with_capacity(n);
    for _ in 0..n {
        increments.push((0..m).map(|_| read_f64(&mut input)).collect::<Result<Vec<_>>>()?);
    }
    Ok(PathDump { times, increments })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(generate_paths(1, 4, &[0.0, 0.5, 0.4]).is_err());
        assert!(generate_paths(1, 4, &[0.1, 0.5]).is_err());
        assert!(generate_paths(1, 0, &[0.0, 0.5]).is_err());
    }

    #[test]
    fn values_start_at_zero() {
        let e = generate_paths(9, 3, &uniform_times(1.0, 10)).unwrap();
        let w = e.paths[1].values();
        assert_eq!(w[0], 0.0);
        assert_eq!(w.len(), 11);
        assert!((w[10] - e.paths[1].terminal()).abs() < 1e-14);
    }

    #[test]
    fn binary_roundtrip() {
        let e = generate_paths(5, 3, &uniform_times(2.0, 7)).unwrap();
        let mut buf = Vec::new();
        e.write_binary(&mut buf).unwrap();
        assert_eq!(buf.len(), 24 + 8 * 8 + 3 * 7 * 8);
        let d = read_binary(&buf[..]).unwrap();
        assert_eq!(d.times, *e.times);
        for (p, inc) in e.paths.iter().zip(&d.increments) {
            assert_eq!(&p.increments, inc);
        }
        assert!(read_binary(&b"garbage!........"[..]).is_err());
    }
}
