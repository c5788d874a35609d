//! Tridiagonal factorization and Jacobi-preconditioned BiCGSTAB.

use crate::error::{Error, Result};

/// LU factors of a tridiagonal matrix for repeated solves.
#[derive(Debug, Clone)]
pub struct Tridiagonal {
    lower: Vec<f64>,
    inv_pivot: Vec<f64>,
    upper_mod: Vec<f64>,
}

impl Tridiagonal {
    /// Factors the matrix with sub-diagonal `lo[i]` (row i, col i−1),
    /// diagonal `di[i]` and super-diagonal `up[i]` (row i, col i+1).
    pub fn factor(lo: &[f64], di: &[f64], up: &[f64]) -> Result<Self> {
        let n = di.len();
        let mut inv_pivot = vec![0.0; n];
        let mut upper_mod = vec![0.0; n];
        let mut prev = 0.0;
        for i in 0..n {
            let p = di[i] - if i > 0 { lo[i] * prev } else { 0.0 };
            if !(p.abs() > 1e-300) || !p.is_finite() {
                return Err(Error::Numerical(format!("zero pivot {p} in tridiagonal solve at row {i}")));
            }
            inv_pivot[i] = 1.0 / p;
            upper_mod[i] = if i + 1 < n { up[i] / p } else { 0.0 };
            prev = upper_mod[i];
        }
        Ok(Tridiagonal { lower: lo.to_vec(), inv_pivot, upper_mod })
    }

    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        let n = rhs.len();
        for i in 0..n {
            let carry = if i > 0 { self.lower[i] * rhs[i - 1] } else { 0.0 };
            rhs[i] = (rhs[i] - carry) * self.inv_pivot[i];
        }
        for i in (0..n.saturating_sub(1)).rev() {
            rhs[i] -= self.upper_mod[i] * rhs[i + 1];
        }
    }
}

/// Solves A x = b for x starting from `x`, where `matvec(v, out)` forms
/// out = A v and `diag` holds A's diagonal. Returns the iteration count.
pub fn bicgstab(
    matvec: &dyn Fn(&[f64], &mut [f64]),
    diag: &[f64],
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iter: usize,
) -> Result<usize> {
    let n = b.len();
    let dot = |a: &[f64], c: &[f64]| a.iter().zip(c).map(|(p, q)| p * q).sum::<f64>();
    let bnorm = dot(b, b).sqrt();
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(0);
    }
    let inv: Vec<f64> = diag.iter().map(|d| if *d != 0.0 { 1.0 / d } else { 1.0 }).collect();
    let mut r = vec![0.0; n];
    matvec(x, &mut r);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    if dot(&r, &r).sqrt() <= tol * bnorm {
        return Ok(0);
    }
    let r_hat = r.clone();
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut t = vec![0.0; n];
    for it in 1..=max_iter {
        let rho_new = dot(&r_hat, &r);
        if rho_new == 0.0 {
            return Err(Error::Numerical(format!("BiCGSTAB breakdown (rho = 0) at iteration {it}")));
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
            y[i] = inv[i] * p[i];
        }
        matvec(&y, &mut v);
        alpha = rho / dot(&r_hat, &v);
        for i in 0..n {
            s[i] = r[i] - alpha * v[i];
        }
        if dot(&s, &s).sqrt() <= tol * bnorm {
            for i in 0..n {
                x[i] += alpha * y[i];
            }
            return Ok(it);
        }
        for i in 0..n {
            z[i] = inv[i] * s[i];
        }
        matvec(&z, &mut t);
        let tt = dot(&t, &t);
        omega = if tt > 0.0 { dot(&t, &s) / tt } else { 0.0 };
        for i in 0..n {
            x[i] += alpha * y[i] + omega * z[i];
            r[i] = s[i] - omega * t[i];
        }
        let res = dot(&r, &r).sqrt();
        if !res.is_finite() {
            return Err(Error::Numerical(format!("BiCGSTAB diverged at iteration {it}")));
        }
        if res <= tol * bnorm {
            return Ok(it);
        }
        if omega == 0.0 {
            return Err(Error::Numerical(format!("BiCGSTAB stagnated (omega = 0) at iteration {it}, residual {res}")));
        }
    }
    Err(Error::Numerical(format!("BiCGSTAB did not converge in {max_iter} iterations")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thomas_solves_known_system() {
        // [2 -1 0; -1 2 -1; 0 -1 2] x = [1 0 1] → x = [1 1 1].
        let f = Tridiagonal::factor(&[0.0, -1.0, -1.0], &[2.0, 2.0, 2.0], &[-1.0, -1.0, 0.0]).unwrap();
        let mut b = vec![1.0, 0.0, 1.0];
        f.solve_in_place(&mut b);
        for v in b {
            assert!((v - 1.0).abs() < 1e-14);
        }
        assert!(Tridiagonal::factor(&[0.0], &[0.0], &[0.0]).is_err());
    }

    #[test]
    fn bicgstab_nonsymmetric() {
        let a = [[4.0, 1.0, 0.0], [-1.0, 4.0, 1.0], [0.0, -1.0, 4.0]];
        let mv = |v: &[f64], o: &mut [f64]| {
            for i in 0..3 {
                o[i] = (0..3).map(|j| a[i][j] * v[j]).sum();
            }
        };
        let xs = [1.0, -2.0, 0.5];
        let mut b = [0.0; 3];
        mv(&xs, &mut b);
        let mut x = [0.0; 3];
        bicgstab(&mv, &[4.0, 4.0, 4.0], &b, &mut x, 1e-13, 50).unwrap();
        for i in 0..3 {
            assert!((x[i] - xs[i]).abs() < 1e-10);
        }
    }
}
