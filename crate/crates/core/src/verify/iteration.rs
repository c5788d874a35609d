//! Closed-form bound for x_k ≤ C1·x_{k−1}^s.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::float::FloatCore;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationState {
    pub x1: f64,
    pub c1: f64,
    pub s: f64,
    pub n: u32,
}

impl IterationState {
    pub fn validate(&self) -> Result<()> {
        if !(self.c1 > 1.0 && self.c1.is_finite()) {
            return invalid(format!("C1 = {} must exceed 1", self.c1));
        }
        if !(self.s > 0.0 && self.s < 1.0) {
            return invalid(format!("s = {} must lie in (0, 1)", self.s));
        }
        if !(self.x1 > 0.0 && self.x1.is_finite()) {
            return invalid(format!("x1 = {} must be positive", self.x1));
        }
        if self.n == 0 {
            return invalid("iteration count n must be >= 1");
        }
        Ok(())
    }
}

/// C1^{1/(1−s)}·x1^{s^{n−1}}.
pub fn geometric_iteration_bound(st: &IterationState) -> Result<f64> {
    st.validate()?;
    let e = st.s.powi(st.n as i32 - 1);
    Ok(st.c1.powf(1.0 / (1.0 - st.s)) * st.x1.powf(e))
}

/// x_n from x_1 by n − 1 literal applications of x ↦ C1·x^s.
pub fn unrolled_recursion(st: &IterationState) -> Result<f64> {
    st.validate()?;
    let mut x = st.x1;
    for _ in 1..st.n {
        x = st.c1 * x.powf(st.s);
    }
    Ok(x)
}

/// Exponents of C1 in the closed form and in the unrolled recursion; the
/// x1 exponent s^{n−1} is shared.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationExponents {
    pub bound: BigRational,
    pub recursion: BigRational,
}

impl IterationExponents {
    /// Since C1 > 1, dominance is exactly bound ≥ recursion.
    pub fn dominates(&self) -> bool {
        self.bound.numer() * self.recursion.denom() >= self.recursion.numer() * self.bound.denom()
    }
}

pub(crate) fn exact(v: f64) -> Result<BigRational> {
    BigRational::from_float(v).ok_or_else(|| Error::InvalidInput(format!("{v} has no exact rational value")))
}

/// Exact C1 exponents: 1/(1 − s) against Σ_{j=0}^{n−2} s^j, with s = m/2^e
/// and both sides kept over powers of two (unreduced).
pub fn iteration_exponents(st: &IterationState) -> Result<IterationExponents> {
    st.validate()?;
    let (mantissa, exponent, _) = FloatCore::integer_decode(st.s);
    let (m, e) = (BigInt::from(mantissa), (-exponent) as usize);
    let two_e = BigInt::one() << e;
    let bound = BigRational::new_raw(two_e.clone(), &two_e - &m);
    let k = st.n.saturating_sub(1) as usize;
    // Σ_{j<k} m^j 2^{e(k−1−j)} over 2^{e(k−1)}.
    let mut numer = BigInt::zero();
    let mut p = BigInt::one();
    for j in 0..k {
        numer += &p << (e * (k - 1 - j));
        p *= &m;
    }
    let denom = BigInt::one() << (e * k.saturating_sub(1));
    Ok(IterationExponents { bound, recursion: BigRational::new_raw(numer, denom) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn worked_example() {
        let st = IterationState { x1: 1.0 / 16.0, c1: 2.0, s: 0.5, n: 3 };
        assert!((unrolled_recursion(&st).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!((geometric_iteration_bound(&st).unwrap() - 2.0).abs() < 1e-15);
        let e = iteration_exponents(&st).unwrap();
        assert_eq!(e.bound, ratio(2, 1));
        assert_eq!(e.recursion, ratio(3, 2));
    }

    #[test]
    fn exponents_match_reduced_rationals() {
        for (s, n) in [(0.3, 2), (0.77, 9), (0.01, 39), (0.989, 25), (0.5, 1)] {
            let e = iteration_exponents(&IterationState { x1: 1.0, c1: 2.0, s, n }).unwrap();
            let q = exact(s).unwrap();
            let one = BigRational::one();
            let sum = (0..n.saturating_sub(1)).fold(BigRational::zero(), |acc, j| acc + num_traits::pow(q.clone(), j as usize));
            assert_eq!(e.recursion, sum);
            assert_eq!(e.bound, &one / (&one - &q));
            assert!(e.dominates());
        }
    }

    #[test]
    fn rejects_domain() {
        assert!(geometric_iteration_bound(&IterationState { x1: 1.0, c1: 1.0, s: 0.5, n: 2 }).is_err());
        assert!(geometric_iteration_bound(&IterationState { x1: 1.0, c1: 2.0, s: 1.0, n: 2 }).is_err());
    }
}
