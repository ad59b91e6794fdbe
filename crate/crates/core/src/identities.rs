//! Hypergeometric identities behind the closed forms, each returned as its
//! two sides so callers can compare at their own tolerance.

use crate::error::Result;
use crate::poly;
use crate::scalar::Scalar;
use crate::specfun::{hyp2f1_series, hyp2f1_terminating, hyp3f2_unit, log_gamma, HypParams};

/// Both sides of an identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Sides<S> {
    pub lhs: S,
    pub rhs: S,
}

impl Sides<f64> {
    /// `|lhs - rhs| / max(1, |rhs|)`
    pub fn defect(&self) -> f64 {
        (self.lhs - self.rhs).abs() / self.rhs.abs().max(1.0)
    }
}

/// Euler's transformation on a polynomial pair:
/// `2F1(-n, c+k; c; z) = (1-z)^{n-k} 2F1(c+n, -k; c; z)` for `k <= n`.
pub fn euler_terminating<S: Scalar>(n: usize, k: usize, c: &S, z: &S) -> Result<Sides<S>> {
    let lhs = hyp2f1_terminating(n, &(c.clone() + S::from_i64(k as i64)), c, z)?;
    let g = hyp2f1_terminating(k, &(c.clone() + S::from_i64(n as i64)), c, z)?;
    let factor = poly::eval(&poly::one_minus_t_pow(n - k), z);
    Ok(Sides { lhs, rhs: factor * g })
}

/// Euler's transformation on convergent series, `|z| < 1`:
/// `2F1(a, b; c; z) = (1-z)^{c-a-b} 2F1(c-a, c-b; c; z)`.
pub fn euler_series(a: f64, b: f64, c: f64, z: f64) -> Result<Sides<f64>> {
    let lhs = hyp2f1_series(a, b, c, z)?;
    let rhs = (1.0 - z).powf(c - a - b) * hyp2f1_series(c - a, c - b, c, z)?;
    Ok(Sides { lhs, rhs })
}

/// `(c-a-b) F(a,b;c;z) + a(1-z) F(a+1,b;c;z) - (c-b) F(a,b-1;c;z) = 0`
/// with `a = -n`; returns the combination as `lhs` and, as `rhs`, the
/// same combination with every series term replaced by its magnitude.
pub fn contiguous<S: Scalar>(n: usize, b: &S, c: &S, z: &S) -> Result<Sides<S>> {
    let a = S::from_i64(-(n as i64));
    let f = |upper: Vec<S>| -> Result<(S, S)> {
        let coeffs = HypParams::new(upper, vec![c.clone()], S::zero()).coefficients()?;
        let value = poly::eval(&coeffs, z);
        let magnitude = poly::eval(&coeffs.iter().map(|k| k.abs()).collect::<Vec<_>>(), &z.abs());
        Ok((value, magnitude))
    };
    let weights = [
        c.clone() - a.clone() - b.clone(),
        a.clone() * (S::one() - z.clone()),
        -(c.clone() - b.clone()),
    ];
    let parts = [
        f(vec![a.clone(), b.clone()])?,
        f(vec![a.clone() + S::one(), b.clone()])?,
        f(vec![a, b.clone() - S::one()])?,
    ];
    let lhs = S::sum(weights.iter().zip(&parts).map(|(w, (v, _))| w.clone() * v.clone()));
    let rhs = S::sum(weights.iter().zip(&parts).map(|(w, (_, m))| w.abs() * m.clone()));
    Ok(Sides { lhs, rhs })
}

/// Thomae-type relation for a terminating `3F2(a, b, -N; d, e; 1)`:
///
/// ```text
/// 3F2(a, b, c; d, e; 1) = Γ(d) Γ(d+e-a-b-c) / (Γ(d+e-a-b) Γ(d-c))
///                         · 3F2(e-a, e-b, c; d+e-a-b, e; 1)
/// ```
///
/// with `c = -N`. The gamma ratio needs positive arguments.
pub fn thomae(a: f64, b: f64, big_n: usize, d: f64, e: f64) -> Result<Sides<f64>> {
    let c = -(big_n as f64);
    let lhs = hyp3f2_unit(&a, &b, &c, &d, &e)?;
    let s = d + e - a - b;
    let ratio = (log_gamma(d)? + log_gamma(s - c)? - log_gamma(s)? - log_gamma(d - c)?).exp();
    let rhs = ratio * hyp3f2_unit(&(e - a), &(e - b), &c, &s, &e)?;
    Ok(Sides { lhs, rhs })
}

/// `3F2(-m, a, b; a-l, b-s; 1)` (`lhs`, zero whenever `l + s < m`) and
/// the sum of the absolute values of its terms (`rhs`).
pub fn vanishing<S: Scalar>(m: usize, a: &S, b: &S, l: usize, s: usize) -> Result<Sides<S>> {
    let params = HypParams::new(
        vec![S::from_i64(-(m as i64)), a.clone(), b.clone()],
        vec![a.clone() - S::from_i64(l as i64), b.clone() - S::from_i64(s as i64)],
        S::one(),
    );
    let coeffs = params.coefficients()?;
    let scale = S::sum(coeffs.iter().map(|c| c.abs()));
    Ok(Sides { lhs: S::sum(coeffs), rhs: scale })
}
