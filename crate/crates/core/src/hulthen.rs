//! Bound states of the deformed Hulthén problem
//!
//! ```text
//! -ψ'' - v e^{-r} / (1 - q e^{-r}) ψ = ℰ ψ,   r ∈ [ln q, ∞),   ψ(ln q) = ψ(∞) = 0
//! ```
//!
//! and of its extension by a barrier `μ e^{-r} / (1 - q e^{-r})²`.
//!
//! With `x_n = v / (q (n+1))` the n-th state is
//! `ℰ_n = -(x_n/2 - (n+1)/2)²` and
//! `ψ_n = e^{-(x_n/2 - (n+1)/2) r} (1 - t) 2F1(-n, x_n + 1; x_n - n; t)`,
//! `t = q e^{-r}`. A state exists iff `(n+1)² < v/q`, equivalently `ℰ_n < 0`.

use crate::error::{Error, Result};
use crate::exppoly::ExpPoly;
use crate::poly;
use crate::scalar::Scalar;
use crate::specfun::{hyp2f1_coefficients, hyp3f2_unit, kampe_unit, pochhammer};

/// Coupling `μ`, screening `δ` and deformation `q` of
/// `-½ψ'' - μ e^{-δx} / (1 - q e^{-δx}) ψ = E ψ`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalParams<S> {
    pub mu: S,
    pub delta: S,
    pub q: S,
}

/// Canonical parameterization: `v = 2μ/δ²`, `ℰ = 2E/δ²`, `r = δx`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedParams<S> {
    pub v: S,
    pub q: S,
}

/// Parameters of the extended problem with barrier strength `μ'`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedParams<S> {
    pub barrier: S,
    pub v: S,
    pub q: S,
    pub s_plus: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundState<S> {
    pub n: usize,
    pub energy: S,
    /// Unnormalized, leading normalization factor 1.
    pub psi: ExpPoly<S>,
    pub norm_integral: f64,
    pub norm_constant: f64,
}

impl<S: Scalar> PhysicalParams<S> {
    pub fn new(mu: S, delta: S, q: S) -> Result<Self> {
        let zero = S::zero();
        if !(mu > zero && delta > zero && q > zero) {
            return Err(Error::InvalidParams(format!(
                "mu, delta, q must be positive (got {:?}, {:?}, {:?})",
                mu, delta, q
            )));
        }
        Ok(Self { mu, delta, q })
    }

    pub fn to_reduced(&self) -> ReducedParams<S> {
        ReducedParams {
            v: S::from_i64(2) * self.mu.clone() / self.delta.square(),
            q: self.q.clone(),
        }
    }

    /// `E = δ² ℰ / 2`
    pub fn energy_from_reduced(&self, reduced_energy: &S) -> S {
        self.delta.square() * reduced_energy.clone() / S::from_i64(2)
    }

    /// `x = r / δ`
    pub fn x_from_r(&self, r: f64) -> f64 {
        r / self.delta.to_f64()
    }

    /// Energy directly in physical units,
    /// `E_n = -½ (μ/(qδ(n+1)) - δ(n+1)/2)²`.
    pub fn energy(&self, n: usize) -> Result<S> {
        check_state(&self.to_reduced(), n)?;
        let k = S::from_i64(n as i64 + 1);
        let inner = self.mu.clone() / (self.q.clone() * self.delta.clone() * k.clone())
            - self.delta.clone() * k / S::from_i64(2);
        Ok(-inner.square() / S::from_i64(2))
    }
}

impl<S: Scalar> ReducedParams<S> {
    pub fn new(v: S, q: S) -> Result<Self> {
        if !(v > S::zero() && q > S::zero()) {
            return Err(Error::InvalidParams(format!("v and q must be positive (got {:?}, {:?})", v, q)));
        }
        Ok(Self { v, q })
    }

    pub fn ln_q(&self) -> f64 {
        self.q.to_f64().ln()
    }

    /// `x_n = v / (q (n+1))`
    fn x(&self, n: usize) -> S {
        self.v.clone() / (self.q.clone() * S::from_i64(n as i64 + 1))
    }

    pub fn to_float(&self) -> ReducedParams<f64> {
        ReducedParams { v: self.v.to_f64(), q: self.q.to_f64() }
    }
}

impl<S: Scalar> ExtendedParams<S> {
    pub fn new(barrier: S, v: S, q: S) -> Result<Self> {
        if barrier < S::zero() {
            return Err(Error::InvalidParams(format!("barrier {:?} must be nonnegative", barrier)));
        }
        ReducedParams::new(v.clone(), q.clone())?;
        let s_plus = extended_s_plus(barrier.to_f64(), q.to_f64());
        Ok(Self { barrier, v, q, s_plus })
    }
}

/// Number of bound states: integers `n >= 0` with `(n+1)² < v/q`.
pub fn bound_state_count<S: Scalar>(p: &ReducedParams<S>) -> usize {
    let ratio = p.v.clone() / p.q.clone();
    (1..).take_while(|k: &i64| S::from_i64(k * k) < ratio).count()
}

fn check_state<S: Scalar>(p: &ReducedParams<S>, n: usize) -> Result<()> {
    let count = bound_state_count(p);
    if n < count {
        Ok(())
    } else {
        Err(Error::NoSuchState(format!(
            "n = {n} but (v = {}, q = {}) supports {count} bound state(s)",
            p.v.to_f64(),
            p.q.to_f64()
        )))
    }
}

/// Decay exponent `x_n/2 - (n+1)/2` (positive for bound states).
fn decay<S: Scalar>(p: &ReducedParams<S>, n: usize) -> S {
    p.x(n) / S::from_i64(2) - S::from_ratio(n as i64 + 1, 2)
}

pub fn energy<S: Scalar>(p: &ReducedParams<S>, n: usize) -> Result<S> {
    check_state(p, n)?;
    Ok(-decay(p, n).square())
}

/// Unnormalized eigenfunction as a single exp-polynomial term.
pub fn eigenfunction<S: Scalar>(p: &ReducedParams<S>, n: usize) -> Result<ExpPoly<S>> {
    check_state(p, n)?;
    let x = p.x(n);
    let f = hyp2f1_coefficients(n, &(x.clone() + S::one()), &(x - S::from_i64(n as i64)))?;
    Ok(ExpPoly::single(
        p.q.clone(),
        -decay(p, n),
        poly::mul(&poly::one_minus_t_pow(1), &f),
    ))
}

/// The same state in the Pfaff-transformed form
/// `e^{-(x_n/2 - (n+1)/2) r} 2F1(-n-1, x_n; x_n - n; t)`.
pub fn eigenfunction_pfaff_form<S: Scalar>(p: &ReducedParams<S>, n: usize) -> Result<ExpPoly<S>> {
    check_state(p, n)?;
    let x = p.x(n);
    let f = crate::specfun::HypParams::new(
        vec![S::from_i64(-(n as i64) - 1), x.clone()],
        vec![x - S::from_i64(n as i64)],
        S::zero(),
    )
    .coefficients()?;
    Ok(ExpPoly::single(p.q.clone(), -decay(p, n), f))
}

/// `I_nm = ∫_{ln q}^∞ ψ_n ψ_m dr` for the unnormalized states.
///
/// Off-diagonal entries vanish by orthogonality and are returned as 0. The
/// diagonal uses the two-term `3F2(1)` bracket; for `n = 0` only the second
/// term is present, giving `I_00 = 2 q^{1 - v/q} Γ(v/q - 1) / Γ(v/q + 2)`.
pub fn norm_integral<S: Scalar>(p: &ReducedParams<S>, n: usize, m: usize) -> Result<f64> {
    check_state(p, n)?;
    check_state(p, m)?;
    if n != m {
        return Ok(0.0);
    }
    let (bracket, gamma_ratio, c) = norm_integral_parts(p, n)?;
    Ok(p.q.to_f64().powf(-c.to_f64()) * (gamma_ratio * bracket).to_f64())
}

/// `(bracket, 2Γ(c)/Γ(c+3), c)` with `c = x_n - n - 1`, so that
/// `I_nn = q^{-c} · 2Γ(c)/Γ(c+3) · bracket`.
fn norm_integral_parts<S: Scalar>(p: &ReducedParams<S>, n: usize) -> Result<(S, S, S)> {
    let x = p.x(n);
    let nn = S::from_i64(n as i64);
    let one = S::one();
    let two = S::from_i64(2);
    let k = S::from_i64(n as i64 + 1);
    let c = x.clone() - nn.clone() - one.clone();
    if c <= S::zero() {
        return Err(Error::NoSuchState(format!("state {n} is at or above threshold")));
    }

    let second = hyp3f2_unit(
        &-nn.clone(),
        &(x.clone() + one.clone()),
        &c,
        &(x.clone() - nn.clone()),
        &(x.clone() - nn.clone() + two.clone()),
    )?;
    let bracket = if n == 0 {
        second
    } else {
        let q = p.q.clone();
        let v = p.v.clone();
        let prefactor = q.clone() * k.clone() * (v.clone() - q.clone() * k.square()) * pochhammer(&(x.clone() + one.clone()), n)
            / ((v.clone() - q.clone() * k.clone())
                * (two.clone() * q * k + v)
                * pochhammer(&(-x.clone() - one.clone()), n));
        let first = hyp3f2_unit(
            &(one.clone() - nn.clone()),
            &(x.clone() + one.clone()),
            &x,
            &(x.clone() + S::from_i64(3)),
            &(x.clone() - nn.clone()),
        )?;
        prefactor * first + second
    };
    let gamma_ratio = two.clone() / (c.clone() * (c.clone() + one.clone()) * (c.clone() + two.clone()));
    Ok((bracket, gamma_ratio, c))
}

/// `I_nm` through the terminating Kampé de Fériet double sum; valid for
/// every pair `n, m`, with no use of orthogonality.
pub fn norm_integral_double_sum<S: Scalar>(p: &ReducedParams<S>, n: usize, m: usize) -> Result<f64> {
    check_state(p, n)?;
    check_state(p, m)?;
    let (xn, xm) = (p.x(n), p.x(m));
    let two = S::from_i64(2);
    let (nn, mm) = (S::from_i64(n as i64), S::from_i64(m as i64));
    let c = (xn.clone() + xm.clone() - nn.clone() - mm.clone()) / two.clone() - S::one();
    let d = c.clone() + S::from_i64(3);
    let sum = kampe_unit(
        &c,
        &[-nn.clone(), xn.clone() + S::one()],
        &[-mm.clone(), xm.clone() + S::one()],
        &d,
        &(xn - nn),
        &(xm - mm),
        n,
        m,
    )?;
    let gamma_ratio = two / (c.clone() * (c.clone() + S::one()) * (c.clone() + S::from_i64(2)));
    Ok(p.q.to_f64().powf(-c.to_f64()) * (gamma_ratio * sum).to_f64())
}

/// `N_n = I_nn^{-1/2}`
pub fn normalization_constant<S: Scalar>(p: &ReducedParams<S>, n: usize) -> Result<f64> {
    Ok(norm_integral(p, n, n)?.powf(-0.5))
}

pub fn bound_state<S: Scalar>(p: &ReducedParams<S>, n: usize) -> Result<BoundState<S>> {
    let norm_integral = norm_integral(p, n, n)?;
    Ok(BoundState {
        n,
        energy: energy(p, n)?,
        psi: eigenfunction(p, n)?,
        norm_integral,
        norm_constant: norm_integral.powf(-0.5),
    })
}

/// Larger indicial root at `t = 1` of the extended problem,
/// `s₊ = ½ + sqrt(μ'/q + ¼)`.
pub fn extended_s_plus(barrier: f64, q: f64) -> f64 {
    0.5 + (barrier / q + 0.25).sqrt()
}

/// `s₊` when the barrier is `q·j(j+1)` for an integer `j`, returned exactly
/// as `j + 1`.
pub fn integer_s_plus<S: Scalar>(barrier: &S, q: &S) -> Option<usize> {
    let s = extended_s_plus(barrier.to_f64(), q.to_f64()).round();
    if s < 1.0 {
        return None;
    }
    let j = s as i64 - 1;
    (S::from_i64(j * (j + 1)) * q.clone() == *barrier
        || (!S::EXACT && (barrier.to_f64() - (j * (j + 1)) as f64 * q.to_f64()).abs() <= 1e-12 * barrier.to_f64().abs().max(1.0)))
    .then_some(s as usize)
}

fn check_extended<S: Scalar>(p: &ReducedParams<S>, s_plus: &S, n: usize) -> Result<()> {
    let k = S::from_i64(n as i64) + s_plus.clone();
    if k.square() < p.v.clone() / p.q.clone() {
        Ok(())
    } else {
        Err(Error::NoSuchState(format!(
            "extended state n = {n} with s+ = {} needs (n + s+)² < v/q",
            s_plus.to_f64()
        )))
    }
}

/// `𝔈_n = -(v/(2q(n+s₊)) - (n+s₊)/2)²`
pub fn extended_energy<S: Scalar>(p: &ReducedParams<S>, s_plus: &S, n: usize) -> Result<S> {
    check_extended(p, s_plus, n)?;
    let k = S::from_i64(n as i64) + s_plus.clone();
    let two = S::from_i64(2);
    Ok(-(p.v.clone() / (two.clone() * p.q.clone() * k.clone()) - k / two).square())
}

/// `e^{-(v/(2q(n+s)) - (n+s)/2) r} (1 - t)^s 2F1(-n, s + v/(q(n+s)); 1-n-s + v/(q(n+s)); t)`
/// for integer `s = s₊`.
pub fn extended_eigenfunction<S: Scalar>(p: &ReducedParams<S>, s_plus: &S, n: usize) -> Result<ExpPoly<S>> {
    check_extended(p, s_plus, n)?;
    let s = match s_plus.as_integer() {
        Some(s) if s >= 1 => s as usize,
        _ => {
            return Err(Error::UnsupportedRepresentation {
                formula: format!(
                    "exp(-(v/(2q(n+s)) - (n+s)/2) r) (1 - q e^-r)^s 2F1(-n, s + v/(q(n+s)); 1-n-s + v/(q(n+s)); q e^-r) \
                     with v = {}, q = {}, s = {}, n = {n}",
                    p.v.to_f64(),
                    p.q.to_f64(),
                    s_plus.to_f64()
                ),
            })
        }
    };
    let k = S::from_i64((n + s) as i64);
    let y = p.v.clone() / (p.q.clone() * k.clone());
    let two = S::from_i64(2);
    let alpha = -(y.clone() / two.clone() - k.clone() / two);
    let f = hyp2f1_coefficients(
        n,
        &(s_plus.clone() + y.clone()),
        &(S::one() - k + y),
    )?;
    Ok(ExpPoly::single(p.q.clone(), alpha, poly::mul(&poly::one_minus_t_pow(s), &f)))
}
