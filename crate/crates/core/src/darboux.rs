//! Darboux steps and Crum chains over the Hulthén ground-state seeds.
//!
//! `ψ_{j,n} = W(ψ_0, …, ψ_{j-1}, ψ_n) / W(ψ_0, …, ψ_{j-1})` solves
//! `-ψ'' + V_j ψ = ℰ_n ψ` with `V_j = V + j(j+1) t/(1-t)²` and the same
//! `ℰ_n` as the original problem. In closed form,
//! `ψ_{j,n} ∝ e^{-(x_n/2 - (n+1)/2) r} (1-t)^{j+1} 2F1(j-n, j+1+x_n; x_n-n; t)`.

use crate::error::{Error, Result};
use crate::exppoly::{one_minus_t, ExpPoly, MAX_WRONSKIAN_ORDER};
use crate::hulthen::{self, ReducedParams};
use crate::poly;
use crate::scalar::{Rational, Scalar};
use crate::specfun::{hyp2f1_coefficients, pochhammer};

pub const DEFAULT_MAX_CHAIN: usize = 4;

const SIGN_SAMPLES: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Wronskian,
    ClosedForm,
}

impl Route {
    pub fn as_str(self) -> &'static str {
        match self {
            Route::Wronskian => "wronskian",
            Route::ClosedForm => "closed_form",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainState<S> {
    pub j: usize,
    pub n: usize,
    pub psi: ExpPoly<S>,
    pub route: Route,
    /// Wronskian-route state divided by the closed-form state, when known.
    pub proportionality: Option<S>,
}

/// `V_j = -v e^{-r}/(1 - q e^{-r}) + barrier e^{-r}/(1 - q e^{-r})²`
#[derive(Debug, Clone, PartialEq)]
pub struct ChainPotential<S> {
    pub j: usize,
    pub v: S,
    pub q: S,
    pub barrier_coefficient: S,
}

fn check_chain<S: Scalar>(p: &ReducedParams<S>, j: usize, n: usize, cap: usize) -> Result<()> {
    if j > cap || j + 1 > MAX_WRONSKIAN_ORDER {
        return Err(Error::Unsupported(format!(
            "chain depth {j} exceeds the cap {}",
            cap.min(MAX_WRONSKIAN_ORDER - 1)
        )));
    }
    let count = hulthen::bound_state_count(p);
    if j > n || n >= count {
        return Err(Error::NoSuchState(format!("need j <= n < {count}, got j = {j}, n = {n}")));
    }
    Ok(())
}

/// Fails with [`Error::InvalidSeed`] if `f` changes sign on `(ln q, ∞)`.
pub fn check_nodeless<S: Scalar>(f: &ExpPoly<S>) -> Result<()> {
    let collapsed = f.collapse_integer_shifts();
    if collapsed.is_zero() {
        return Err(Error::InvalidSeed("seed is identically zero".into()));
    }
    if let Some(nodes) = collapsed.interior_nodes() {
        if nodes > 0 {
            return Err(Error::InvalidSeed(format!("seed has {nodes} interior node(s)")));
        }
    }
    let ff = collapsed.to_float();
    let lnq = ff.q().ln();
    let mut sign = 0.0;
    for i in 1..SIGN_SAMPLES {
        // t = i/200 sweeps the whole half-line
        let t = i as f64 / SIGN_SAMPLES as f64;
        let r = lnq - t.ln();
        let value = ff.eval_unchecked(r);
        if value == 0.0 || !value.is_finite() {
            continue;
        }
        if sign == 0.0 {
            sign = value.signum();
        } else if value.signum() != sign {
            return Err(Error::InvalidSeed(format!("seed changes sign near r = {r}")));
        }
    }
    Ok(())
}

/// `W(seed, state) / seed`
pub fn darboux_once<S: Scalar>(seed: &ExpPoly<S>, state: &ExpPoly<S>) -> Result<ExpPoly<S>> {
    check_nodeless(seed)?;
    let w = ExpPoly::wronskian(&[seed.clone(), state.clone()])?;
    ExpPoly::divide_exact(&w, seed)
}

/// `W(ψ_0, …, ψ_{j-1})`; the constant 1 for `j = 0`.
pub fn ground_wronskian<S: Scalar>(p: &ReducedParams<S>, j: usize) -> Result<ExpPoly<S>> {
    if j == 0 {
        return Ok(ExpPoly::constant(p.q.clone(), S::one()));
    }
    let seeds = (0..j).map(|k| hulthen::eigenfunction(p, k)).collect::<Result<Vec<_>>>()?;
    ExpPoly::wronskian(&seeds)
}

pub fn crum_chain<S: Scalar>(p: &ReducedParams<S>, j: usize, n: usize) -> Result<ChainState<S>> {
    crum_chain_capped(p, j, n, DEFAULT_MAX_CHAIN)
}

/// The Wronskian ratio is always formed exactly; float parameters are lifted
/// to the rationals they represent and the quotient is rounded once.
pub fn crum_chain_capped<S: Scalar>(p: &ReducedParams<S>, j: usize, n: usize, cap: usize) -> Result<ChainState<S>> {
    check_chain(p, j, n, cap)?;
    if !S::EXACT && j > 0 {
        let lifted = ReducedParams::new(Rational::from_f64(p.v.to_f64()), Rational::from_f64(p.q.to_f64()))?;
        let exact = crum_chain_capped(&lifted, j, n, cap)?;
        return Ok(ChainState { j, n, psi: exact.psi.convert(), route: Route::Wronskian, proportionality: None });
    }
    let psi = if j == 0 {
        hulthen::eigenfunction(p, n)?
    } else {
        let mut fs = (0..j).map(|k| hulthen::eigenfunction(p, k)).collect::<Result<Vec<_>>>()?;
        let den = ExpPoly::wronskian(&fs)?;
        check_nodeless(&den)?;
        fs.push(hulthen::eigenfunction(p, n)?);
        let num = ExpPoly::wronskian(&fs)?;
        ExpPoly::divide_exact(&num, &den)?
    };
    Ok(ChainState { j, n, psi, route: Route::Wronskian, proportionality: None })
}

/// Chain state built by `j` successive single Darboux steps, each seeded by
/// the ground state of the previous level.
pub fn iterated_chain<S: Scalar>(p: &ReducedParams<S>, j: usize, n: usize) -> Result<ExpPoly<S>> {
    check_chain(p, j, n, MAX_WRONSKIAN_ORDER - 1)?;
    let mut level = (0..=n).map(|k| hulthen::eigenfunction(p, k)).collect::<Result<Vec<_>>>()?;
    for step in 0..j {
        let seed = level[step].clone();
        for k in step + 1..=n {
            level[k] = darboux_once(&seed, &level[k])?;
        }
    }
    Ok(level[n].clone())
}

/// `e^{-(x_n/2 - (n+1)/2) r} (1-t)^{j+1} 2F1(j-n, j+1+x_n; x_n-n; t)`
pub fn closed_form_chain_psi<S: Scalar>(p: &ReducedParams<S>, j: usize, n: usize) -> Result<ExpPoly<S>> {
    check_chain(p, j, n, usize::MAX)?;
    let x = p.v.clone() / (p.q.clone() * S::from_i64(n as i64 + 1));
    let two = S::from_i64(2);
    let alpha = -(x.clone() / two.clone() - S::from_i64(n as i64 + 1) / two);
    let f = hyp2f1_coefficients(
        n - j,
        &(S::from_i64(j as i64 + 1) + x.clone()),
        &(x - S::from_i64(n as i64)),
    )?;
    Ok(ExpPoly::single(p.q.clone(), alpha, poly::mul(&poly::one_minus_t_pow(j + 1), &f)))
}

/// Closed-form chain state with its proportionality to the Wronskian route.
pub fn closed_form_chain_state<S: Scalar>(p: &ReducedParams<S>, j: usize, n: usize) -> Result<ChainState<S>> {
    let psi = closed_form_chain_psi(p, j, n)?;
    let wronskian = crum_chain_capped(p, j, n, MAX_WRONSKIAN_ORDER - 1)?;
    let ratio = route_ratio(&wronskian.psi, &psi)?;
    Ok(ChainState { j, n, psi, route: Route::ClosedForm, proportionality: Some(ratio) })
}

/// `a / b` for two single-term objects sharing an exponent, from their
/// leading coefficients.
pub fn route_ratio<S: Scalar>(a: &ExpPoly<S>, b: &ExpPoly<S>) -> Result<S> {
    let (a, b) = (a.collapse_integer_shifts(), b.collapse_integer_shifts());
    let (ta, tb) = match (a.as_single(), b.as_single()) {
        (Some(ta), Some(tb)) => (ta, tb),
        _ => return Err(Error::Unsupported("route comparison needs single-term states".into())),
    };
    if !ta.alpha.same_exponent(&tb.alpha) || ta.coeffs.len() != tb.coeffs.len() {
        return Err(Error::TheoryViolation(format!(
            "routes differ in shape: e^({:?} r) degree {} vs e^({:?} r) degree {}",
            ta.alpha,
            ta.coeffs.len().saturating_sub(1),
            tb.alpha,
            tb.coeffs.len().saturating_sub(1)
        )));
    }
    let la = ta.coeffs.last().cloned().unwrap_or_else(S::zero);
    let lb = tb.coeffs.last().cloned().unwrap_or_else(S::zero);
    if lb.is_zero() {
        return Err(Error::TheoryViolation("closed-form state is zero".into()));
    }
    Ok(la / lb)
}

/// The two printed forms of the second-level state, both carrying the
/// prefactor `n(n-1)(v+(n+1)q)(v+2(n+1)q) / (8 q² (n+1)²)`:
///
/// ```text
/// e^{αr} (1-t)² [2F1(1-n, x+2; x-n; t) - 4q²(n+1)/(nq+n²q-v) e^{-r} 2F1(2-n, x+3; x-n+1; t)]
/// e^{αr} (1-t)³ 2F1(2-n, x+3; x-n; t)
/// ```
pub fn second_level_printed_forms<S: Scalar>(p: &ReducedParams<S>, n: usize) -> Result<(ExpPoly<S>, ExpPoly<S>)> {
    check_chain(p, 2, n, usize::MAX)?;
    let (v, q) = (p.v.clone(), p.q.clone());
    let nn = S::from_i64(n as i64);
    let k = S::from_i64(n as i64 + 1);
    let two = S::from_i64(2);
    let x = v.clone() / (q.clone() * k.clone());
    let alpha = -(x.clone() / two.clone() - k.clone() / two.clone());
    let prefactor = nn.clone()
        * (nn.clone() - S::one())
        * (v.clone() + k.clone() * q.clone())
        * (v.clone() + two * k.clone() * q.clone())
        / (S::from_i64(8) * q.square() * k.square());
    let sq = poly::one_minus_t_pow(2);
    let f1 = hyp2f1_coefficients(n - 1, &(x.clone() + S::from_i64(2)), &(x.clone() - nn.clone()))?;
    let f2 = hyp2f1_coefficients(n - 2, &(x.clone() + S::from_i64(3)), &(x.clone() - nn.clone() + S::one()))?;
    let coef = -S::from_i64(4) * q.square() * k / (nn.clone() * q.clone() + nn.square() * q.clone() - v);
    let first = ExpPoly::new(
        q.clone(),
        vec![
            crate::exppoly::Term { alpha: alpha.clone(), coeffs: poly::mul(&sq, &f1) },
            crate::exppoly::Term { alpha: alpha.clone() - S::one(), coeffs: poly::scale(&poly::mul(&sq, &f2), &coef) },
        ],
    )
    .scale(&prefactor);
    let f3 = hyp2f1_coefficients(n - 2, &(x.clone() + S::from_i64(3)), &(x - nn))?;
    let second = ExpPoly::single(q, alpha, poly::mul(&poly::one_minus_t_pow(3), &f3)).scale(&prefactor);
    Ok((first, second))
}

pub fn chain_potential<S: Scalar>(p: &ReducedParams<S>, j: usize) -> ChainPotential<S> {
    ChainPotential {
        j,
        v: p.v.clone(),
        q: p.q.clone(),
        barrier_coefficient: S::from_i64((j * (j + 1)) as i64) * p.q.clone(),
    }
}

/// `-2 (log W)''` for `W = W(ψ_0, …, ψ_{j-1})`, kept as `(W, W', W'')` and
/// as `W = (1 - t)^k U` for evaluation near the boundary.
#[derive(Debug, Clone)]
pub struct Curvature<S> {
    pub j: usize,
    w: ExpPoly<S>,
    w1: ExpPoly<S>,
    w2: ExpPoly<S>,
    k: usize,
    u: ExpPoly<f64>,
    u1: ExpPoly<f64>,
    u2: ExpPoly<f64>,
}

impl<S: Scalar> Curvature<S> {
    /// `2k t/(1-t)² - 2 (U'' U - U'²) / U²` at `r`.
    pub fn evaluate(&self, r: f64) -> Result<f64> {
        let q = *self.u.q();
        if r <= q.ln() {
            return Err(Error::Domain(format!("curvature is singular at r = {r} <= ln q")));
        }
        let t = q * (-r).exp();
        let d = one_minus_t(q, r);
        let u = self.u.eval_unchecked(r);
        let u1 = self.u1.eval_unchecked(r);
        let u2 = self.u2.eval_unchecked(r);
        Ok(2.0 * self.k as f64 * t / (d * d) - 2.0 * (u2 / u - (u1 / u).powi(2)))
    }

    /// Multiplicity of the boundary zero of `W`.
    pub fn boundary_order(&self) -> usize {
        self.k
    }

    /// Max coefficient of `-2(W''W - W'²)(1-t)² - j(j+1) t W²`, relative to
    /// the largest coefficient of `W²`; exactly zero when the curvature is
    /// `j(j+1) t/(1-t)²`.
    pub fn identity_defect(&self) -> Result<f64> {
        let ww = self.w.mul(&self.w)?;
        let lhs = self
            .w2
            .mul(&self.w)?
            .sub(&self.w1.mul(&self.w1)?)?
            .scale(&S::from_i64(-2))
            .mul_poly(&[S::one(), S::from_i64(-2), S::one()]);
        let rhs = ww.mul_poly(&[S::zero(), S::from_i64((self.j * (self.j + 1)) as i64)]);
        let defect = lhs.sub(&rhs)?.collapse_integer_shifts();
        if defect.is_zero() {
            return Ok(0.0);
        }
        Ok(defect.max_abs_coeff() / ww.collapse_integer_shifts().max_abs_coeff())
    }
}

/// Float parameters are lifted to the rationals they represent; `W` is
/// built and split exactly, then rounded.
pub fn log_wronskian_curvature<S: Scalar>(p: &ReducedParams<S>, j: usize) -> Result<Curvature<S>> {
    if j == 0 || j + 1 > MAX_WRONSKIAN_ORDER {
        return Err(Error::Unsupported(format!("curvature needs 1 <= j <= {}", MAX_WRONSKIAN_ORDER - 1)));
    }
    let (k, u) = if S::EXACT {
        let (k, u) = ground_wronskian(p, j)?.boundary_split();
        (k, u.to_float())
    } else {
        let lifted = ReducedParams::new(Rational::from_f64(p.v.to_f64()), Rational::from_f64(p.q.to_f64()))?;
        let (k, u) = ground_wronskian(&lifted, j)?.boundary_split();
        (k, u.to_float())
    };
    let w = ground_wronskian(p, j)?;
    let w1 = w.differentiate();
    let w2 = w1.differentiate();
    let u1 = u.differentiate();
    let u2 = u1.differentiate();
    Ok(Curvature { j, w, w1, w2, k, u, u1, u2 })
}

/// `j(j+1) q e^r / (e^r - q)²`
pub fn barrier_profile(j: usize, q: f64, r: f64) -> f64 {
    let d = -(q.ln() - r).exp_m1();
    (j * (j + 1)) as f64 * q * (-r).exp() / (d * d)
}

/// `∫ ψ_{j,n}² = I_nn Π_{i<j} (ℰ_n - ℰ_i)` for the Wronskian-route state.
pub fn chain_norm<S: Scalar>(p: &ReducedParams<S>, j: usize, n: usize) -> Result<f64> {
    check_chain(p, j, n, usize::MAX)?;
    let en = hulthen::energy(p, n)?;
    let product = (0..j).try_fold(S::one(), |acc, i| Ok::<_, Error>(acc * (en.clone() - hulthen::energy(p, i)?)))?;
    Ok(hulthen::norm_integral(p, n, n)? * product.to_f64())
}

/// Alternative norm expression
/// `(-j)_j (j+2k+2)_j / (2^j (k+1)_j)² · (k - y + 1)_j (k + y + 1)_j · X`,
/// `k = n - j`, `y = v/((j+k+1) q)`, evaluated with `X = N_n = I_nn^{-1/2}`
/// (`reading_a`) and with `X = I_nn` (`reading_b`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlternateNorm {
    pub prefactor: f64,
    pub reading_a: f64,
    pub reading_b: f64,
}

pub fn alternate_norm<S: Scalar>(p: &ReducedParams<S>, j: usize, n: usize) -> Result<AlternateNorm> {
    check_chain(p, j, n, usize::MAX)?;
    let k = n - j;
    let y = p.v.clone() / (S::from_i64((j + k + 1) as i64) * p.q.clone());
    let kk = S::from_i64(k as i64);
    let one = S::one();
    let denom = (S::from_i64(1i64 << j) * pochhammer(&(kk.clone() + one.clone()), j)).square();
    let prefactor = pochhammer(&S::from_i64(-(j as i64)), j)
        * pochhammer(&S::from_i64((j + 2 * k + 2) as i64), j)
        / denom
        * pochhammer(&(kk.clone() - y.clone() + one.clone()), j)
        * pochhammer(&(kk + y + one), j);
    let inn = hulthen::norm_integral(p, n, n)?;
    let prefactor = prefactor.to_f64();
    Ok(AlternateNorm { prefactor, reading_a: prefactor * inn.powf(-0.5), reading_b: prefactor * inn })
}
