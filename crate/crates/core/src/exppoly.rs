//! Exact algebra for functions of the form `Σ_k e^{α_k r} P_k(t)` with
//! `t = q e^{-r}`.
//!
//! Every bound state of the deformed Hulthén family and every Darboux
//! transform of one is a single term of this form, so products, derivatives,
//! Wronskians and the exact quotients of Wronskians can all be carried out
//! without numerical differentiation. With [`Rational`](crate::Rational)
//! scalars the algebra is exact.
//!
//! Canonical form: terms sorted by exponent, no repeated exponent, no
//! trailing zero coefficients, no empty polynomial.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly;
use crate::scalar::Scalar;

/// Largest Wronskian order accepted by [`ExpPoly::wronskian`].
pub const MAX_WRONSKIAN_ORDER: usize = 6;

/// Remainder bound, relative to the dividend scale, for float division.
pub const DIVISION_TOL: f64 = 1e-9;

/// Float value of `p(1)`, relative to `Σ|c_k|`, below which `(1 - t)` counts
/// as a factor of `p`.
pub const BOUNDARY_TOL: f64 = 1e-10;

/// `e^{alpha r} · Σ_k coeffs[k] t^k`
#[derive(Debug, Clone, PartialEq)]
pub struct Term<S> {
    pub alpha: S,
    pub coeffs: Vec<S>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpPoly<S> {
    q: S,
    terms: Vec<Term<S>>,
}

/// Wire form: `{q, terms: [{alpha, coeffs: [...]}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpPolyJson {
    pub q: f64,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub alpha: f64,
    pub coeffs: Vec<f64>,
}

#[allow(clippy::should_implement_trait)]
impl<S: Scalar> ExpPoly<S> {
    pub fn new(q: S, terms: Vec<Term<S>>) -> Self {
        let mut out = Self { q, terms };
        out.canonicalize();
        out
    }

    pub fn zero(q: S) -> Self {
        Self { q, terms: Vec::new() }
    }

    pub fn constant(q: S, c: S) -> Self {
        Self::new(q, vec![Term { alpha: S::zero(), coeffs: vec![c] }])
    }

    /// `e^{alpha r}`
    pub fn exp(q: S, alpha: S) -> Self {
        Self::new(q, vec![Term { alpha, coeffs: vec![S::one()] }])
    }

    /// `e^{alpha r} P(t)`
    pub fn single(q: S, alpha: S, coeffs: Vec<S>) -> Self {
        Self::new(q, vec![Term { alpha, coeffs }])
    }

    pub fn q(&self) -> &S {
        &self.q
    }

    pub fn terms(&self) -> &[Term<S>] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The single term, if there is exactly one.
    pub fn as_single(&self) -> Option<&Term<S>> {
        match self.terms.as_slice() {
            [t] => Some(t),
            _ => None,
        }
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.iter().map(|t| poly::max_abs(&t.coeffs)).fold(0.0, f64::max)
    }

    fn canonicalize(&mut self) {
        let mut terms = std::mem::take(&mut self.terms);
        terms.sort_by(|a, b| a.alpha.partial_cmp(&b.alpha).unwrap_or(std::cmp::Ordering::Equal));
        let mut merged: Vec<Term<S>> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some(last) if last.alpha.same_exponent(&t.alpha) => {
                    last.coeffs = poly::add(&last.coeffs, &t.coeffs);
                }
                _ => merged.push(t),
            }
        }
        for t in merged.iter_mut() {
            poly::trim(&mut t.coeffs);
        }
        merged.retain(|t| !t.coeffs.is_empty());
        self.terms = merged;
    }

    fn check_q(&self, other: &Self) -> Result<()> {
        if self.q == other.q {
            Ok(())
        } else {
            Err(Error::MismatchedQ { left: self.q.to_f64(), right: other.q.to_f64() })
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_q(other)?;
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(Self::new(self.q.clone(), terms))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-S::one())
    }

    pub fn scale(&self, c: &S) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| Term { alpha: t.alpha.clone(), coeffs: poly::scale(&t.coeffs, c) })
            .collect();
        Self::new(self.q.clone(), terms)
    }

    /// Multiplies every term by the polynomial `p(t)`.
    pub fn mul_poly(&self, p: &[S]) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| Term { alpha: t.alpha.clone(), coeffs: poly::mul(&t.coeffs, p) })
            .collect();
        Self::new(self.q.clone(), terms)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_q(other)?;
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(Term {
                    alpha: a.alpha.clone() + b.alpha.clone(),
                    coeffs: poly::mul(&a.coeffs, &b.coeffs),
                });
            }
        }
        Ok(Self::new(self.q.clone(), terms))
    }

    /// `d/dr`, using `dt/dr = -t`: `e^{αr} P(t) ↦ e^{αr} (α P - t P')`.
    pub fn differentiate(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| Term {
                alpha: t.alpha.clone(),
                coeffs: t
                    .coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, c)| c.clone() * (t.alpha.clone() - S::from_i64(k as i64)))
                    .collect(),
            })
            .collect();
        Self::new(self.q.clone(), terms)
    }

    pub fn derivative(&self, order: usize) -> Self {
        (0..order).fold(self.clone(), |f, _| f.differentiate())
    }

    /// Wronskian determinant `det[f_c^{(i)}]`, expanded by cofactors with the
    /// minors over column subsets memoized.
    pub fn wronskian(fs: &[Self]) -> Result<Self> {
        let k = fs.len();
        if k == 0 || k > MAX_WRONSKIAN_ORDER {
            return Err(Error::Unsupported(format!(
                "Wronskian of {k} functions (supported: 1..={MAX_WRONSKIAN_ORDER})"
            )));
        }
        for f in &fs[1..] {
            fs[0].check_q(f)?;
        }
        let q = fs[0].q.clone();
        // rows[i][c] = i-th derivative of f_c
        let mut rows: Vec<Vec<Self>> = vec![fs.to_vec()];
        for i in 1..k {
            let next = rows[i - 1].iter().map(Self::differentiate).collect();
            rows.push(next);
        }
        let mut memo: HashMap<u32, Self> = HashMap::new();
        minor(&rows, (1u32 << k) - 1, &q, &mut memo)
    }

    /// Folds terms whose exponents differ by an integer into the term with
    /// the largest exponent, via `e^{(α-k) r} = e^{α r} (t/q)^k`.
    pub fn collapse_integer_shifts(&self) -> Self {
        let mut out: Vec<Term<S>> = Vec::new();
        // terms are ascending, walk from the top
        for t in self.terms.iter().rev() {
            let target = out.iter_mut().find(|o| {
                (o.alpha.clone() - t.alpha.clone())
                    .as_integer()
                    .is_some_and(|k| k >= 0)
            });
            match target {
                Some(o) => {
                    let k = (o.alpha.clone() - t.alpha.clone()).as_integer().unwrap() as usize;
                    let factor = S::one() / self.q.powi(k as u32);
                    let mut shifted = vec![S::zero(); k];
                    shifted.extend(poly::scale(&t.coeffs, &factor));
                    o.coeffs = poly::add(&o.coeffs, &shifted);
                }
                None => out.push(t.clone()),
            }
        }
        Self::new(self.q.clone(), out)
    }

    /// Exact quotient `num / den` for a single-term divisor. Fails with
    /// [`Error::InexactDivision`] if any polynomial remainder survives.
    pub fn divide_exact(num: &Self, den: &Self) -> Result<Self> {
        num.check_q(den)?;
        let den = den.collapse_integer_shifts();
        let d = den.as_single().ok_or_else(|| {
            Error::Unsupported(format!("divisor must be a single exponential term, got {}", den.terms.len()))
        })?;
        // pull factors of t out of the divisor into its exponent
        let mut beta = d.alpha.clone();
        let mut dcoeffs = d.coeffs.clone();
        while dcoeffs.len() > 1 && dcoeffs[0].is_zero() {
            dcoeffs.remove(0);
            beta = beta - S::one();
            dcoeffs = poly::scale(&dcoeffs, &den.q);
        }
        let num = num.collapse_integer_shifts();
        let mut terms = Vec::with_capacity(num.terms.len());
        for t in &num.terms {
            let (quot, rem) = poly::divrem(&t.coeffs, &dcoeffs);
            let rem_max = poly::max_abs(&rem);
            if S::EXACT {
                if rem.iter().any(|c| !c.is_zero()) {
                    return Err(Error::InexactDivision { remainder: rem_max, bound: 0.0 });
                }
            } else {
                let bound = DIVISION_TOL * poly::max_abs(&t.coeffs);
                if rem_max > bound {
                    return Err(Error::InexactDivision { remainder: rem_max, bound });
                }
            }
            terms.push(Term { alpha: t.alpha.clone() - beta.clone(), coeffs: quot });
        }
        Ok(Self::new(num.q.clone(), terms))
    }

    /// Value at `r`; the domain is `r >= ln q`.
    pub fn evaluate(&self, r: f64) -> Result<f64> {
        let lnq = self.q.to_f64().ln();
        if r < lnq - 1e-12 * lnq.abs().max(1.0) {
            return Err(Error::Domain(format!("r = {r} below ln q = {lnq}")));
        }
        Ok(self.to_float().eval_unchecked(r))
    }

    /// Copy over another scalar type through `f64` (exact for `f64 -> Rational`).
    pub fn convert<T: Scalar>(&self) -> ExpPoly<T> {
        ExpPoly::new(
            T::from_f64(self.q.to_f64()),
            self.terms
                .iter()
                .map(|t| Term {
                    alpha: T::from_f64(t.alpha.to_f64()),
                    coeffs: t.coeffs.iter().map(|c| T::from_f64(c.to_f64())).collect(),
                })
                .collect(),
        )
    }

    /// Float copy (identity in float mode).
    pub fn to_float(&self) -> ExpPoly<f64> {
        ExpPoly {
            q: self.q.to_f64(),
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    alpha: t.alpha.to_f64(),
                    coeffs: t.coeffs.iter().map(Scalar::to_f64).collect(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> ExpPolyJson {
        let f = self.to_float();
        ExpPolyJson {
            q: f.q,
            terms: f
                .terms
                .into_iter()
                .map(|t| TermJson { alpha: t.alpha, coeffs: t.coeffs })
                .collect(),
        }
    }

    /// `(K, U)` with `self = (1 - t)^K U` and `U` nonzero at `t = 1`, after
    /// collapsing integer shifts.
    pub fn boundary_split(&self) -> (usize, Self) {
        let collapsed = self.collapse_integer_shifts();
        if collapsed.is_zero() {
            return (0, collapsed);
        }
        let split: Vec<(usize, Term<S>)> = collapsed
            .terms
            .iter()
            .map(|t| {
                let (k, coeffs) = poly::deflate_at_one(&t.coeffs, BOUNDARY_TOL);
                (k, Term { alpha: t.alpha.clone(), coeffs })
            })
            .collect();
        let k = split.iter().map(|(k, _)| *k).min().unwrap_or(0);
        let terms = split
            .into_iter()
            .map(|(ki, t)| Term { alpha: t.alpha, coeffs: poly::mul(&t.coeffs, &poly::one_minus_t_pow(ki - k)) })
            .collect();
        (k, Self::new(collapsed.q.clone(), terms))
    }

    /// Highest-degree coefficient of a single-term object.
    pub fn leading_coefficient(&self) -> Option<&S> {
        self.as_single().and_then(|t| t.coeffs.last())
    }

    /// Number of sign changes of the polynomial factor of a single-term
    /// object inside `0 < t < 1`, i.e. nodes on `(ln q, ∞)`.
    pub fn interior_nodes(&self) -> Option<usize> {
        self.as_single().map(|t| poly::roots_in_open_unit_interval(&t.coeffs))
    }
}

fn minor<S: Scalar>(
    rows: &[Vec<ExpPoly<S>>],
    cols: u32,
    q: &S,
    memo: &mut HashMap<u32, ExpPoly<S>>,
) -> Result<ExpPoly<S>> {
    if cols == 0 {
        return Ok(ExpPoly::constant(q.clone(), S::one()));
    }
    if let Some(m) = memo.get(&cols) {
        return Ok(m.clone());
    }
    let k = rows.len();
    let row = k - cols.count_ones() as usize;
    let mut acc = ExpPoly::zero(q.clone());
    let mut position = 0;
    for c in 0..k {
        if cols & (1 << c) == 0 {
            continue;
        }
        let sub = minor(rows, cols & !(1 << c), q, memo)?;
        let mut term = rows[row][c].mul(&sub)?;
        if position % 2 == 1 {
            term = term.neg();
        }
        acc = acc.add(&term)?;
        position += 1;
    }
    memo.insert(cols, acc.clone());
    Ok(acc)
}

/// `1 - q e^{-r}`
pub fn one_minus_t(q: f64, r: f64) -> f64 {
    -(q.ln() - r).exp_m1()
}

impl ExpPoly<f64> {
    /// Float evaluation without the domain check; used by quadrature loops.
    pub fn eval_unchecked(&self, r: f64) -> f64 {
        let t = self.q * (-r).exp();
        let mut acc = crate::scalar::CompensatedSum::new();
        for term in &self.terms {
            acc.add((term.alpha * r).exp() * poly::eval_f64(&term.coeffs, t));
        }
        acc.value()
    }

    /// `(1 - t)^k · self(r)`, with `1 - t` formed without cancellation.
    pub fn eval_with_boundary_power(&self, k: usize, r: f64) -> f64 {
        one_minus_t(self.q, r).powi(k as i32) * self.eval_unchecked(r)
    }

    pub fn from_json(json: &ExpPolyJson) -> Result<Self> {
        if !(json.q > 0.0) {
            return Err(Error::InvalidParams(format!("q = {} must be positive", json.q)));
        }
        Ok(Self::new(
            json.q,
            json.terms
                .iter()
                .map(|t| Term { alpha: t.alpha, coeffs: t.coeffs.clone() })
                .collect(),
        ))
    }
}
