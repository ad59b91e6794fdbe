//! Scalar special functions: log-Gamma, Pochhammer symbols and terminating
//! hypergeometric sums.
//!
//! Series are summed in ascending index with compensated accumulation in
//! float mode and exactly in rational mode. A float parameter counts as an
//! integer when it lies within [`INTEGER_TOL`] of one.

use crate::error::{Error, Result};
use crate::scalar::{Scalar, INTEGER_TOL};

const LANCZOS_R: f64 = 10.900511;

const LANCZOS_DK: [f64; 11] = [
    2.48574089138753565546e-5,
    1.05142378581721974210,
    -3.45687097222016235469,
    4.51227709466894823700,
    -2.98285225323576655721,
    1.05639711577126713077,
    -1.95428773191645869583e-1,
    1.70970543404441224307e-2,
    -5.71926117404305781283e-4,
    4.63399473359905636708e-6,
    -2.71994908488607703910e-9,
];

/// ln(2·sqrt(e/π))
const LN_2_SQRT_E_OVER_PI: f64 = 0.620_782_237_635_245_2;

/// Upper bound on terms for non-terminating sums.
const MAX_SERIES_TERMS: usize = 1_000_000;

/// Natural log of the Gamma function for `x > 0` (Lanczos, g = 10.900511).
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("log_gamma({x}): argument must be positive")));
    }
    if x < 0.5 {
        // Γ(x) = Γ(x + 1) / x
        return Ok(lanczos_ln_gamma(x + 1.0) - x.ln());
    }
    Ok(lanczos_ln_gamma(x))
}

fn lanczos_ln_gamma(x: f64) -> f64 {
    let s = LANCZOS_DK
        .iter()
        .enumerate()
        .skip(1)
        .fold(LANCZOS_DK[0], |s, (i, &dk)| s + dk / (x + i as f64 - 1.0));
    s.ln() + LN_2_SQRT_E_OVER_PI + (x - 0.5) * ((x - 0.5 + LANCZOS_R) / std::f64::consts::E).ln()
}

/// Rising factorial `(a)_k = a (a+1) ... (a+k-1)`, `(a)_0 = 1`.
///
/// Overflow in float mode yields an infinite result rather than a clamp.
pub fn pochhammer<S: Scalar>(a: &S, k: usize) -> S {
    let mut acc = S::one();
    for i in 0..k {
        acc = acc * (a.clone() + S::from_i64(i as i64));
    }
    acc
}

/// Parameters of a generalized hypergeometric series `pFq(upper; lower; z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HypParams<S> {
    pub upper: Vec<S>,
    pub lower: Vec<S>,
    pub argument: S,
}

impl<S: Scalar> HypParams<S> {
    pub fn new(upper: Vec<S>, lower: Vec<S>, argument: S) -> Self {
        Self { upper, lower, argument }
    }

    /// Degree of the terminating polynomial: the smallest `N` such that some
    /// upper parameter equals `-N`. `None` for a non-terminating series.
    pub fn termination_degree(&self) -> Option<usize> {
        self.upper
            .iter()
            .filter_map(|a| a.is_nonpositive_integer())
            .min()
            .map(|n| n as usize)
    }

    /// Polynomial coefficients `c_k` (in the argument) of a terminating series.
    pub fn coefficients(&self) -> Result<Vec<S>> {
        let degree = self.termination_degree().ok_or_else(|| {
            Error::Unsupported(format!("series with upper parameters {:?} does not terminate", self.upper))
        })?;
        check_lower_poles(&self.lower, degree)?;
        let mut coeffs = Vec::with_capacity(degree + 1);
        let mut term = S::one();
        coeffs.push(term.clone());
        for k in 0..degree {
            let kk = S::from_i64(k as i64);
            let mut num = S::one();
            for a in &self.upper {
                num = num * (a.clone() + kk.clone());
            }
            let mut den = S::from_i64(k as i64 + 1);
            for b in &self.lower {
                den = den * (b.clone() + kk.clone());
            }
            term = term * num / den;
            coeffs.push(term.clone());
        }
        Ok(coeffs)
    }

    /// Value of a terminating series at its argument.
    pub fn evaluate_terminating(&self) -> Result<S> {
        let coeffs = self.coefficients()?;
        let mut power = S::one();
        let terms: Vec<S> = coeffs
            .into_iter()
            .map(|c| {
                let t = c * power.clone();
                power = power.clone() * self.argument.clone();
                t
            })
            .collect();
        Ok(S::sum(terms))
    }
}

/// Rejects a lower parameter `b` that is a nonpositive integer with
/// `(b)_k = 0` for some `k <= degree`.
fn check_lower_poles<S: Scalar>(lower: &[S], degree: usize) -> Result<()> {
    for b in lower {
        if let Some(m) = b.is_nonpositive_integer() {
            if (m as usize) < degree {
                return Err(Error::DegenerateParameter(format!(
                    "lower parameter {:?} is a pole before termination at degree {degree}",
                    b
                )));
            }
        }
    }
    Ok(())
}

/// Coefficients of the polynomial `2F1(-n, b; c; z)` in `z`, constant first.
pub fn hyp2f1_coefficients<S: Scalar>(n: usize, b: &S, c: &S) -> Result<Vec<S>> {
    HypParams::new(vec![S::from_i64(-(n as i64)), b.clone()], vec![c.clone()], S::zero()).coefficients()
}

/// Terminating Gauss series `2F1(-n, b; c; z)`.
pub fn hyp2f1_terminating<S: Scalar>(n: usize, b: &S, c: &S, z: &S) -> Result<S> {
    HypParams::new(vec![S::from_i64(-(n as i64)), b.clone()], vec![c.clone()], z.clone()).evaluate_terminating()
}

/// Gauss series `2F1(a, b; c; z)` for `|z| < 1`, summed until the term falls
/// below `1e-16` of the partial sum (at most 10^6 terms).
pub fn hyp2f1_series(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if z.abs() >= 1.0 {
        return Err(Error::Unsupported(format!("2F1 series at |z| = {} >= 1", z.abs())));
    }
    let params = HypParams::new(vec![a, b], vec![c], z);
    if params.termination_degree().is_some() {
        return params.evaluate_terminating();
    }
    if c.is_nonpositive_integer().is_some() {
        return Err(Error::DegenerateParameter(format!("lower parameter {c} is a pole")));
    }
    let mut sum = crate::scalar::CompensatedSum::new();
    let mut term = 1.0;
    sum.add(term);
    for k in 0..MAX_SERIES_TERMS {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
        sum.add(term);
        if term.abs() < 1e-16 * sum.value().abs() {
            return Ok(sum.value());
        }
    }
    Err(Error::ConvergenceFailure { estimate: sum.value(), error: term.abs() })
}

/// Terminating `3F2(a1, a2, a3; b1, b2; 1)`.
pub fn hyp3f2_unit<S: Scalar>(a1: &S, a2: &S, a3: &S, b1: &S, b2: &S) -> Result<S> {
    HypParams::new(
        vec![a1.clone(), a2.clone(), a3.clone()],
        vec![b1.clone(), b2.clone()],
        S::one(),
    )
    .evaluate_terminating()
}

/// Terminating Kampé de Fériet double sum at unit arguments:
///
/// ```text
/// Σ_{i≤n} Σ_{j≤m} (c0)_{i+j}/(d0)_{i+j}
///     · (u1)_i (u2)_i / ((ln)_i i!) · (w1)_j (w2)_j / ((lm)_j j!)
/// ```
///
/// where `upper_n = [u1, u2]` must contain `-n` and `upper_m = [w1, w2]`
/// must contain `-m`.
#[allow(clippy::too_many_arguments)]
pub fn kampe_unit<S: Scalar>(
    c0: &S,
    upper_n: &[S; 2],
    upper_m: &[S; 2],
    d0: &S,
    lower_n: &S,
    lower_m: &S,
    n: usize,
    m: usize,
) -> Result<S> {
    let terminates = |pair: &[S; 2], deg: usize| pair.iter().any(|a| a.is_nonpositive_integer() == Some(deg as u64));
    if !terminates(upper_n, n) || !terminates(upper_m, m) {
        return Err(Error::Domain(format!(
            "Kampé de Fériet sum needs -{n} among {upper_n:?} and -{m} among {upper_m:?}"
        )));
    }
    check_lower_poles(std::slice::from_ref(lower_n), n)?;
    check_lower_poles(std::slice::from_ref(lower_m), m)?;
    check_lower_poles(std::slice::from_ref(d0), n + m)?;

    let single = |pair: &[S; 2], lower: &S, deg: usize| -> Vec<S> {
        let mut out = Vec::with_capacity(deg + 1);
        let mut term = S::one();
        out.push(term.clone());
        for k in 0..deg {
            let kk = S::from_i64(k as i64);
            term = term * (pair[0].clone() + kk.clone()) * (pair[1].clone() + kk.clone())
                / ((lower.clone() + kk) * S::from_i64(k as i64 + 1));
            out.push(term.clone());
        }
        out
    };
    let left = single(upper_n, lower_n, n);
    let right = single(upper_m, lower_m, m);
    let shared: Vec<S> = (0..=n + m).map(|k| pochhammer(c0, k) / pochhammer(d0, k)).collect();

    let mut terms = Vec::with_capacity((n + 1) * (m + 1));
    for (i, li) in left.iter().enumerate() {
        for (j, rj) in right.iter().enumerate() {
            terms.push(shared[i + j].clone() * li.clone() * rj.clone());
        }
    }
    Ok(S::sum(terms))
}

/// Whether `x` is within the float integer-detection tolerance of an integer.
pub fn is_near_integer(x: f64) -> bool {
    (x - x.round()).abs() <= INTEGER_TOL
}
