//! Dense univariate polynomial helpers over a [`Scalar`] field.
//! Coefficients are stored constant term first.

use crate::scalar::Scalar;

pub fn max_abs<S: Scalar>(p: &[S]) -> f64 {
    p.iter().map(|c| c.to_f64().abs()).fold(0.0, f64::max)
}

/// Drops trailing coefficients that are negligible against the largest one.
pub fn trim<S: Scalar>(p: &mut Vec<S>) {
    let scale = max_abs(p);
    while p.last().is_some_and(|c| c.is_zero() || c.negligible(scale)) {
        p.pop();
    }
}

pub fn add<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => x.clone() + y.clone(),
            (Some(x), None) => x.clone(),
            (None, Some(y)) => y.clone(),
            (None, None) => unreachable!(),
        })
        .collect()
}

pub fn mul<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    (0..a.len() + b.len() - 1)
        .map(|k| {
            let lo = k.saturating_sub(b.len() - 1);
            let hi = k.min(a.len() - 1);
            S::sum((lo..=hi).map(|i| a[i].clone() * b[k - i].clone()))
        })
        .collect()
}

pub fn scale<S: Scalar>(a: &[S], c: &S) -> Vec<S> {
    a.iter().map(|x| x.clone() * c.clone()).collect()
}

pub fn eval<S: Scalar>(p: &[S], x: &S) -> S {
    p.iter().rev().fold(S::zero(), |acc, c| acc * x.clone() + c.clone())
}

pub fn eval_f64(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

pub fn derivative<S: Scalar>(p: &[S]) -> Vec<S> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c.clone() * S::from_i64(k as i64))
        .collect()
}

/// `(1 - t)^k`
pub fn one_minus_t_pow<S: Scalar>(k: usize) -> Vec<S> {
    let base = vec![S::one(), -S::one()];
    (0..k).fold(vec![S::one()], |acc, _| mul(&acc, &base))
}

/// Divides out `(1 - t)` while it is a factor; returns the multiplicity and
/// the quotient. Float mode treats `|p(1)| <= tol · Σ|c_k|` as a root.
pub fn deflate_at_one<S: Scalar>(p: &[S], tol: f64) -> (usize, Vec<S>) {
    let mut p = p.to_vec();
    trim(&mut p);
    let mut k = 0;
    while p.len() > 1 {
        let at_one = S::sum(p.iter().cloned());
        let root = if S::EXACT {
            at_one.is_zero()
        } else {
            at_one.to_f64().abs() <= tol * p.iter().map(|c| c.to_f64().abs()).sum::<f64>()
        };
        if !root {
            break;
        }
        // p = (1 - t) s  with  s_k = c_0 + ... + c_k
        let mut s = Vec::with_capacity(p.len() - 1);
        let mut acc = S::zero();
        for c in &p[..p.len() - 1] {
            acc = acc + c.clone();
            s.push(acc.clone());
        }
        p = s;
        trim(&mut p);
        k += 1;
    }
    (k, p)
}

/// Long division `num = quot * den + rem`; `den` must have a nonzero leading
/// coefficient.
pub fn divrem<S: Scalar>(num: &[S], den: &[S]) -> (Vec<S>, Vec<S>) {
    let dd = den.len() - 1;
    if num.len() < den.len() {
        return (Vec::new(), num.to_vec());
    }
    let lead = den[dd].clone();
    let mut rem = num.to_vec();
    let mut quot = vec![S::zero(); num.len() - dd];
    for k in (0..quot.len()).rev() {
        let c = rem[k + dd].clone() / lead.clone();
        for (i, d) in den.iter().enumerate() {
            rem[k + i] = rem[k + i].clone() - c.clone() * d.clone();
        }
        rem[k + dd] = S::zero();
        quot[k] = c;
    }
    rem.truncate(dd);
    (quot, rem)
}

/// Number of distinct real roots of `p` in the open interval (0, 1), by a
/// Sturm chain. Roots sitting exactly at the endpoints are deflated first.
pub fn roots_in_open_unit_interval<S: Scalar>(p: &[S]) -> usize {
    let mut p = p.to_vec();
    trim(&mut p);
    if p.is_empty() {
        return 0;
    }
    let one = S::one();
    let endpoint_tol = 1e-12 * max_abs(&p);
    let vanishes = |q: &[S], x: &S| {
        let v = eval(q, x);
        v.is_zero() || (!S::EXACT && v.to_f64().abs() <= endpoint_tol)
    };
    while p.len() > 1 && vanishes(&p, &S::zero()) {
        p.remove(0);
    }
    while p.len() > 1 && vanishes(&p, &one) {
        // synthetic division by (t - 1)
        let (q, _) = divrem(&p, &[-S::one(), S::one()]);
        p = q;
        trim(&mut p);
    }
    if p.len() <= 1 {
        return 0;
    }

    let mut chain = vec![p.clone(), derivative(&p)];
    loop {
        let n = chain.len();
        let (_, mut rem) = divrem(&chain[n - 2], &chain[n - 1]);
        if !S::EXACT {
            let scale = max_abs(&chain[n - 2]).max(1e-300);
            for c in rem.iter_mut() {
                if c.to_f64().abs() <= 1e-10 * scale {
                    *c = S::zero();
                }
            }
        }
        trim(&mut rem);
        if rem.is_empty() {
            break;
        }
        chain.push(rem.into_iter().map(|c| -c).collect());
    }
    let sign_changes = |x: &S| {
        let signs: Vec<f64> = chain
            .iter()
            .map(|q| eval(q, x).to_f64())
            .filter(|v| *v != 0.0)
            .collect();
        signs.windows(2).filter(|w| (w[0] < 0.0) != (w[1] < 0.0)).count()
    };
    sign_changes(&S::zero()).saturating_sub(sign_changes(&one))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn divrem_exact_factor() {
        let a = one_minus_t_pow::<f64>(4);
        let b = one_minus_t_pow::<f64>(2);
        let (q, r) = divrem(&a, &b);
        assert_eq!(q, vec![1.0, -2.0, 1.0]);
        assert!(r.iter().all(|c| *c == 0.0));
    }

    #[test]
    fn sturm_counts_interior_roots() {
        let r = |n, d| Rational::from_ratio(n, d);
        // (t - 1/3)(t - 1/2)(t - 2)(1 - t)
        let p = mul(
            &mul(&[r(-1, 3), r(1, 1)], &[r(-1, 2), r(1, 1)]),
            &mul(&[r(-2, 1), r(1, 1)], &[r(1, 1), r(-1, 1)]),
        );
        assert_eq!(roots_in_open_unit_interval(&p), 2);
        let pf: Vec<f64> = p.iter().map(|c| c.to_f64()).collect();
        assert_eq!(roots_in_open_unit_interval(&pf), 2);
        assert_eq!(roots_in_open_unit_interval(&one_minus_t_pow::<f64>(3)), 0);
        assert_eq!(roots_in_open_unit_interval(&[0.0, 0.0, 1.0]), 0);
    }
}
