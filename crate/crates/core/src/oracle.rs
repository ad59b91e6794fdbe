//! Independent numerical checks: adaptive quadrature on `[ln q, r_max]`, a
//! finite-difference eigenvalue solver, the exact ODE residual and Gram
//! matrices.

use crate::error::{Error, Result};
use crate::exppoly::ExpPoly;
use crate::scalar::{CompensatedSum, Scalar};

const INITIAL_PANELS: usize = 64;

const SCALE_SAMPLES: usize = 256;

/// Width ratio of neighbouring initial panels; the first is about 1/4000 of
/// the interval.
const GRADING: f64 = 1.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSpec {
    /// Target absolute error.
    pub tol: f64,
    pub max_depth: usize,
    pub r_max: f64,
}

impl QuadSpec {
    pub fn new(tol: f64, max_depth: usize, r_max: f64) -> Result<Self> {
        if !(tol > 0.0) || max_depth == 0 || !r_max.is_finite() {
            return Err(Error::InvalidParams(format!(
                "quadrature needs tol > 0, max_depth > 0, finite r_max (got {tol}, {max_depth}, {r_max})"
            )));
        }
        Ok(Self { tol, max_depth, r_max })
    }
}

/// `ln q + max(60, 40/η)`; `η` is the slowest decay rate among the states.
pub fn default_r_max(q: f64, slowest_decay: f64) -> f64 {
    q.ln() + 60f64.max(40.0 / slowest_decay)
}

/// Slowest exponential decay rate of an exp-polynomial, `-max α`.
pub fn decay_rate(f: &ExpPoly<f64>) -> f64 {
    f.terms().iter().map(|t| -t.alpha).fold(f64::INFINITY, f64::min)
}

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: usize,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// Adaptive Simpson with the Richardson-corrected (fifth order) local rule.
/// Initial panels are graded geometrically toward `a`.
pub fn adaptive_quad<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadSpec) -> Result<f64> {
    if !(b > a) {
        return Err(Error::Domain(format!("empty interval [{a}, {b}]")));
    }
    let mut stack = Vec::with_capacity(INITIAL_PANELS * 2);
    let total_growth = GRADING.powi(INITIAL_PANELS as i32) - 1.0;
    let edge = |i: usize| if i == INITIAL_PANELS { b } else { a + (b - a) * (GRADING.powi(i as i32) - 1.0) / total_growth };
    for i in (0..INITIAL_PANELS).rev() {
        let (lo, hi) = (edge(i), edge(i + 1));
        let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
        stack.push(Panel {
            a: lo,
            b: hi,
            fa,
            fm,
            fb,
            whole: simpson(lo, hi, fa, fm, fb),
            tol: spec.tol / INITIAL_PANELS as f64,
            depth: 0,
        });
    }

    let mut total = CompensatedSum::new();
    let mut worst = 0.0f64;
    let mut failed = false;
    while let Some(p) = stack.pop() {
        let m = 0.5 * (p.a + p.b);
        let (lm, rm) = (0.5 * (p.a + m), 0.5 * (m + p.b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(p.a, m, p.fa, flm, p.fm);
        let right = simpson(m, p.b, p.fm, frm, p.fb);
        let diff = left + right - p.whole;
        if !diff.is_finite() {
            return Err(Error::Domain(format!("integrand not finite on [{}, {}]", p.a, p.b)));
        }
        let roundoff = 64.0 * f64::EPSILON * (p.b - p.a) * (p.fa.abs() + p.fm.abs() + p.fb.abs() + flm.abs() + frm.abs());
        if diff.abs() <= 15.0 * p.tol || diff.abs() <= 1e-15 * (left + right).abs() || diff.abs() <= roundoff {
            total.add(left + right + diff / 15.0);
        } else if p.depth >= spec.max_depth {
            failed = true;
            worst = worst.max(diff.abs() / 15.0);
            total.add(left + right + diff / 15.0);
        } else {
            let tol = 0.5 * p.tol;
            let depth = p.depth + 1;
            stack.push(Panel { a: m, b: p.b, fa: p.fm, fm: frm, fb: p.fb, whole: right, tol, depth });
            stack.push(Panel { a: p.a, b: m, fa: p.fa, fm: flm, fb: p.fm, whole: left, tol, depth });
        }
    }
    if failed {
        return Err(Error::ConvergenceFailure { estimate: total.value(), error: worst });
    }
    Ok(total.value())
}

/// `∫_{ln q}^{r_max} f g dr`
pub fn inner_product(f: &ExpPoly<f64>, g: &ExpPoly<f64>, spec: &QuadSpec) -> Result<f64> {
    if f.q() != g.q() {
        return Err(Error::MismatchedQ { left: *f.q(), right: *g.q() });
    }
    let lnq = f.q().ln();
    adaptive_quad(|r| f.eval_unchecked(r) * g.eval_unchecked(r), lnq, spec.r_max, spec)
}

/// `∫ f g dr` to a relative accuracy `rel` of `∫ |f g| dr`, found by a
/// coarse pass followed by a refined one.
pub fn inner_product_rel(f: &ExpPoly<f64>, g: &ExpPoly<f64>, rel: f64, max_depth: usize, r_max: f64) -> Result<f64> {
    let lnq = f.q().ln();
    let abs_fg = |r: f64| (f.eval_unchecked(r) * g.eval_unchecked(r)).abs();
    // trapezoid on points uniform in t near the boundary and uniform in r beyond
    let mut grid: Vec<f64> = (0..SCALE_SAMPLES)
        .map(|i| lnq - ((i as f64 + 0.5) / SCALE_SAMPLES as f64).ln())
        .chain((0..=SCALE_SAMPLES).map(|i| lnq + (r_max - lnq) * i as f64 / SCALE_SAMPLES as f64))
        .filter(|&r| r <= r_max)
        .collect();
    grid.sort_by(f64::total_cmp);
    let values: Vec<f64> = grid.iter().map(|&r| abs_fg(r)).collect();
    let crude: f64 = grid.windows(2).zip(values.windows(2)).map(|(r, v)| 0.5 * (r[1] - r[0]) * (v[0] + v[1])).sum();
    if crude == 0.0 {
        return Ok(0.0);
    }
    let coarse = QuadSpec::new(1e-3 * crude, 30, r_max)?;
    let scale = match adaptive_quad(abs_fg, lnq, r_max, &coarse) {
        Ok(v) => v,
        Err(Error::ConvergenceFailure { estimate, .. }) => estimate,
        Err(e) => return Err(e),
    };
    if scale == 0.0 {
        return Ok(0.0);
    }
    inner_product(f, g, &QuadSpec::new(rel * scale, max_depth, r_max)?)
}

/// Symmetric matrix of pairwise inner products.
pub fn gram_matrix(states: &[ExpPoly<f64>], spec: &QuadSpec) -> Result<Vec<Vec<f64>>> {
    let k = states.len();
    let mut g = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i..k {
            let v = inner_product(&states[i], &states[j], spec)?;
            g[i][j] = v;
            g[j][i] = v;
        }
    }
    Ok(g)
}

/// Gram matrix whose every entry is accurate to `rel` relative to
/// `∫ |ψ_i ψ_j|`.
pub fn gram_matrix_rel(states: &[ExpPoly<f64>], rel: f64, max_depth: usize, r_max: f64) -> Result<Vec<Vec<f64>>> {
    let k = states.len();
    let mut g = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i..k {
            let v = inner_product_rel(&states[i], &states[j], rel, max_depth, r_max)?;
            g[i][j] = v;
            g[j][i] = v;
        }
    }
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FDSpec {
    /// Number of intervals; the grid has `grid_points - 1` interior nodes.
    pub grid_points: usize,
    pub r_min: f64,
    pub r_max: f64,
    pub eig_tol: f64,
}

impl FDSpec {
    pub fn new(grid_points: usize, r_min: f64, r_max: f64, eig_tol: f64) -> Result<Self> {
        if grid_points < 64 || !(r_max > r_min) || !(eig_tol > 0.0) {
            return Err(Error::InvalidParams(format!(
                "finite differences need >= 64 points, r_max > r_min, eig_tol > 0 (got {grid_points}, [{r_min}, {r_max}], {eig_tol})"
            )));
        }
        Ok(Self { grid_points, r_min, r_max, eig_tol })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdLevel {
    pub energy: f64,
    /// `|E| < 1e-8`: the level sits at threshold and its extrapolation is unreliable.
    pub near_threshold: bool,
}

struct Tridiagonal {
    diag: Vec<f64>,
    off_sq: f64,
}

impl Tridiagonal {
    fn new<V: Fn(f64) -> f64>(potential: &V, r_min: f64, r_max: f64, intervals: usize) -> Self {
        let h = (r_max - r_min) / intervals as f64;
        let inv_h2 = 1.0 / (h * h);
        let diag = (1..intervals)
            .map(|i| 2.0 * inv_h2 + potential(r_min + i as f64 * h))
            .collect();
        Self { diag, off_sq: inv_h2 * inv_h2 }
    }

    /// Eigenvalues strictly below `lambda` (LDLᵀ inertia).
    fn count_below(&self, lambda: f64) -> usize {
        let mut count = 0;
        let mut d = 1.0;
        for (i, a) in self.diag.iter().enumerate() {
            d = if i == 0 { a - lambda } else { a - lambda - self.off_sq / d };
            if d == 0.0 {
                d = -f64::EPSILON * (a.abs() + lambda.abs()).max(f64::MIN_POSITIVE);
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn negative_eigenvalues(&self, tol: f64) -> Vec<f64> {
        let floor = self.diag.iter().map(|a| a - 2.0 * self.off_sq.sqrt()).fold(0.0f64, f64::min);
        let count = self.count_below(0.0);
        (0..count)
            .map(|k| {
                let (mut lo, mut hi) = (floor, 0.0);
                while hi - lo > tol * hi.abs().max(1e-300) && hi - lo > f64::EPSILON * lo.abs() {
                    let mid = 0.5 * (lo + hi);
                    if self.count_below(mid) > k {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                0.5 * (lo + hi)
            })
            .collect()
    }
}

/// Negative eigenvalues of `-d²/dr² + V` with Dirichlet ends, by Sturm
/// bisection on grids of `N` and `2N` intervals followed by Richardson
/// extrapolation `(4E_{2N} - E_N)/3`. `eig_tol` is relative.
pub fn fd_spectrum<V: Fn(f64) -> f64>(potential: V, spec: &FDSpec) -> Vec<FdLevel> {
    let coarse = Tridiagonal::new(&potential, spec.r_min, spec.r_max, spec.grid_points)
        .negative_eigenvalues(spec.eig_tol);
    let fine = Tridiagonal::new(&potential, spec.r_min, spec.r_max, 2 * spec.grid_points)
        .negative_eigenvalues(spec.eig_tol);
    fine.iter()
        .enumerate()
        .map(|(k, &ef)| {
            let energy = match coarse.get(k) {
                Some(&ec) => (4.0 * ef - ec) / 3.0,
                None => ef,
            };
            FdLevel { energy, near_threshold: energy.abs() < 1e-8 || coarse.get(k).is_none() }
        })
        .collect()
}

/// `V(r) = barrier e^{-r}/(1 - q e^{-r})² - v e^{-r}/(1 - q e^{-r})`
pub fn potential(v: f64, q: f64, barrier: f64) -> impl Fn(f64) -> f64 {
    move |r| {
        let e = (-r).exp();
        let d = -(q.ln() - r).exp_m1();
        barrier * e / (d * d) - v * e / d
    }
}

/// Max coefficient of `(1 - t)² (-ψ'' + Vψ - Eψ)` written as an
/// exp-polynomial; zero iff `ψ` solves the equation exactly.
pub fn ode_residual<S: Scalar>(psi: &ExpPoly<S>, v: &S, q: &S, barrier: &S, energy: &S) -> Result<f64> {
    let one_minus_t_sq = [S::one(), S::from_i64(-2), S::one()];
    let kinetic = psi.derivative(2).neg().sub(&psi.scale(energy))?;
    let mut total = kinetic.mul_poly(&one_minus_t_sq);
    // V(1-t)² = barrier t/q - v t (1-t)/q
    let b = barrier.clone() / q.clone();
    let w = v.clone() / q.clone();
    let vpoly = [S::zero(), b - w.clone(), w];
    total = total.add(&psi.mul_poly(&vpoly))?;
    let total = total.collapse_integer_shifts();
    if total.is_zero() {
        return Ok(0.0);
    }
    Ok(total.max_abs_coeff())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hulthen::{eigenfunction, energy, ReducedParams};
    use crate::scalar::Rational;

    fn spec(tol: f64, r_max: f64) -> QuadSpec {
        QuadSpec::new(tol, 50, r_max).unwrap()
    }

    #[test]
    fn quad_examples() {
        let v = adaptive_quad(|t| t * t, 0.0, 1.0, &spec(1e-14, 1.0)).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
        let p = |t: f64| t.powi(3) * (1.0 - t).powi(2) * (1.0 - 1.4 * t).powi(2);
        let v = adaptive_quad(p, 0.0, 1.0, &spec(1e-16, 1.0)).unwrap();
        assert!((v - 1.0 / 600.0).abs() < 1e-15);
        let f = |r: f64| (3.5 * (-2.0 * r).exp() * (1.0 - (-r).exp()).powi(2)).powi(2);
        let v = adaptive_quad(f, 0.0, 60.0, &spec(1e-14, 60.0)).unwrap();
        assert!((v - 0.04375).abs() < 1e-13);
    }

    #[test]
    fn quad_reports_nonconvergence() {
        let f = |x: f64| if x < 0.3 { 0.0 } else { 1.0 };
        let tight = QuadSpec::new(1e-30, 3, 1.0).unwrap();
        match adaptive_quad(f, 0.0, 1.0, &tight) {
            Err(Error::ConvergenceFailure { estimate, .. }) => assert!((estimate - 0.7).abs() < 1e-2),
            other => panic!("expected convergence failure, got {other:?}"),
        }
    }

    #[test]
    fn gram_matrix_examples() {
        let p = ReducedParams::new(12.0, 1.0).unwrap();
        let states: Vec<_> = (0..3).map(|n| eigenfunction(&p, n).unwrap()).collect();
        let g = gram_matrix_rel(&states, 1e-12, 60, default_r_max(1.0, 0.5)).unwrap();
        assert!((g[0][0] * 858.0 - 1.0).abs() < 1e-10);
        assert!((g[1][1] * 600.0 - 1.0).abs() < 1e-10);
        assert!((g[2][2] * 14.0 - 1.0).abs() < 1e-10);
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!(g[i][j].abs() <= 1e-8 * (g[i][i] * g[j][j]).sqrt());
                }
            }
        }
        let normed = states[0].scale(&858f64.sqrt());
        let g = gram_matrix(&[normed], &spec(1e-12, 60.0)).unwrap();
        assert!((g[0][0] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn fd_examples() {
        let fd = FDSpec::new(4096, 0.0, 80.0, 1e-13).unwrap();
        let levels = fd_spectrum(potential(12.0, 1.0, 0.0), &fd);
        let want = [-30.25, -4.0, -0.25];
        assert_eq!(levels.len(), 3);
        for (l, w) in levels.iter().zip(want) {
            assert!((l.energy / w - 1.0).abs() < 1e-4, "{} vs {w}", l.energy);
        }
        assert!(fd_spectrum(potential(1.0, 1.0, 0.0), &fd).is_empty());
        let levels = fd_spectrum(potential(12.0, 1.0, 2.0), &fd);
        assert_eq!(levels.len(), 2);
        assert!((levels[0].energy / -4.0 - 1.0).abs() < 1e-4);
        assert!((levels[1].energy / -0.25 - 1.0).abs() < 1e-4);
    }

    #[test]
    fn residual_examples() {
        let p = ReducedParams::new(Rational::from_i64(12), Rational::from_i64(1)).unwrap();
        let psi = eigenfunction(&p, 0).unwrap();
        let e = energy(&p, 0).unwrap();
        let zero = Rational::from_i64(0);
        assert_eq!(ode_residual(&psi, &p.v, &p.q, &zero, &e).unwrap(), 0.0);
        let off = e + Rational::from_i64(1);
        assert!(ode_residual(&psi, &p.v, &p.q, &zero, &off).unwrap() >= 0.9);

        let pf = p.to_float();
        for n in 0..3 {
            let psi = eigenfunction(&pf, n).unwrap();
            let r = ode_residual(&psi, &12.0, &1.0, &0.0, &energy(&pf, n).unwrap()).unwrap();
            assert!(r <= 1e-10, "n = {n}: {r}");
        }
        let r = |n, d| Rational::from_ratio(n, d);
        let psi11 = ExpPoly::single(r(1, 1), r(-2, 1), vec![r(1, 1), r(-2, 1), r(1, 1)]);
        assert_eq!(ode_residual(&psi11, &p.v, &p.q, &r(2, 1), &r(-4, 1)).unwrap(), 0.0);
    }

    #[test]
    fn residual_is_homogeneous() {
        let p = ReducedParams::new(12.0, 1.0).unwrap();
        let psi = eigenfunction(&p, 1).unwrap();
        let base = ode_residual(&psi, &12.0, &1.0, &0.0, &-3.0).unwrap();
        let scaled = ode_residual(&psi.scale(&-2.5), &12.0, &1.0, &0.0, &-3.0).unwrap();
        assert!((scaled - 2.5 * base).abs() <= 1e-14 * scaled);
    }
}
