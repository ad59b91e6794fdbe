//! Full oracle sweep for one `(v, q)`, collected into a report.

use serde::Serialize;

use crate::darboux;
use crate::error::{Error, Result};
use crate::exppoly::ExpPoly;
use crate::hulthen::{self, PhysicalParams, ReducedParams};
use crate::oracle::{self, FDSpec};
use crate::scalar::Scalar;

const SAMPLE_POINTS: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub target_ref: String,
    pub computed: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    /// `passed` iff `|computed - expected| <= tolerance · max(1, |expected|)`.
    pub fn new(name: impl Into<String>, target_ref: &str, computed: f64, expected: f64, tolerance: f64) -> Self {
        let passed = (computed - expected).abs() <= tolerance * expected.abs().max(1.0);
        Self { name: name.into(), target_ref: target_ref.into(), computed, expected, tolerance, passed }
    }

    fn failed(name: impl Into<String>, target_ref: &str, error: &Error) -> Self {
        let mut c = Self::new(name, target_ref, f64::NAN, 0.0, 0.0);
        c.target_ref = format!("{target_ref}: {error}");
        c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub v: f64,
    pub q: f64,
    pub arithmetic: &'static str,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn new(v: f64, q: f64, arithmetic: &'static str, mut checks: Vec<Check>) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let passed = checks.iter().all(|c| c.passed);
        Self { v, q, arithmetic, passed, checks }
    }

    pub fn extend(&mut self, more: Vec<Check>) {
        self.checks.extend(more);
        self.checks.sort_by(|a, b| a.name.cmp(&b.name));
        self.passed = self.checks.iter().all(|c| c.passed);
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Injected errors in the closed forms, for testing the harness itself.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Perturbation {
    /// Added to every closed-form energy.
    pub energy: f64,
    /// Relative error applied to every closed-form norm integral.
    pub norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub quad_tol: f64,
    pub fd_tol: f64,
    pub fd_points: usize,
    pub residual_tol: f64,
    pub route_tol: f64,
    pub curvature_tol: f64,
    pub chain_norm_tol: f64,
    pub double_sum_tol: f64,
    pub pfaff_tol: f64,
    pub max_chain: usize,
    pub perturb: Perturbation,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            quad_tol: 1e-8,
            fd_tol: 1e-6,
            fd_points: 1 << 15,
            residual_tol: 1e-10,
            route_tol: 1e-9,
            curvature_tol: 1e-8,
            chain_norm_tol: 1e-6,
            double_sum_tol: 1e-9,
            pfaff_tol: 1e-10,
            max_chain: 3,
            perturb: Perturbation::default(),
        }
    }
}

/// `r` values at `t = (i + ½)/50`, spread over the whole half-line.
pub fn sample_points(q: f64) -> Vec<f64> {
    (0..SAMPLE_POINTS)
        .map(|i| q.ln() - ((i as f64 + 0.5) / SAMPLE_POINTS as f64).ln())
        .collect()
}

/// Splits off the boundary zero so values near `t = 1` keep full precision.
fn split<S: Scalar>(f: &ExpPoly<S>) -> (usize, ExpPoly<f64>) {
    let (k, u) = f.boundary_split();
    (k, u.to_float())
}

/// `(max - min) / |mean|` of `a(r)/b(r)` over the sample points.
pub fn ratio_spread<S: Scalar>(a: &ExpPoly<S>, b: &ExpPoly<S>) -> f64 {
    let ((ka, ua), (kb, ub)) = (split(a), split(b));
    let ratios: Vec<f64> = sample_points(a.q().to_f64())
        .into_iter()
        .filter_map(|r| {
            let x = ua.eval_with_boundary_power(ka.saturating_sub(kb), r);
            let y = ub.eval_with_boundary_power(kb.saturating_sub(ka), r);
            (y != 0.0).then_some(x / y)
        })
        .collect();
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    (hi - lo) / mean.abs()
}

/// Largest `|a(r) - b(r)| / max(|a(r)|, |b(r)|)` over the sample points.
pub fn pointwise_defect<S: Scalar>(a: &ExpPoly<S>, b: &ExpPoly<S>) -> f64 {
    let ((ka, ua), (kb, ub)) = (split(a), split(b));
    let k = ka.min(kb);
    sample_points(a.q().to_f64())
        .into_iter()
        .map(|r| {
            let x = ua.eval_with_boundary_power(ka - k, r);
            let y = ub.eval_with_boundary_power(kb - k, r);
            let scale = x.abs().max(y.abs());
            if scale == 0.0 { 0.0 } else { (x - y).abs() / scale }
        })
        .fold(0.0, f64::max)
}

struct Ctx<'a, S> {
    p: &'a ReducedParams<S>,
    opts: &'a VerifyOptions,
    count: usize,
    energies: Vec<S>,
    r_max: f64,
    checks: Vec<Check>,
}

impl<S: Scalar> Ctx<'_, S> {
    fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    /// Runs `f`; an error becomes a failing check named `name`.
    fn guard(&mut self, name: &str, target: &str, f: impl FnOnce(&mut Self) -> Result<()>) {
        if let Err(e) = f(self) {
            self.push(Check::failed(name, target, &e));
        }
    }

    fn residual_tol(&self) -> f64 {
        if S::EXACT { 0.0 } else { self.opts.residual_tol }
    }

    fn norm_closed(&self, n: usize) -> Result<f64> {
        Ok(hulthen::norm_integral(self.p, n, n)? * (1.0 + self.opts.perturb.norm))
    }

    fn quad_sq(&self, f: &ExpPoly<f64>, g: &ExpPoly<f64>) -> Result<f64> {
        oracle::inner_product_rel(f, g, 1e-12, 60, self.r_max)
    }
}

/// Runs every check for `p`; fails only when `p` has no bound state.
pub fn verify<S: Scalar>(p: &ReducedParams<S>, opts: &VerifyOptions) -> Result<VerificationReport> {
    let count = hulthen::bound_state_count(p);
    if count == 0 {
        return Err(Error::NoSuchState(format!(
            "v = {}, q = {} has no bound states",
            p.v.to_f64(),
            p.q.to_f64()
        )));
    }
    let shift = S::from_f64(opts.perturb.energy);
    let energies = (0..count)
        .map(|n| Ok(hulthen::energy(p, n)? + shift.clone()))
        .collect::<Result<Vec<_>>>()?;
    let shallowest = (-hulthen::energy(p, count - 1)?.to_f64()).sqrt();
    let (v, q) = (p.v.to_f64(), p.q.to_f64());
    let mut cx = Ctx {
        p,
        opts,
        count,
        energies,
        r_max: oracle::default_r_max(q, shallowest),
        checks: Vec::new(),
    };
    let max_j = opts.max_chain.min(count - 1);

    spectrum_checks(&mut cx, v, q, max_j);
    cx.guard("normalization", "normalization", norm_checks);
    residual_checks(&mut cx, max_j);
    chain_checks(&mut cx, max_j);
    let arithmetic = if S::EXACT { "rational" } else { "float" };
    Ok(VerificationReport::new(v, q, arithmetic, cx.checks))
}

fn spectrum_checks<S: Scalar>(cx: &mut Ctx<S>, v: f64, q: f64, max_j: usize) {
    let tol = cx.opts.fd_tol;
    for j in 0..=max_j {
        let barrier = (j * (j + 1)) as f64 * q;
        let spec = match FDSpec::new(cx.opts.fd_points, q.ln(), cx.r_max, 1e-13) {
            Ok(s) => s,
            Err(e) => return cx.push(Check::failed("spectrum", "spectrum", &e)),
        };
        let levels = oracle::fd_spectrum(oracle::potential(v, q, barrier), &spec);
        cx.push(Check::new(
            format!("spectrum.count.j{j}"),
            "bound-state count",
            levels.len() as f64,
            (cx.count - j) as f64,
            0.0,
        ));
        for (k, level) in levels.iter().enumerate().take(cx.count - j) {
            let n = j + k;
            let closed = cx.energies[n].to_f64();
            cx.push(Check::new(
                format!("spectrum.fd.j{j}.n{n}"),
                if j == 0 { "energy levels" } else { "isospectral chain levels" },
                level.energy / closed,
                1.0,
                tol,
            ));
        }
    }
}

fn norm_checks<S: Scalar>(cx: &mut Ctx<S>) -> Result<()> {
    let states = (0..cx.count)
        .map(|n| Ok(hulthen::eigenfunction(cx.p, n)?.to_float()))
        .collect::<Result<Vec<_>>>()?;
    let mut gram = vec![vec![0.0; cx.count]; cx.count];
    for n in 0..cx.count {
        for m in n..cx.count {
            gram[n][m] = cx.quad_sq(&states[n], &states[m])?;
            gram[m][n] = gram[n][m];
        }
    }
    let tol = cx.opts.quad_tol;
    for n in 0..cx.count {
        let closed = cx.norm_closed(n)?;
        cx.push(Check::new(format!("norm.quadrature.n{n}"), "norm integral", gram[n][n] / closed, 1.0, tol));
        let nc = hulthen::normalization_constant(cx.p, n)? / (1.0 + cx.opts.perturb.norm).sqrt();
        cx.push(Check::new(format!("norm.unit.n{n}"), "normalization constant", nc * nc * gram[n][n], 1.0, tol));
        for m in 0..cx.count {
            let double = hulthen::norm_integral_double_sum(cx.p, n, m)?;
            if n == m {
                cx.push(Check::new(
                    format!("norm.double_sum.n{n}.m{m}"),
                    "double-sum norm",
                    double / closed,
                    1.0,
                    cx.opts.double_sum_tol,
                ));
            } else {
                let scale = (gram[n][n] * gram[m][m]).sqrt();
                cx.push(Check::new(
                    format!("norm.double_sum.n{n}.m{m}"),
                    "double-sum norm",
                    double / scale,
                    0.0,
                    cx.opts.double_sum_tol,
                ));
                if n < m {
                    cx.push(Check::new(
                        format!("orthogonality.n{n}.m{m}"),
                        "orthogonality",
                        gram[n][m].abs() / scale,
                        0.0,
                        tol,
                    ));
                }
            }
        }
        let a = hulthen::eigenfunction(cx.p, n)?;
        let b = hulthen::eigenfunction_pfaff_form(cx.p, n)?;
        cx.push(Check::new(format!("pfaff.n{n}"), "transformed eigenfunction", pointwise_defect(&a, &b), 0.0, cx.opts.pfaff_tol));
    }
    Ok(())
}

fn residual_checks<S: Scalar>(cx: &mut Ctx<S>, max_j: usize) {
    let (v, q) = (cx.p.v.clone(), cx.p.q.clone());
    let tol = cx.residual_tol();
    let zero = S::zero();
    for n in 0..cx.count {
        let name = format!("residual.base.n{n}");
        cx.guard(&name.clone(), "ode residual", |cx| {
            let psi = hulthen::eigenfunction(cx.p, n)?;
            let r = oracle::ode_residual(&psi, &v, &q, &zero, &cx.energies[n])?;
            cx.push(Check::new(name, "ode residual", r, 0.0, tol));
            Ok(())
        });
    }
    let shift = S::from_f64(cx.opts.perturb.energy);
    for s in 2..=cx.count {
        let s_plus = S::from_i64(s as i64);
        let barrier = S::from_i64((s * (s - 1)) as i64) * q.clone();
        for k in 0..=cx.count - s {
            if hulthen::extended_energy(cx.p, &s_plus, k).is_err() {
                continue;
            }
            let name = format!("residual.extended.s{s}.n{k}");
            cx.guard(&name.clone(), "extended ode residual", |cx| {
                let psi = hulthen::extended_eigenfunction(cx.p, &s_plus, k)?;
                let e = hulthen::extended_energy(cx.p, &s_plus, k)? + shift.clone();
                let r = oracle::ode_residual(&psi, &v, &q, &barrier, &e)?;
                cx.push(Check::new(name, "extended ode residual", r, 0.0, tol));
                Ok(())
            });
        }
    }
    for j in 1..=max_j {
        let barrier = darboux::chain_potential(cx.p, j).barrier_coefficient;
        for n in j..cx.count {
            for route in ["wronskian", "closed_form"] {
                let name = format!("residual.chain.{route}.j{j}.n{n}");
                cx.guard(&name.clone(), "chain ode residual", |cx| {
                    let psi = if route == "wronskian" {
                        darboux::crum_chain(cx.p, j, n)?.psi
                    } else {
                        darboux::closed_form_chain_psi(cx.p, j, n)?
                    };
                    let r = oracle::ode_residual(&psi, &v, &q, &barrier, &cx.energies[n])?;
                    cx.push(Check::new(name, "chain ode residual", r, 0.0, tol));
                    Ok(())
                });
            }
        }
    }
}

fn chain_checks<S: Scalar>(cx: &mut Ctx<S>, max_j: usize) {
    let q = cx.p.q.to_f64();
    for j in 1..=max_j {
        let name = format!("curvature.j{j}");
        cx.guard(&name.clone(), "log-wronskian curvature", |cx| {
            let c = darboux::log_wronskian_curvature(cx.p, j)?;
            let mut worst = 0.0f64;
            for r in sample_points(q) {
                worst = worst.max((c.evaluate(r)? / darboux::barrier_profile(j, q, r) - 1.0).abs());
            }
            cx.push(Check::new(name, "log-wronskian curvature", worst, 0.0, cx.opts.curvature_tol));
            let defect = c.identity_defect()?;
            let tol = if S::EXACT { 0.0 } else { cx.opts.curvature_tol };
            cx.push(Check::new(format!("curvature.identity.j{j}"), "log-wronskian curvature", defect, 0.0, tol));
            Ok(())
        });

        let mut wronskian_states = Vec::new();
        for n in j..cx.count {
            let name = format!("route.j{j}.n{n}");
            cx.guard(&name.clone(), "chain routes", |cx| {
                let w = darboux::crum_chain(cx.p, j, n)?.psi;
                let c = darboux::closed_form_chain_state(cx.p, j, n)?;
                let spread = ratio_spread(&w, &c.psi);
                cx.push(Check::new(name, "chain routes", spread, 0.0, cx.opts.route_tol));
                let wf = w.to_float();
                let quad = cx.quad_sq(&wf, &wf)?;
                let closed = darboux::chain_norm(cx.p, j, n)?;
                cx.push(Check::new(
                    format!("chain_norm.j{j}.n{n}"),
                    "chain norm",
                    quad / (closed * (1.0 + cx.opts.perturb.norm)),
                    1.0,
                    cx.opts.chain_norm_tol,
                ));
                wronskian_states.push(wf);
                Ok(())
            });
        }
        let name = format!("chain.orthogonality.j{j}");
        let states = wronskian_states;
        cx.guard(&name.clone(), "chain orthogonality", |cx| {
            let mut worst = 0.0f64;
            for a in 0..states.len() {
                for b in a + 1..states.len() {
                    let g = cx.quad_sq(&states[a], &states[b])?;
                    let scale = (cx.quad_sq(&states[a], &states[a])? * cx.quad_sq(&states[b], &states[b])?).sqrt();
                    worst = worst.max(g.abs() / scale);
                }
            }
            cx.push(Check::new(name, "chain orthogonality", worst, 0.0, cx.opts.quad_tol));
            Ok(())
        });
    }
    if max_j >= 2 {
        for n in 2..cx.count {
            let name = format!("chain.printed_forms.n{n}");
            cx.guard(&name.clone(), "second-level forms", |cx| {
                let (a, b) = darboux::second_level_printed_forms(cx.p, n)?;
                let d = pointwise_defect(&a, &b);
                cx.push(Check::new(name, "second-level forms", d, 0.0, cx.opts.route_tol));
                Ok(())
            });
        }
    }
}

/// Physical-unit energies against the reduced ones, `E = δ² ℰ / 2`.
pub fn physical_checks<S: Scalar>(phys: &PhysicalParams<S>, perturb: &Perturbation) -> Result<Vec<Check>> {
    let reduced = phys.to_reduced();
    let mut out = Vec::new();
    for n in 0..hulthen::bound_state_count(&reduced) {
        let direct = phys.energy(n)?.to_f64() + perturb.energy * phys.delta.to_f64().powi(2) / 2.0;
        let mapped = phys.energy_from_reduced(&hulthen::energy(&reduced, n)?).to_f64();
        out.push(Check::new(format!("physical.energy.n{n}"), "physical energies", direct / mapped, 1.0, 1e-13));
    }
    Ok(out)
}
