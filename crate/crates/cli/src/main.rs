//! `hulthen-lab`: spectra, normalized states, Crum chains and the oracle
//! sweep for the deformed Hulthén potential.

mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use hulthen_core::darboux::{self, DEFAULT_MAX_CHAIN};
use hulthen_core::exppoly::MAX_WRONSKIAN_ORDER;
use hulthen_core::hulthen::{self, PhysicalParams, ReducedParams};
use hulthen_core::scalar::parse_rational;
use hulthen_core::verify::{self, Perturbation, VerifyOptions};
use hulthen_core::{Error, ExpPolyJson, Rational, Scalar};

use output::{Format, Table};

const SUCCESS: u8 = 0;
const VERIFICATION_FAILED: u8 = 1;
const INVALID_INPUT: u8 = 2;
const EMPTY_RESULT: u8 = 3;
const THEORY_VIOLATION: u8 = 4;
const IO_FAILURE: u8 = 74;

#[derive(Debug, Parser)]
#[command(name = "hulthen-lab", version, about = "Bound states and Crum-Darboux chains of the deformed Hulthén potential")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Reduced coupling `v = 2μ/δ²`
    #[arg(long, global = true, allow_hyphen_values = true, conflicts_with_all = ["mu", "delta"])]
    v: Option<String>,

    /// Physical coupling μ (needs --delta)
    #[arg(long, global = true, allow_hyphen_values = true, requires = "delta")]
    mu: Option<String>,

    /// Screening δ (needs --mu)
    #[arg(long, global = true, allow_hyphen_values = true, requires = "mu")]
    delta: Option<String>,

    /// Deformation q
    #[arg(long, global = true, allow_hyphen_values = true)]
    q: Option<String>,

    /// State index, or `all`
    #[arg(long, global = true, default_value = "all")]
    n: String,

    /// Chain level
    #[arg(long, global = true, default_value_t = 0)]
    j: usize,

    /// Quadrature tolerance for verify
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Exact arithmetic when every parameter is an integer or `a/b`
    #[arg(long, global = true)]
    rational: bool,

    /// Number of points in the sampled wavefunction
    #[arg(long, global = true, default_value_t = 101)]
    samples: usize,

    /// Added to every closed-form energy before verification
    #[arg(long, global = true, default_value_t = 0.0, allow_hyphen_values = true, hide = true)]
    perturb_energy: f64,

    /// Relative error applied to every closed-form norm before verification
    #[arg(long, global = true, default_value_t = 0.0, allow_hyphen_values = true, hide = true)]
    perturb_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
enum Command {
    /// Closed-form energy levels
    Spectrum,
    /// Normalized eigenfunction with samples
    State,
    /// Crum chain state at level j by both routes
    Chain,
    /// Every oracle check for the parameters
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Arithmetic {
    Float,
    Rational,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Self { code: INVALID_INPUT, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::NoSuchState(_) => EMPTY_RESULT,
            Error::InexactDivision { .. } | Error::TheoryViolation(_) | Error::InvalidSeed(_) => THEORY_VIOLATION,
            Error::InvalidParams(_) | Error::Domain(_) | Error::Unsupported(_) => INVALID_INPUT,
            _ => THEORY_VIOLATION,
        };
        Self { code, message: e.to_string() }
    }
}

type Outcome = std::result::Result<u8, Failure>;

/// Inputs as given, before choosing an arithmetic.
struct RawParams {
    v: Option<String>,
    mu: Option<String>,
    delta: Option<String>,
    q: String,
}

#[derive(Debug, Clone, Serialize)]
struct ParamsJson {
    v: f64,
    q: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta: Option<f64>,
    arithmetic: &'static str,
}

struct Setup<S> {
    reduced: ReducedParams<S>,
    physical: Option<PhysicalParams<S>>,
}

impl<S: Scalar> Setup<S> {
    fn build(raw: &RawParams, parse: impl Fn(&str, &str) -> Result<S, Failure>) -> Result<Self, Failure> {
        let q = parse("q", &raw.q)?;
        match (&raw.v, &raw.mu, &raw.delta) {
            (Some(v), None, None) => {
                let v = parse("v", v)?;
                Ok(Self { reduced: ReducedParams::new(v, q)?, physical: None })
            }
            (None, Some(mu), Some(delta)) => {
                let physical = PhysicalParams::new(parse("mu", mu)?, parse("delta", delta)?, q)?;
                Ok(Self { reduced: physical.to_reduced(), physical: Some(physical) })
            }
            _ => Err(Failure::invalid("give either --v or both --mu and --delta")),
        }
    }

    fn params_json(&self) -> ParamsJson {
        ParamsJson {
            v: self.reduced.v.to_f64(),
            q: self.reduced.q.to_f64(),
            mu: self.physical.as_ref().map(|p| p.mu.to_f64()),
            delta: self.physical.as_ref().map(|p| p.delta.to_f64()),
            arithmetic: if S::EXACT { "rational" } else { "float" },
        }
    }

    /// The requested indices, all valid for this spectrum.
    fn indices(&self, n: &str, from: usize) -> Result<Vec<usize>, Failure> {
        let count = hulthen::bound_state_count(&self.reduced);
        if n == "all" {
            if from >= count {
                return Err(Error::NoSuchState(format!("no states with n >= {from} (count {count})")).into());
            }
            return Ok((from..count).collect());
        }
        let k: usize = n.parse().map_err(|_| Failure::invalid(format!("--n must be a nonnegative integer or `all`, got {n:?}")))?;
        if k < from || k >= count {
            return Err(Error::NoSuchState(format!("need {from} <= n < {count}, got n = {k}")).into());
        }
        Ok(vec![k])
    }
}

fn parse_float(name: &str, text: &str) -> Result<f64, Failure> {
    let value = match parse_rational(text) {
        Some(r) => r.to_f64(),
        None => text.trim().parse::<f64>().map_err(|_| Failure::invalid(format!("--{name}: cannot parse {text:?}")))?,
    };
    if !value.is_finite() {
        return Err(Failure::invalid(format!("--{name} must be finite, got {text:?}")));
    }
    Ok(value)
}

fn max_chain() -> Result<usize, Failure> {
    match std::env::var("HULTHEN_MAX_CHAIN") {
        Err(_) => Ok(DEFAULT_MAX_CHAIN),
        Ok(text) => {
            let cap: usize = text
                .trim()
                .parse()
                .map_err(|_| Failure::invalid(format!("HULTHEN_MAX_CHAIN must be a nonnegative integer, got {text:?}")))?;
            Ok(cap.min(MAX_WRONSKIAN_ORDER - 1))
        }
    }
}

#[derive(Debug, Serialize)]
struct SpectrumRow {
    n: usize,
    energy_reduced: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    energy_physical: Option<f64>,
}

#[derive(Debug, Serialize)]
struct SpectrumJson {
    params: ParamsJson,
    states: Vec<SpectrumRow>,
}

#[derive(Debug, Serialize)]
struct Sample {
    r: f64,
    value: f64,
}

#[derive(Debug, Serialize)]
struct StateJson {
    n: usize,
    energy: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    energy_physical: Option<f64>,
    norm_constant: f64,
    /// Normalized: `norm_constant · ψ_n`.
    exppoly: ExpPolyJson,
    samples: Vec<Sample>,
}

#[derive(Debug, Serialize)]
struct Routes {
    wronskian: ExpPolyJson,
    closed_form: ExpPolyJson,
}

#[derive(Debug, Serialize)]
struct AlternateJson {
    prefactor: f64,
    reading_a: f64,
    reading_b: f64,
}

#[derive(Debug, Serialize)]
struct ChainJson {
    j: usize,
    n: usize,
    energy: f64,
    barrier: f64,
    routes: Routes,
    proportionality: f64,
    norm_product: f64,
    norm_alternate: AlternateJson,
}

struct Run<'a> {
    cli: &'a Cli,
    out: &'a mut dyn std::io::Write,
}

impl Run<'_> {
    fn emit(&mut self, json: &impl Serialize, table: Table) -> Result<(), Failure> {
        let text = match self.cli.format {
            Format::Json => serde_json::to_string_pretty(json).map_err(|e| Failure { code: IO_FAILURE, message: e.to_string() })?,
            Format::Csv => table.render(),
        };
        match writeln!(self.out, "{text}").and_then(|_| self.out.flush()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure { code: IO_FAILURE, message: e.to_string() }),
            _ => Ok(()),
        }
    }

    fn dispatch<S: Scalar>(&mut self, setup: &Setup<S>) -> Outcome {
        match self.cli.command {
            Command::Spectrum => self.spectrum(setup),
            Command::State => self.state(setup),
            Command::Chain if self.cli.j == 0 => self.state(setup),
            Command::Chain => self.chain(setup),
            Command::Verify => self.verify(setup),
        }
    }

    fn spectrum<S: Scalar>(&mut self, setup: &Setup<S>) -> Outcome {
        let count = hulthen::bound_state_count(&setup.reduced);
        let mut rows = Vec::with_capacity(count);
        for n in 0..count {
            let e = hulthen::energy(&setup.reduced, n)?;
            let physical = setup.physical.as_ref().map(|p| p.energy_from_reduced(&e).to_f64());
            rows.push(SpectrumRow { n, energy_reduced: e.to_f64(), energy_physical: physical });
        }
        let mut header = vec!["n", "energy_reduced"];
        if setup.physical.is_some() {
            header.push("energy_physical");
        }
        let mut table = Table::new(&header);
        for row in &rows {
            let mut cells = vec![row.n.to_string(), output::number(row.energy_reduced)];
            if let Some(e) = row.energy_physical {
                cells.push(output::number(e));
            }
            table.push(cells);
        }
        self.emit(&SpectrumJson { params: setup.params_json(), states: rows }, table)?;
        Ok(if count == 0 { EMPTY_RESULT } else { SUCCESS })
    }

    fn state_record<S: Scalar>(&self, setup: &Setup<S>, n: usize) -> Result<StateJson, Failure> {
        let p = &setup.reduced;
        let state = hulthen::bound_state(p, n)?;
        let normalized = state.psi.to_float().scale(&state.norm_constant);
        let decay = (-state.energy.to_f64()).sqrt();
        let start = p.ln_q();
        let end = start + 30.0 / decay;
        let k = self.cli.samples.max(2);
        let samples = (0..k)
            .map(|i| {
                let r = start + (end - start) * i as f64 / (k - 1) as f64;
                Sample { r, value: normalized.eval_unchecked(r) }
            })
            .collect();
        Ok(StateJson {
            n,
            energy: state.energy.to_f64(),
            energy_physical: setup.physical.as_ref().map(|ph| ph.energy_from_reduced(&state.energy).to_f64()),
            norm_constant: state.norm_constant,
            exppoly: normalized.to_json(),
            samples,
        })
    }

    fn state<S: Scalar>(&mut self, setup: &Setup<S>) -> Outcome {
        let records = setup
            .indices(&self.cli.n, 0)?
            .into_iter()
            .map(|n| self.state_record(setup, n))
            .collect::<Result<Vec<_>, _>>()?;
        let mut table = Table::new(&["n", "r", "value"]);
        for rec in &records {
            for s in &rec.samples {
                table.push(vec![rec.n.to_string(), output::number(s.r), output::number(s.value)]);
            }
        }
        match records.as_slice() {
            [single] => self.emit(single, table)?,
            many => self.emit(&many, table)?,
        }
        Ok(SUCCESS)
    }

    fn chain<S: Scalar>(&mut self, setup: &Setup<S>) -> Outcome {
        let p = &setup.reduced;
        let j = self.cli.j;
        let cap = max_chain()?;
        if j > cap {
            return Err(Failure::invalid(format!("chain depth {j} exceeds the cap {cap}")));
        }
        let mut records = Vec::new();
        for n in setup.indices(&self.cli.n, j)? {
            let wronskian = darboux::crum_chain_capped(p, j, n, cap)?;
            let closed = darboux::closed_form_chain_state(p, j, n)?;
            let alt = darboux::alternate_norm(p, j, n)?;
            records.push(ChainJson {
                j,
                n,
                energy: hulthen::energy(p, n)?.to_f64(),
                barrier: darboux::chain_potential(p, j).barrier_coefficient.to_f64(),
                routes: Routes { wronskian: wronskian.psi.to_json(), closed_form: closed.psi.to_json() },
                proportionality: closed.proportionality.map_or(f64::NAN, |c| c.to_f64()),
                norm_product: darboux::chain_norm(p, j, n)?,
                norm_alternate: AlternateJson { prefactor: alt.prefactor, reading_a: alt.reading_a, reading_b: alt.reading_b },
            });
        }
        let mut table = Table::new(&[
            "j",
            "n",
            "energy",
            "barrier",
            "proportionality",
            "norm_product",
            "norm_alternate_prefactor",
            "norm_alternate_a",
            "norm_alternate_b",
        ]);
        for c in &records {
            table.push(vec![
                c.j.to_string(),
                c.n.to_string(),
                output::number(c.energy),
                output::number(c.barrier),
                output::number(c.proportionality),
                output::number(c.norm_product),
                output::number(c.norm_alternate.prefactor),
                output::number(c.norm_alternate.reading_a),
                output::number(c.norm_alternate.reading_b),
            ]);
        }
        match records.as_slice() {
            [single] => self.emit(single, table)?,
            many => self.emit(&many, table)?,
        }
        Ok(SUCCESS)
    }

    fn verify<S: Scalar>(&mut self, setup: &Setup<S>) -> Outcome {
        let perturb = Perturbation { energy: self.cli.perturb_energy, norm: self.cli.perturb_norm };
        let opts = VerifyOptions {
            quad_tol: self.cli.tol,
            max_chain: max_chain()?.min(3),
            perturb,
            ..VerifyOptions::default()
        };
        let mut report = verify::verify(&setup.reduced, &opts)?;
        if let Some(ph) = &setup.physical {
            report.extend(verify::physical_checks(ph, &perturb)?);
        }
        let mut table = Table::new(&["name", "target_ref", "computed", "expected", "tolerance", "passed"]);
        for c in &report.checks {
            table.push(vec![
                c.name.clone(),
                c.target_ref.clone(),
                output::number(c.computed),
                output::number(c.expected),
                output::number(c.tolerance),
                c.passed.to_string(),
            ]);
        }
        self.emit(&report, table)?;
        for c in report.failures() {
            eprintln!("failed: {} (computed {:e}, expected {:e}, tolerance {:e})", c.name, c.computed, c.expected, c.tolerance);
        }
        Ok(if report.passed { SUCCESS } else { VERIFICATION_FAILED })
    }
}

fn run(cli: &Cli, out: &mut dyn std::io::Write) -> Outcome {
    if !(cli.tol > 0.0) {
        return Err(Failure::invalid(format!("--tol must be positive, got {}", cli.tol)));
    }
    let raw = RawParams {
        v: cli.v.clone(),
        mu: cli.mu.clone(),
        delta: cli.delta.clone(),
        q: cli.q.clone().ok_or_else(|| Failure::invalid("--q is required"))?,
    };
    let mut runner = Run { cli, out };
    let exact_inputs = [&raw.v, &raw.mu, &raw.delta]
        .into_iter()
        .flatten()
        .chain(std::iter::once(&raw.q))
        .all(|t| parse_rational(t).is_some());
    let arithmetic = match (cli.rational, exact_inputs) {
        (true, true) => Arithmetic::Rational,
        (true, false) => {
            eprintln!("note: decimal inputs have no exact reading; using float arithmetic");
            Arithmetic::Float
        }
        (false, _) => Arithmetic::Float,
    };
    match arithmetic {
        Arithmetic::Float => {
            let setup = Setup::<f64>::build(&raw, parse_float)?;
            runner.dispatch(&setup)
        }
        Arithmetic::Rational => {
            let exact = |name: &str, text: &str| -> Result<Rational, Failure> {
                parse_rational(text).ok_or_else(|| Failure::invalid(format!("--{name}: cannot parse {text:?}")))
            };
            let setup = Setup::<Rational>::build(&raw, exact)?;
            runner.dispatch(&setup)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(&cli, &mut lock) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
