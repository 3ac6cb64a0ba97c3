//! Batch front end behind the `mixinglab` binary: loads a TOML
//! [`RunConfig`], runs one command and renders its artifact. Rendering is
//! deterministic, so identical configs give byte-identical output.

mod config;

use std::path::Path;

use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

pub use config::{
    load_config, parse_config, BoundConfig, BoundForm, CalibrateConfig, Command, DecayConfig, FunctionsConfig,
    McConfig, ModelConfig, ReduceConfig, RepChoice, RunConfig, SlotSpec, TermSpec, DEFAULT_SEED,
};

use crate::bounds::{
    calibrate_constant, corollary_sl2, evaluate_theorem_3_3, rhs_theorem_4_1, rhs_theorem_4_2, BoundError,
    BoundInputs, Calibration, Sl2Variant,
};
use crate::repdata::{divergence_check, ratio_factor, DiagonalElement, LambdaRange, RatioFactor, RepError};
use crate::slnreduce::{split_diagonal, DiagonalSplit, ReduceError};
use crate::specproj::TrigPoly;
use crate::torus::{decay_sweep, reports_to_csv, CorrelationReport, SweepConfig, TorusError, REPORT_SCHEMA_VERSION};
use crate::verify::{run_all, SuiteReport, VerifyPlan};

#[derive(Debug, Error)]
pub enum AppError {
    #[error("{0}")]
    Io(String),
    #[error("config: {0}")]
    Parse(String),
    #[error("config: missing key `{0}`")]
    MissingKey(String),
    #[error("config: invalid `{key}`: {reason}")]
    Invalid { key: String, reason: String },
    #[error("config: `command = \"{config}\"` does not match the command line `{cli}`")]
    CommandMismatch { config: String, cli: String },
    #[error(transparent)]
    Torus(#[from] TorusError),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Reduce(#[from] ReduceError),
    #[error("csv: {0}")]
    Csv(String),
}

impl AppError {
    pub fn invalid(key: &str, reason: impl ToString) -> Self {
        AppError::Invalid { key: key.into(), reason: reason.to_string() }
    }

    /// `2` for configuration problems, `1` otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Parse(_) | AppError::MissingKey(_) | AppError::Invalid { .. } | AppError::CommandMismatch { .. } => 2,
            _ => 1,
        }
    }
}

/// What a command produced.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    /// Written to `--out`, or to stdout when no path is given.
    pub artifact: String,
    /// Always printed to stdout; replaces the artifact there when set.
    pub stdout_line: Option<String>,
    /// Diagnostic for stderr when the run did not pass.
    pub failure: Option<String>,
}

impl Outcome {
    fn artifact(artifact: String) -> Self {
        Outcome { artifact, stdout_line: None, failure: None }
    }

    pub fn success(&self) -> bool {
        self.failure.is_none()
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn require<'a, T>(section: &'a Option<T>, key: &str) -> Result<&'a T, AppError> {
    section.as_ref().ok_or_else(|| AppError::MissingKey(key.into()))
}

/// Loads `config_path`, runs `command`, and writes the artifact to `out`
/// when given.
pub fn execute(command: Command, config_path: &Path, out: Option<&Path>) -> Result<Outcome, AppError> {
    let cfg = load_config(config_path)?;
    let outcome = run(command, &cfg)?;
    if let Some(path) = out {
        std::fs::write(path, &outcome.artifact).map_err(|e| AppError::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(outcome)
}

pub fn run(command: Command, cfg: &RunConfig) -> Result<Outcome, AppError> {
    if let Some(c) = cfg.command {
        if c != command {
            return Err(AppError::CommandMismatch { config: c.name().into(), cli: command.name().into() });
        }
    }
    match command {
        Command::Verify => verify(cfg),
        Command::Correlate => correlate(cfg),
        Command::Bound => bound(cfg),
        Command::Reduce => reduce(cfg),
        Command::Decay => decay(cfg),
        Command::Calibrate => calibrate(cfg),
    }
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    schema_version: u32,
    seed: u64,
    plan: &'a VerifyPlan,
    passed: bool,
    suites: Vec<SuiteReport>,
}

fn verify(cfg: &RunConfig) -> Result<Outcome, AppError> {
    let plan = cfg.verify.clone().unwrap_or_default();
    let suites = run_all(&plan, cfg.seed);
    let passed = suites.iter().all(SuiteReport::passed);
    let failure = (!passed).then(|| {
        suites
            .iter()
            .flat_map(|s| s.failures.iter().map(move |f| format!("{} case {} [{}]: {}", s.suite, f.case, f.check, f.witness)))
            .collect::<Vec<_>>()
            .join("\n")
    });
    let report = VerifyReport { schema_version: REPORT_SCHEMA_VERSION, seed: cfg.seed, plan: &plan, passed, suites };
    Ok(Outcome { artifact: json(&report), stdout_line: None, failure })
}

struct SweepSetup {
    fs: Vec<TrigPoly>,
    model: ModelConfig,
    bound: BoundConfig,
    sweep: SweepConfig,
}

fn sweep_setup(cfg: &RunConfig) -> Result<SweepSetup, AppError> {
    let model = require(&cfg.model, "model")?.clone();
    let fs = require(&cfg.functions, "functions")?.build(model.k)?;
    let bound = cfg.bound.clone().unwrap_or_default();
    let mut sweep = SweepConfig {
        s: bound.s,
        c: bound.c,
        c_prime: bound.c_prime,
        d0: bound.d0,
        dk: bound.dk,
        mc_samples: cfg.mc.as_ref().map_or(0, |m| m.samples),
        seed: cfg.seed,
        lambda_range: bound.lambda_range,
        ..SweepConfig::default()
    };
    if let Some(b) = cfg.decay.as_ref().and_then(|d| d.convolution_budget) {
        sweep.convolution_budget = b as u128;
    }
    Ok(SweepSetup { fs, model, bound, sweep })
}

impl SweepSetup {
    fn run(&self, powers: &[Vec<i64>], q: &BigRational, sweep: &SweepConfig) -> Result<Vec<CorrelationReport>, AppError> {
        let base = self.model.element()?;
        let rep = self.bound.representation()?;
        Ok(decay_sweep(&self.fs, &base, powers, &rep, q, sweep)?)
    }

    fn calibrate(&self, q: &BigRational, train: &[Vec<i64>], held_out: &[Vec<i64>]) -> Result<(Calibration, Vec<CorrelationReport>), AppError> {
        let unit = SweepConfig { c: 1.0, mc_samples: 0, ..self.sweep.clone() };
        let train_rows = self.run(train, q, &unit)?;
        let held_rows = self.run(held_out, q, &unit)?;
        let samples = |rows: &[CorrelationReport]| rows.iter().map(CorrelationReport::bound_sample).collect::<Vec<_>>();
        Ok((calibrate_constant(&samples(&train_rows), &samples(&held_rows))?, held_rows))
    }
}

fn correlate(cfg: &RunConfig) -> Result<Outcome, AppError> {
    let setup = sweep_setup(cfg)?;
    let powers = setup.model.power_tuples()?;
    if powers.len() != 1 {
        return Err(AppError::invalid("model.powers", format!("correlate takes one power tuple, found {}", powers.len())));
    }
    let q = setup.bound.q()?;
    let mut rows = setup.run(&powers, &q, &setup.sweep)?;
    Ok(Outcome::artifact(json(&rows.remove(0))))
}

fn decay(cfg: &RunConfig) -> Result<Outcome, AppError> {
    let mut setup = sweep_setup(cfg)?;
    let powers = setup.model.power_tuples()?;
    let q = setup.bound.q()?;
    if let Some(range) = cfg.decay.as_ref().and_then(|d| d.calibrate_n_range) {
        let train = setup.model.scaled("decay.calibrate_n_range", range)?;
        let (cal, _) = setup.calibrate(&q, &train, &[])?;
        log::info!("calibrated C = {} on {} rows", cal.c_cal, cal.train_count);
        setup.sweep.c = cal.c_cal;
    }
    let rows = setup.run(&powers, &q, &setup.sweep)?;
    let csv = reports_to_csv(&rows).map_err(|e| AppError::Csv(e.to_string()))?;
    Ok(Outcome::artifact(csv))
}

#[derive(Serialize)]
struct CalibrationResult {
    q_used: String,
    c_cal: f64,
    train_count: usize,
    held_out_count: usize,
    violations: Vec<Vec<i64>>,
    valid: bool,
}

#[derive(Serialize)]
struct CalibrationReport<'a> {
    schema_version: u32,
    seed: u64,
    model: &'a ModelConfig,
    functions: &'a FunctionsConfig,
    train_powers: Vec<Vec<i64>>,
    held_out_powers: Vec<Vec<i64>>,
    results: Vec<CalibrationResult>,
    valid: bool,
}

fn calibrate(cfg: &RunConfig) -> Result<Outcome, AppError> {
    let setup = sweep_setup(cfg)?;
    let section = require(&cfg.calibrate, "calibrate")?;
    let train = setup.model.scaled("calibrate.train_n_range", section.train_n_range)?;
    let held_out = setup.model.scaled("calibrate.held_out_n_range", section.held_out_n_range)?;
    let qs: Vec<BigRational> = match &section.q {
        Some(list) => list.iter().map(|q| config::rational("calibrate.q", q)).collect::<Result<_, _>>()?,
        None => vec![setup.bound.q()?],
    };
    let mut results = Vec::new();
    for q in &qs {
        let (cal, rows) = setup.calibrate(q, &train, &held_out)?;
        results.push(CalibrationResult {
            q_used: rows.first().map_or_else(|| q.to_string(), |r| r.q_used.clone()),
            c_cal: cal.c_cal,
            train_count: cal.train_count,
            held_out_count: cal.held_out_count,
            violations: cal.violations.iter().map(|&i| rows[i].powers.clone()).collect(),
            valid: cal.valid(),
        });
    }
    let valid = results.iter().all(|r| r.valid);
    let report = CalibrationReport {
        schema_version: REPORT_SCHEMA_VERSION,
        seed: cfg.seed,
        model: &setup.model,
        functions: require(&cfg.functions, "functions")?,
        train_powers: train,
        held_out_powers: held_out,
        results,
        valid,
    };
    Ok(Outcome::artifact(json(&report)))
}

#[derive(Serialize)]
struct BoundReport {
    schema_version: u32,
    form: BoundForm,
    representation: RepChoice,
    q_used: String,
    lambda_range: LambdaRange,
    inputs: BoundInputs,
    tuple: Vec<DiagonalElement>,
    value: f64,
    applicable: bool,
    factors: RatioFactor,
}

fn bound_tuple(b: &BoundConfig) -> Result<Vec<DiagonalElement>, AppError> {
    match (&b.tuple, &b.a_values) {
        (Some(t), None) => t
            .iter()
            .enumerate()
            .map(|(i, entries)| {
                let key = format!("bound.tuple[{i}]");
                let v = entries.iter().map(|e| config::rational(&key, e)).collect::<Result<Vec<_>, _>>()?;
                DiagonalElement::rational(v).map_err(|e| AppError::invalid(&key, e))
            })
            .collect(),
        (None, Some(a)) => {
            if b.representation == RepChoice::StandardSln {
                return Err(AppError::invalid("bound.a_values", "use `tuple` for standard_sln"));
            }
            a.iter()
                .map(|&x| {
                    let r = BigRational::from_float(x).filter(|r| *r > BigRational::from_integer(0.into()));
                    let r = r.ok_or_else(|| AppError::invalid("bound.a_values", format!("{x} is not a positive number")))?;
                    DiagonalElement::rational(vec![r.clone(), r.recip()]).map_err(|e| AppError::invalid("bound.a_values", e))
                })
                .collect()
        }
        (Some(_), Some(_)) => Err(AppError::invalid("bound.tuple", "set either `tuple` or `a_values`, not both")),
        (None, None) => Err(AppError::MissingKey("bound.a_values".into())),
    }
}

fn bound(cfg: &RunConfig) -> Result<Outcome, AppError> {
    let b = require(&cfg.bound, "bound")?;
    let rep = b.representation()?;
    let tuple = bound_tuple(b)?;
    let sl2 = matches!(b.form, BoundForm::Sl2Standard | BoundForm::Sl2Adjoint);
    let q = if sl2 { BigRational::from_integer(1.into()) } else { b.q()? };
    let inputs = BoundInputs {
        s: b.s.unwrap_or(1.0),
        d0: b.d0.unwrap_or(1.0),
        dk: b.dk.unwrap_or(1.0),
        c: b.c,
        c_prime: b.c_prime,
        a: b.a,
        sup_norms: b.sup_norms.clone(),
        pm_norms: b.pm_norms.clone(),
        sobolev_norms: b.sobolev_norms.clone(),
        ..BoundInputs::default()
    }
    .with_q(&q);
    let (value, applicable, factors) = match b.form {
        BoundForm::Cutoff => {
            let e = evaluate_theorem_3_3(&inputs, &rep, &tuple, b.lambda_range)?;
            (e.value, e.applicable, e.factors)
        }
        BoundForm::PmNorm | BoundForm::Sobolev => {
            let factors = ratio_factor(&rep, &tuple, b.lambda_range)?;
            let applicable = divergence_check(&rep, &tuple, b.c_prime)?.holds;
            let value = if b.form == BoundForm::PmNorm {
                rhs_theorem_4_1(&inputs, &factors)?
            } else {
                rhs_theorem_4_2(&inputs, &factors)?
            };
            (value, applicable, factors)
        }
        BoundForm::Sl2Standard | BoundForm::Sl2Adjoint => {
            let variant = if b.form == BoundForm::Sl2Standard { Sl2Variant::Standard } else { Sl2Variant::Adjoint };
            let a = b.a_values.as_ref().ok_or_else(|| AppError::MissingKey("bound.a_values".into()))?;
            let e = corollary_sl2(variant, a, &inputs)?;
            (e.value, e.applicable, e.factors)
        }
    };
    let report = BoundReport {
        schema_version: REPORT_SCHEMA_VERSION,
        form: b.form,
        representation: b.representation,
        q_used: if q.is_integer() { q.to_integer().to_string() } else { q.to_string() },
        lambda_range: b.lambda_range,
        inputs,
        tuple,
        value,
        applicable,
        factors,
    };
    let line = if applicable { value.to_string() } else { format!("{value} (not applicable: divergence hypothesis fails)") };
    Ok(Outcome { artifact: json(&report), stdout_line: Some(line), failure: None })
}

fn reduce(cfg: &RunConfig) -> Result<Outcome, AppError> {
    let r = require(&cfg.reduce, "reduce")?;
    let a = match (&r.entries, &r.real, &r.exponents) {
        (Some(e), None, None) => {
            let v = e.iter().map(|x| config::rational("reduce.entries", x)).collect::<Result<Vec<_>, _>>()?;
            DiagonalElement::rational(v).map_err(|e| AppError::invalid("reduce.entries", e))?
        }
        (None, Some(v), None) => DiagonalElement::real(v.clone()).map_err(|e| AppError::invalid("reduce.real", e))?,
        (None, None, Some(x)) => {
            let residue = r.residue.ok_or_else(|| AppError::MissingKey("reduce.residue".into()))?;
            DiagonalElement::q_power(x.clone(), residue).map_err(|e| AppError::invalid("reduce.exponents", e))?
        }
        _ => return Err(AppError::invalid("reduce", "set exactly one of `entries`, `real` or `exponents`")),
    };
    let split: DiagonalSplit = split_diagonal(&a, r.j, r.l)?;
    Ok(Outcome::artifact(json(&split)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_named() {
        let err = parse_config("seed = 1\n[model]\na = [[2,1],[1,1]]\nk = 1\nbogus = 3\n").unwrap_err();
        assert!(err.to_string().contains("bogus"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn missing_sections_are_named() {
        let cfg = parse_config("seed = 1\n").unwrap();
        let err = run(Command::Decay, &cfg).unwrap_err();
        assert_eq!(err.to_string(), "config: missing key `model`");
        let err = run(Command::Reduce, &cfg).unwrap_err();
        assert_eq!(err.to_string(), "config: missing key `reduce`");
    }

    #[test]
    fn default_seed_applies() {
        assert_eq!(parse_config("").unwrap().seed, DEFAULT_SEED);
    }

    #[test]
    fn command_mismatch() {
        let cfg = parse_config("command = \"bound\"\n").unwrap();
        assert!(matches!(run(Command::Decay, &cfg), Err(AppError::CommandMismatch { .. })));
    }

    #[test]
    fn bound_prints_value() {
        let cfg = parse_config("[bound]\nform = \"sl2_standard\"\na_values = [2.0, 8.0]\n").unwrap();
        let out = run(Command::Bound, &cfg).unwrap();
        assert_eq!(out.stdout_line.as_deref(), Some("0.09128709291752768"));
        let cfg = parse_config("[bound]\na_values = [2.0, 8.0]\n").unwrap();
        assert_eq!(run(Command::Bound, &cfg).unwrap().stdout_line, out.stdout_line);
    }

    #[test]
    fn reduce_exact() {
        let cfg = parse_config("[reduce]\nentries = [\"4\", \"1\", \"1/4\"]\nj = 0\nl = 2\n").unwrap();
        let out = run(Command::Reduce, &cfg).unwrap();
        let split: DiagonalSplit = serde_json::from_str(&out.artifact).unwrap();
        assert_eq!(split.a_prime, DiagonalElement::ratios(&[(1, 1), (1, 1), (1, 1)]).unwrap());
    }
}
