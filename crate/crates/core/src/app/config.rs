//! TOML run configuration. Every section rejects unknown keys; see
//! `configs/README.md` for the documented format.

use std::path::Path;

use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::AppError;
use crate::bounds::parse_rational;
use crate::lattice::Freq;
use crate::repdata::{LambdaRange, RepresentationData};
use crate::specproj::TrigPoly;
use crate::torus::{AffineLatticeElement, Preset};
use crate::verify::VerifyPlan;

/// Seed used when a config does not set one.
pub const DEFAULT_SEED: u64 = 20240917;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Verify,
    Correlate,
    Bound,
    Reduce,
    Decay,
    Calibrate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Correlate => "correlate",
            Command::Bound => "bound",
            Command::Reduce => "reduce",
            Command::Decay => "decay",
            Command::Calibrate => "calibrate",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Optional; when present it must match the command line.
    pub command: Option<Command>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub model: Option<ModelConfig>,
    pub functions: Option<FunctionsConfig>,
    pub bound: Option<BoundConfig>,
    pub mc: Option<McConfig>,
    pub verify: Option<VerifyPlan>,
    pub reduce: Option<ReduceConfig>,
    pub decay: Option<DecayConfig>,
    pub calibrate: Option<CalibrateConfig>,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub a: [[i64; 2]; 2],
    #[serde(default)]
    pub v: [i64; 2],
    pub k: usize,
    /// Explicit power tuples.
    pub powers: Option<Vec<Vec<i64>>>,
    /// Inclusive range of `n` for tuples `n · multipliers`.
    pub n_range: Option<[i64; 2]>,
    /// Defaults to all ones.
    pub multipliers: Option<Vec<i64>>,
}

impl ModelConfig {
    pub fn element(&self) -> Result<AffineLatticeElement, AppError> {
        AffineLatticeElement::new(self.a, self.v).map_err(|e| AppError::invalid("model.a", e))
    }

    fn multipliers(&self) -> Result<Vec<i64>, AppError> {
        let m = self.multipliers.clone().unwrap_or_else(|| vec![1; self.k]);
        if m.len() != self.k {
            return Err(AppError::invalid("model.multipliers", format!("expected {} entries, found {}", self.k, m.len())));
        }
        Ok(m)
    }

    /// Tuples `n · multipliers` for `n` in an inclusive range.
    pub fn scaled(&self, key: &str, range: [i64; 2]) -> Result<Vec<Vec<i64>>, AppError> {
        if range[0] > range[1] {
            return Err(AppError::invalid(key, format!("empty range {range:?}")));
        }
        let m = self.multipliers()?;
        Ok((range[0]..=range[1]).map(|n| m.iter().map(|x| n * x).collect()).collect())
    }

    /// The configured tuples, sorted.
    pub fn power_tuples(&self) -> Result<Vec<Vec<i64>>, AppError> {
        let mut tuples = match (&self.powers, self.n_range) {
            (Some(p), None) => p.clone(),
            (None, Some(r)) => self.scaled("model.n_range", r)?,
            (Some(_), Some(_)) => {
                return Err(AppError::invalid("model.powers", "set either `powers` or `n_range`, not both"))
            }
            (None, None) => return Err(AppError::MissingKey("model.powers".into())),
        };
        if let Some(bad) = tuples.iter().find(|t| t.len() != self.k) {
            return Err(AppError::invalid("model.powers", format!("tuple {bad:?} has length {}, expected k = {}", bad.len(), self.k)));
        }
        tuples.sort();
        Ok(tuples)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub freq: Vec<i64>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// One function: either a named preset or explicit terms on `T³`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlotSpec {
    pub preset: Option<Preset>,
    pub terms: Option<Vec<TermSpec>>,
}

impl SlotSpec {
    fn build(&self, key: &str) -> Result<TrigPoly, AppError> {
        match (&self.preset, &self.terms) {
            (Some(p), None) => Ok(p.build()),
            (None, Some(t)) => TrigPoly::from_terms(
                3,
                t.iter().map(|t| (Freq::from(t.freq.clone()), Complex64::new(t.re, t.im))),
            )
            .map_err(|e| AppError::invalid(key, e)),
            _ => Err(AppError::invalid(key, "set exactly one of `preset` or `terms`")),
        }
    }
}

/// `preset` fills every slot; `slots` lists `k + 1` functions explicitly.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionsConfig {
    pub preset: Option<Preset>,
    pub slots: Option<Vec<SlotSpec>>,
}

impl FunctionsConfig {
    pub fn build(&self, k: usize) -> Result<Vec<TrigPoly>, AppError> {
        match (&self.preset, &self.slots) {
            (Some(p), None) => Ok(vec![p.build(); k + 1]),
            (None, Some(slots)) => {
                if slots.len() != k + 1 {
                    return Err(AppError::invalid("functions.slots", format!("expected {} slots, found {}", k + 1, slots.len())));
                }
                slots.iter().enumerate().map(|(i, s)| s.build(&format!("functions.slots[{i}]"))).collect()
            }
            _ => Err(AppError::invalid("functions", "set exactly one of `preset` or `slots`")),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundForm {
    /// Cutoff form with weight-sum factors and exponent `q/2`.
    #[default]
    Cutoff,
    /// Balanced form with `‖·‖_∞` and `‖·‖_{±,A}` norms.
    PmNorm,
    /// Balanced form with Sobolev norms.
    Sobolev,
    /// Direct `SL(2)` standard-action formula in the diagonal entries.
    Sl2Standard,
    /// Direct `SL(2)` adjoint-action formula in the diagonal entries.
    Sl2Adjoint,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepChoice {
    #[default]
    StandardSl2,
    AdjointSl2,
    StandardSln,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundConfig {
    #[serde(default)]
    pub form: BoundForm,
    #[serde(default)]
    pub representation: RepChoice,
    /// Rank for `standard_sln`.
    pub n: Option<usize>,
    /// Exponent override as `"1"`, `"1/3"`; the representation formula otherwise.
    pub q: Option<String>,
    /// Exponent `A` of the balanced forms.
    pub a: Option<f64>,
    #[serde(default = "one")]
    pub c: f64,
    #[serde(default = "one")]
    pub c_prime: f64,
    pub s: Option<f64>,
    pub d0: Option<f64>,
    pub dk: Option<f64>,
    #[serde(default)]
    pub sup_norms: Vec<f64>,
    #[serde(default)]
    pub pm_norms: Vec<f64>,
    #[serde(default)]
    pub sobolev_norms: Vec<f64>,
    /// Diagonal entries `a_i` of `diag(a_i, a_i^{-1})`.
    pub a_values: Option<Vec<f64>>,
    /// General diagonal tuple, entries as rationals (`"3/2"`).
    pub tuple: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub lambda_range: LambdaRange,
}

impl Default for BoundConfig {
    fn default() -> Self {
        BoundConfig {
            form: BoundForm::Cutoff,
            representation: RepChoice::StandardSl2,
            n: None,
            q: None,
            a: None,
            c: 1.0,
            c_prime: 1.0,
            s: None,
            d0: None,
            dk: None,
            sup_norms: Vec::new(),
            pm_norms: Vec::new(),
            sobolev_norms: Vec::new(),
            a_values: None,
            tuple: None,
            lambda_range: LambdaRange::FromIdentity,
        }
    }
}

fn one() -> f64 {
    1.0
}

impl BoundConfig {
    pub fn representation(&self) -> Result<RepresentationData, AppError> {
        Ok(match self.representation {
            RepChoice::StandardSl2 => RepresentationData::standard_sl2(),
            RepChoice::AdjointSl2 => RepresentationData::adjoint_sl2(),
            RepChoice::StandardSln => match self.n {
                Some(n) if n >= 2 => RepresentationData::standard_sln(n),
                Some(n) => return Err(AppError::invalid("bound.n", format!("rank {n} < 2"))),
                None => return Err(AppError::MissingKey("bound.n".into())),
            },
        })
    }

    pub fn q_override(&self) -> Result<Option<BigRational>, AppError> {
        self.q.as_deref().map(|q| rational("bound.q", q)).transpose()
    }

    pub fn q(&self) -> Result<BigRational, AppError> {
        self.representation()?
            .q_exponent_with(self.q_override()?.as_ref())
            .map_err(|e| AppError::invalid("bound.q", e))
    }
}

pub fn rational(key: &str, s: &str) -> Result<BigRational, AppError> {
    parse_rational(s).ok_or_else(|| AppError::invalid(key, format!("`{s}` is not a rational number")))
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McConfig {
    /// Samples per correlation; `0` disables the estimate.
    #[serde(default)]
    pub samples: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReduceConfig {
    /// Exact rational entries (`"4"`, `"1/9"`).
    pub entries: Option<Vec<String>>,
    /// Floating-point entries.
    pub real: Option<Vec<f64>>,
    /// Exponents of `q`, with the residue field size.
    pub exponents: Option<Vec<i64>>,
    pub residue: Option<u64>,
    pub j: usize,
    pub l: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayConfig {
    /// When set, `C` is calibrated on `n` in this range and applied to every row.
    pub calibrate_n_range: Option<[i64; 2]>,
    pub convolution_budget: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrateConfig {
    pub train_n_range: [i64; 2],
    pub held_out_n_range: [i64; 2],
    /// Exponents to calibrate for; defaults to the `[bound]` exponent.
    pub q: Option<Vec<String>>,
}

pub fn load_config(path: &Path) -> Result<RunConfig, AppError> {
    let text = std::fs::read_to_string(path).map_err(|e| AppError::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<RunConfig, AppError> {
    toml::from_str(text).map_err(|e| AppError::Parse(e.to_string()))
}
