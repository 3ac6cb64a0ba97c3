use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    cartan_proxy, exact_multicorrelation_with, k_orbit_dimension, mc_multicorrelation, AffineLatticeElement,
    McEstimate, TorusError, DEFAULT_CONVOLUTION_BUDGET,
};
use crate::bounds::{rhs_theorem_3_3, BoundInputs};
use crate::repdata::{divergence_check, ratio_factor, DiagonalElement, LambdaRange, RepresentationData};
use crate::specproj::{AnnulusSpec, TrigPoly};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

pub const CSV_HEADER: [&str; 13] = [
    "k",
    "powers",
    "sigma1_list",
    "q_used",
    "R_factor",
    "rhs_bound",
    "exact_re",
    "exact_im",
    "exact_abs",
    "mc_est_re",
    "mc_est_im",
    "mc_stderr",
    "ratio",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Annulus radius; defaults to the smallest integer covering all supports.
    pub s: Option<f64>,
    pub c: f64,
    pub c_prime: f64,
    /// K-orbit span dimensions; computed from `f₀` and `f_k` when absent.
    pub d0: Option<f64>,
    pub dk: Option<f64>,
    /// Monte Carlo samples per row; `0` disables the cross-check.
    pub mc_samples: u64,
    pub seed: u64,
    pub lambda_range: LambdaRange,
    pub convolution_budget: u128,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            s: None,
            c: 1.0,
            c_prime: 1.0,
            d0: None,
            dk: None,
            mc_samples: 0,
            seed: 0x5eed,
            lambda_range: LambdaRange::FromIdentity,
            convolution_budget: DEFAULT_CONVOLUTION_BUDGET,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionDescriptor {
    pub slot: usize,
    pub support_size: usize,
    pub max_frequency: String,
    pub l2_norm: f64,
    pub orbit_dim: usize,
}

impl FunctionDescriptor {
    pub fn of(slot: usize, f: &TrigPoly) -> Result<Self, TorusError> {
        Ok(FunctionDescriptor {
            slot,
            support_size: f.len(),
            max_frequency: f.support().map(|m| m.max_norm()).max().unwrap_or_default().to_string(),
            l2_norm: f.l2_norm(),
            orbit_dim: k_orbit_dimension(f)?,
        })
    }
}

/// One measured correlation against its bound. The bound is evaluated at the
/// singular-value Cartan proxies `diag(σ₁, σ₁^{-1})` of the acting elements.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub schema_version: u32,
    pub k: usize,
    pub powers: Vec<i64>,
    pub acting_tuple: Vec<AffineLatticeElement>,
    pub functions: Vec<FunctionDescriptor>,
    pub sigma1_list: Vec<f64>,
    pub cartan_proxy: bool,
    pub q_used: String,
    /// Index range of the highest-weight ratio sum.
    pub lambda_range: LambdaRange,
    pub s: f64,
    pub d0: f64,
    pub dk: f64,
    pub r_factor: f64,
    /// Bound with `C = 1`.
    pub unit_bound: f64,
    pub rhs_bound: f64,
    /// Whether the divergence hypothesis held for the proxies.
    pub applicable: bool,
    pub exact_re: f64,
    pub exact_im: f64,
    pub exact_abs: f64,
    pub mc: Option<McEstimate>,
    /// Seed of the Monte Carlo stream for this row.
    pub mc_seed: Option<u64>,
    /// `|exact| / rhs_bound`, present only when applicable.
    pub ratio: Option<f64>,
}

impl CorrelationReport {
    pub fn exact(&self) -> Complex64 {
        Complex64::new(self.exact_re, self.exact_im)
    }

    pub fn bound_sample(&self) -> crate::bounds::BoundSample {
        crate::bounds::BoundSample {
            exact_abs: self.exact_abs,
            unit_bound: self.applicable.then_some(self.unit_bound),
        }
    }

    pub fn csv_record(&self) -> Vec<String> {
        let join = |v: Vec<String>| v.join(";");
        let na = || "NA".to_string();
        let num = |x: f64| x.to_string();
        let (mc_re, mc_im, mc_se) = match &self.mc {
            Some(mc) => (num(mc.estimate.re), num(mc.estimate.im), num(mc.stderr)),
            None => (na(), na(), na()),
        };
        vec![
            self.k.to_string(),
            join(self.powers.iter().map(i64::to_string).collect()),
            join(self.sigma1_list.iter().map(|x| num(*x)).collect()),
            self.q_used.clone(),
            num(self.r_factor),
            if self.applicable { num(self.rhs_bound) } else { na() },
            num(self.exact_re),
            num(self.exact_im),
            num(self.exact_abs),
            mc_re,
            mc_im,
            mc_se,
            self.ratio.map_or_else(na, num),
        ]
    }
}

/// Writes the rows under the fixed header. List cells are `;`-separated and
/// inapplicable cells are `NA`.
pub fn reports_to_csv(reports: &[CorrelationReport]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in reports {
        w.write_record(r.csv_record())?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn rational_sl2(a: f64) -> Result<DiagonalElement, TorusError> {
    let x = BigRational::from_float(a).ok_or_else(|| TorusError::NotAffine(format!("σ₁ = {a}")))?;
    Ok(DiagonalElement::rational(vec![x.clone(), x.recip()])?)
}

fn check_powers(p: &[i64]) -> Result<(), TorusError> {
    if p.iter().any(|&x| x < 0) || p.windows(2).any(|w| w[0] > w[1]) {
        return Err(TorusError::InvalidPowers(p.to_vec()));
    }
    Ok(())
}

/// For each power tuple `(n₁..n_k)` acts by `g_i = M^{n_i}`, computes the
/// exact correlation, an optional Monte Carlo estimate, and the cutoff bound
/// at the Cartan proxies with exponent `q`.
pub fn decay_sweep(
    fs: &[TrigPoly],
    base: &AffineLatticeElement,
    powers: &[Vec<i64>],
    rep: &RepresentationData,
    q: &BigRational,
    cfg: &SweepConfig,
) -> Result<Vec<CorrelationReport>, TorusError> {
    if !base.is_hyperbolic() {
        log::warn!("{base} is not hyperbolic; no decay is expected");
    }
    let k = fs.len().saturating_sub(1);
    super::check_zero_mean(fs)?;
    let functions = fs
        .iter()
        .enumerate()
        .map(|(i, f)| FunctionDescriptor::of(i, f))
        .collect::<Result<Vec<_>, _>>()?;
    let d0 = cfg.d0.unwrap_or(functions[0].orbit_dim.max(1) as f64);
    let dk = cfg.dk.unwrap_or(functions[k].orbit_dim.max(1) as f64);
    let s = match cfg.s {
        Some(s) => s,
        None => fs
            .iter()
            .map(|f| AnnulusSpec::covering(f).s().to_f64().unwrap_or(f64::INFINITY))
            .fold(2.0, f64::max),
    };
    let inputs = BoundInputs { s, d0, dk, c: 1.0, c_prime: cfg.c_prime, ..BoundInputs::default() }.with_q(q);
    let q_used = if q.is_integer() { q.to_integer().to_string() } else { q.to_string() };
    powers
        .par_iter()
        .enumerate()
        .map(|(row, p)| {
            if p.len() != k {
                return Err(TorusError::Arity { expected: p.len() + 1, elements: p.len(), found: fs.len() });
            }
            check_powers(p)?;
            let gs: Vec<AffineLatticeElement> = p.iter().map(|&n| base.pow(n)).collect();
            let sigma1_list: Vec<f64> = gs.iter().map(|g| cartan_proxy(g).sigma1).collect();
            let tuple = sigma1_list.iter().map(|&a| rational_sl2(a)).collect::<Result<Vec<_>, _>>()?;
            let factors = ratio_factor(rep, &tuple, cfg.lambda_range)?;
            let applicable = divergence_check(rep, &tuple, cfg.c_prime)?.holds;
            let unit_bound = rhs_theorem_3_3(&inputs, &factors)?;
            let rhs_bound = cfg.c * unit_bound;
            let exact = exact_multicorrelation_with(fs, &gs, cfg.convolution_budget)?;
            let mc_seed = (cfg.mc_samples > 0).then(|| cfg.seed ^ (row as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let mc = match mc_seed {
                Some(seed) => Some(mc_multicorrelation(fs, &gs, cfg.mc_samples, seed)?),
                None => None,
            };
            let exact_abs = exact.norm();
            Ok(CorrelationReport {
                schema_version: REPORT_SCHEMA_VERSION,
                k,
                powers: p.clone(),
                acting_tuple: gs,
                functions: functions.clone(),
                sigma1_list,
                cartan_proxy: true,
                q_used: q_used.clone(),
                lambda_range: cfg.lambda_range,
                s,
                d0,
                dk,
                r_factor: factors.product,
                unit_bound,
                rhs_bound,
                applicable,
                exact_re: exact.re,
                exact_im: exact.im,
                exact_abs,
                mc,
                mc_seed,
                ratio: applicable.then(|| exact_abs / rhs_bound),
            })
        })
        .collect()
}
