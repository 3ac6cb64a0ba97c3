//! Right-hand sides of the multiple-mixing bounds, the exponent balancing
//! used to remove the spectral cutoff, and empirical calibration of the
//! unspecified constant `C`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::repdata::{
    divergence_check, ratio_factor, DiagonalElement, LambdaRange, RatioFactor, RepError,
    RepresentationData,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    #[error("weight-sum factor must be positive, got {0}")]
    NonPositiveFactor(f64),
    #[error("exponent A must be positive, got {0}")]
    NonPositiveA(f64),
    #[error("q = {0} is outside (0, 1]")]
    InvalidQ(f64),
    #[error("invalid input `{field}`: {reason}")]
    InvalidInput { field: &'static str, reason: String },
    #[error("missing norms: expected {expected} values for `{field}`, found {found}")]
    MissingNorms { field: &'static str, expected: usize, found: usize },
    #[error("a-values must satisfy 1 < a_1 < ... < a_k; violated at position {0}")]
    Unordered(usize),
    #[error("no applicable reports to calibrate on")]
    EmptyCalibration,
    #[error(transparent)]
    Rep(#[from] RepError),
}

/// Parameters shared by the bound evaluators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    /// Spectral radius of the truncation; `s = 1` is accepted as a limit.
    pub s: f64,
    pub q: f64,
    pub d0: f64,
    pub dk: f64,
    pub c: f64,
    pub c_prime: f64,
    /// Exponent `A` of the `±` norms.
    pub a: Option<f64>,
    /// `‖f_i‖_∞`, one per function.
    #[serde(default)]
    pub sup_norms: Vec<f64>,
    /// `‖f_i‖_{±,A}`, one per function.
    #[serde(default)]
    pub pm_norms: Vec<f64>,
    /// `‖f_i‖_{∞,A,m}`, one per function.
    #[serde(default)]
    pub sobolev_norms: Vec<f64>,
}

impl Default for BoundInputs {
    fn default() -> Self {
        BoundInputs {
            s: 1.0,
            q: 1.0,
            d0: 1.0,
            dk: 1.0,
            c: 1.0,
            c_prime: 1.0,
            a: None,
            sup_norms: Vec::new(),
            pm_norms: Vec::new(),
            sobolev_norms: Vec::new(),
        }
    }
}

impl BoundInputs {
    pub fn with_q(mut self, q: &BigRational) -> Self {
        self.q = q.to_f64().unwrap_or(f64::NAN);
        self
    }

    pub fn validate(&self) -> Result<(), BoundError> {
        if !(self.s >= 1.0 && self.s.is_finite()) {
            return Err(BoundError::InvalidInput { field: "s", reason: format!("{} < 1", self.s) });
        }
        check_q(self.q)?;
        for (field, v) in [("d0", self.d0), ("dk", self.dk)] {
            if !(v >= 1.0) {
                return Err(BoundError::InvalidInput { field, reason: format!("{v} < 1") });
            }
        }
        if !(self.c >= 0.0) {
            return Err(BoundError::InvalidInput { field: "c", reason: format!("{} < 0", self.c) });
        }
        let norms = self.sup_norms.iter().chain(&self.pm_norms).chain(&self.sobolev_norms);
        if let Some(bad) = norms.into_iter().find(|v| !(**v >= 0.0)) {
            return Err(BoundError::InvalidInput { field: "norms", reason: format!("negative norm {bad}") });
        }
        Ok(())
    }
}

fn check_q(q: f64) -> Result<(), BoundError> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(BoundError::InvalidQ(q));
    }
    Ok(())
}

fn check_a(a: f64) -> Result<(), BoundError> {
    if !(a > 0.0) {
        return Err(BoundError::NonPositiveA(a));
    }
    Ok(())
}

fn check_factor(v: f64) -> Result<(), BoundError> {
    if !(v > 0.0) {
        return Err(BoundError::NonPositiveFactor(v));
    }
    Ok(())
}

// C s^{2q} (d0 dk)^{1/2} L^{-q/2} R^{-q/2}
fn cutoff_form(inputs: &BoundInputs, q: f64, lambda_sum: f64, varrho_sum: f64) -> f64 {
    inputs.c
        * inputs.s.powf(2.0 * q)
        * inputs.d0.sqrt()
        * inputs.dk.sqrt()
        * lambda_sum.powf(-q / 2.0)
        * varrho_sum.powf(-q / 2.0)
}

/// `C s^{2q} d₀^{1/2} d_k^{1/2} |Σ λ(a^k/a^i)|^{-q/2} |Σ ϱ(a^i)^{-1}|^{-q/2}`.
pub fn rhs_theorem_3_3(inputs: &BoundInputs, factors: &RatioFactor) -> Result<f64, BoundError> {
    inputs.validate()?;
    check_factor(factors.lambda_sum)?;
    check_factor(factors.varrho_sum)?;
    Ok(cutoff_form(inputs, inputs.q, factors.lambda_sum, factors.varrho_sum))
}

/// The exponent `Aq / (2(A + 2q))` of `R(a)` once the cutoff is balanced.
pub fn theorem_4_1_exponent(a: f64, q: f64) -> Result<f64, BoundError> {
    check_a(a)?;
    check_q(q)?;
    Ok(a * q / (2.0 * (a + 2.0 * q)))
}

/// The `ε` in `s = R^ε` that balances `s^{-A}` against `s^{2q} R^{-q/2}`.
pub fn optimal_epsilon(a: f64, q: f64) -> Result<f64, BoundError> {
    check_a(a)?;
    check_q(q)?;
    Ok(q / (2.0 * (a + 2.0 * q)))
}

/// `max(s^{-A}, s^{2q} R^{-q/2})` at `s = R^ε`; the quantity `ε` balances.
pub fn balanced_envelope(a: f64, q: f64, ratio: f64, epsilon: f64) -> f64 {
    let s = ratio.powf(epsilon);
    s.powf(-a).max(s.powf(2.0 * q) * ratio.powf(-q / 2.0))
}

fn norm_product<F: Fn(usize) -> f64>(len: usize, term: F) -> f64 {
    (0..len).map(term).product()
}

/// `d₀^{1/2} d_k^{1/2} Π(‖f_i‖_∞ ‖f_i‖_{±,A}) R^{-Aq/(2(A+2q))}`.
pub fn rhs_theorem_4_1(inputs: &BoundInputs, factors: &RatioFactor) -> Result<f64, BoundError> {
    inputs.validate()?;
    let a = inputs.a.ok_or(BoundError::InvalidInput { field: "a", reason: "missing".into() })?;
    let exponent = theorem_4_1_exponent(a, inputs.q)?;
    check_factor(factors.product)?;
    let n = inputs.sup_norms.len();
    if n == 0 || inputs.pm_norms.len() != n {
        return Err(BoundError::MissingNorms { field: "pm_norms", expected: n.max(1), found: inputs.pm_norms.len() });
    }
    let norms = norm_product(n, |i| inputs.sup_norms[i] * inputs.pm_norms[i]);
    Ok(inputs.d0.sqrt() * inputs.dk.sqrt() * norms * factors.product.powf(-exponent))
}

/// `Π ‖f_i‖²_{∞,A,m} R^{-Aq/(2(A+2q))}` with user-supplied Sobolev norms.
pub fn rhs_theorem_4_2(inputs: &BoundInputs, factors: &RatioFactor) -> Result<f64, BoundError> {
    inputs.validate()?;
    let a = inputs.a.ok_or(BoundError::InvalidInput { field: "a", reason: "missing".into() })?;
    let exponent = theorem_4_1_exponent(a, inputs.q)?;
    check_factor(factors.product)?;
    if inputs.sobolev_norms.is_empty() {
        return Err(BoundError::MissingNorms { field: "sobolev_norms", expected: 1, found: 0 });
    }
    let norms = norm_product(inputs.sobolev_norms.len(), |i| inputs.sobolev_norms[i].powi(2));
    Ok(norms * factors.product.powf(-exponent))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sl2Variant {
    Standard,
    Adjoint,
}

/// A bound value together with whether the divergence hypothesis held.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundEvaluation {
    pub value: f64,
    pub applicable: bool,
    pub factors: RatioFactor,
}

/// The `SL(2) ⋉ V` bound written directly in the diagonal entries
/// `1 = a_0 < a_1 < ... < a_k`: the standard action sums `a_k/a_i` and `a_i`,
/// the adjoint action their squares, always with exponent `-1/2`. The sums
/// are formed exactly in rationals.
pub fn corollary_sl2(
    variant: Sl2Variant,
    a_values: &[f64],
    inputs: &BoundInputs,
) -> Result<BoundEvaluation, BoundError> {
    let exact: Vec<BigRational> = a_values
        .iter()
        .map(|&a| {
            BigRational::from_float(a)
                .ok_or(BoundError::InvalidInput { field: "a_values", reason: format!("{a}") })
        })
        .collect::<Result<_, _>>()?;
    let mut prev = BigRational::one();
    for (i, a) in exact.iter().enumerate() {
        if *a <= prev {
            return Err(BoundError::Unordered(i + 1));
        }
        prev = a.clone();
    }
    let k = exact.len();
    if k == 0 {
        return Err(BoundError::Rep(RepError::EmptyTuple));
    }
    let power = match variant {
        Sl2Variant::Standard => 1,
        Sl2Variant::Adjoint => 2,
    };
    let a_k = &exact[k - 1];
    let lambda: BigRational = std::iter::once(BigRational::one())
        .chain(exact[..k - 1].iter().cloned())
        .map(|a_i| (a_k / a_i).pow(power))
        .fold(BigRational::zero(), |acc, x| acc + x);
    let varrho: BigRational = exact.iter().map(|a| a.pow(power)).fold(BigRational::zero(), |acc, x| acc + x);
    let factors = RatioFactor {
        lambda_sum: lambda.to_f64().unwrap_or(f64::NAN),
        varrho_sum: varrho.to_f64().unwrap_or(f64::NAN),
        product: (&lambda * &varrho).to_f64().unwrap_or(f64::NAN),
    };
    let min_ratio = std::iter::once(BigRational::one())
        .chain(exact.iter().cloned())
        .collect::<Vec<_>>()
        .windows(2)
        .map(|w| &w[1] / &w[0])
        .min()
        .unwrap_or_else(BigRational::zero);
    let threshold = BigRational::from_float(inputs.c_prime).unwrap_or_else(BigRational::zero);
    let mut unit_q = inputs.clone();
    unit_q.q = 1.0;
    unit_q.validate()?;
    Ok(BoundEvaluation {
        value: cutoff_form(&unit_q, 1.0, factors.lambda_sum, factors.varrho_sum),
        applicable: min_ratio > threshold,
        factors,
    })
}

/// Evaluates the cutoff bound on an ordered acting tuple, flagging it as not
/// applicable when the divergence hypothesis fails.
pub fn evaluate_theorem_3_3(
    inputs: &BoundInputs,
    rep: &RepresentationData,
    tuple: &[DiagonalElement],
    range: LambdaRange,
) -> Result<BoundEvaluation, BoundError> {
    let factors = ratio_factor(rep, tuple, range)?;
    let divergence = divergence_check(rep, tuple, inputs.c_prime)?;
    Ok(BoundEvaluation {
        value: rhs_theorem_3_3(inputs, &factors)?,
        applicable: divergence.holds,
        factors,
    })
}

/// One measured correlation and its bound evaluated with `C = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundSample {
    pub exact_abs: f64,
    /// `None` when the bound was not applicable.
    pub unit_bound: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub c_cal: f64,
    pub train_count: usize,
    pub held_out_count: usize,
    /// Indices into the held-out set with `|exact| > C_cal · bound`.
    pub violations: Vec<usize>,
}

impl Calibration {
    pub fn valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `C_cal = max |exact| / bound(C=1)` over the applicable training samples,
/// then counts held-out samples exceeding `C_cal · bound(C=1)`.
pub fn calibrate_constant(train: &[BoundSample], held_out: &[BoundSample]) -> Result<Calibration, BoundError> {
    let applicable: Vec<(f64, f64)> = train
        .iter()
        .filter_map(|s| s.unit_bound.map(|b| (s.exact_abs, b)))
        .collect();
    if applicable.is_empty() {
        return Err(BoundError::EmptyCalibration);
    }
    for &(_, b) in &applicable {
        check_factor(b)?;
    }
    let c_cal = applicable.iter().map(|(e, b)| e / b).fold(0.0, f64::max);
    let mut held_out_count = 0;
    let violations = held_out
        .iter()
        .enumerate()
        .filter_map(|(i, s)| s.unit_bound.map(|b| (i, s.exact_abs, b)))
        .inspect(|_| held_out_count += 1)
        .filter(|&(_, e, b)| e > c_cal * b)
        .map(|(i, _, _)| i)
        .collect();
    Ok(Calibration { c_cal, train_count: applicable.len(), held_out_count, violations })
}

/// Parses `"1/3"`, `"1"` or a decimal into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Ok(n) = s.parse::<BigInt>() {
        return Some(BigRational::from_integer(n));
    }
    let v: f64 = s.parse().ok()?;
    let q = BigRational::from_float(v)?;
    (!q.is_negative() || v < 0.0).then_some(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> BoundInputs {
        BoundInputs::default()
    }

    #[test]
    fn cutoff_form_examples() {
        let f = RatioFactor { lambda_sum: 12.0, varrho_sum: 10.0, product: 120.0 };
        let v = rhs_theorem_3_3(&unit(), &f).unwrap();
        assert!((v - 120f64.powf(-0.5)).abs() < 1e-15);
        assert!((v - 0.09129).abs() < 1e-5);

        let doubled = BoundInputs { d0: 2.0, ..unit() };
        let v2 = rhs_theorem_3_3(&doubled, &f).unwrap();
        assert!((v2 / v - 2f64.sqrt()).abs() < 1e-14);

        let zero = RatioFactor { lambda_sum: 0.0, varrho_sum: 10.0, product: 0.0 };
        assert_eq!(rhs_theorem_3_3(&unit(), &zero), Err(BoundError::NonPositiveFactor(0.0)));
    }

    #[test]
    fn two_mixing_rate() {
        // k = 1, a = diag(a, 1/a): R = a^2 so the bound is a^{-1}
        for a in [2.0, 7.5, 1e3] {
            let f = RatioFactor { lambda_sum: a, varrho_sum: a, product: a * a };
            let v = rhs_theorem_3_3(&unit(), &f).unwrap();
            assert!((v * a - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn epsilon_examples() {
        assert_eq!(optimal_epsilon(2.0, 1.0).unwrap(), 0.125);
        assert_eq!(theorem_4_1_exponent(2.0, 1.0).unwrap(), 0.25);
        assert!((theorem_4_1_exponent(1e9, 0.5).unwrap() - 0.25).abs() < 1e-9);
        assert!(theorem_4_1_exponent(2.0, 1e-12).unwrap() < 1e-12);
        assert_eq!(optimal_epsilon(0.0, 1.0), Err(BoundError::NonPositiveA(0.0)));
        assert_eq!(optimal_epsilon(-1.0, 1.0), Err(BoundError::NonPositiveA(-1.0)));
    }

    #[test]
    fn sobolev_form_examples() {
        let inputs = BoundInputs { a: Some(2.0), sobolev_norms: vec![1.0; 3], ..unit() };
        let f = RatioFactor { lambda_sum: 4.0, varrho_sum: 4.0, product: 16.0 };
        assert_eq!(rhs_theorem_4_2(&inputs, &f).unwrap(), 0.5);
        let mut doubled = inputs.clone();
        doubled.sobolev_norms[1] = 2.0;
        assert_eq!(rhs_theorem_4_2(&doubled, &f).unwrap(), 2.0);
        let missing = BoundInputs { a: Some(2.0), ..unit() };
        assert!(matches!(rhs_theorem_4_2(&missing, &f), Err(BoundError::MissingNorms { .. })));
    }

    #[test]
    fn balanced_form_unit_norms() {
        let inputs = BoundInputs { a: Some(2.0), sup_norms: vec![1.0; 2], pm_norms: vec![1.0; 2], ..unit() };
        let f = RatioFactor { lambda_sum: 4.0, varrho_sum: 4.0, product: 16.0 };
        assert_eq!(rhs_theorem_4_1(&inputs, &f).unwrap(), 0.5);
        let no_a = BoundInputs { a: None, ..inputs.clone() };
        assert!(rhs_theorem_4_1(&no_a, &f).is_err());
        let short = BoundInputs { pm_norms: vec![1.0], ..inputs };
        assert!(matches!(rhs_theorem_4_1(&short, &f), Err(BoundError::MissingNorms { .. })));
    }

    #[test]
    fn sl2_formula_examples() {
        let std = corollary_sl2(Sl2Variant::Standard, &[2.0, 8.0], &unit()).unwrap();
        assert_eq!(std.value, 120f64.powf(-0.5));
        let adj = corollary_sl2(Sl2Variant::Adjoint, &[2.0, 8.0], &unit()).unwrap();
        assert_eq!((adj.factors.lambda_sum, adj.factors.varrho_sum), (80.0, 68.0));
        assert!((adj.value - 80f64.powf(-0.5) * 68f64.powf(-0.5)).abs() < 1e-15);
        let one = corollary_sl2(Sl2Variant::Standard, &[9.0], &unit()).unwrap();
        assert!((one.value - 1.0 / 9.0).abs() < 1e-16);
        assert_eq!(
            corollary_sl2(Sl2Variant::Standard, &[8.0, 2.0], &unit()),
            Err(BoundError::Unordered(2))
        );
        assert_eq!(corollary_sl2(Sl2Variant::Standard, &[0.5], &unit()), Err(BoundError::Unordered(1)));
    }

    #[test]
    fn sl2_applicability_uses_successive_ratios() {
        let inputs = BoundInputs { c_prime: 3.0, ..unit() };
        assert!(corollary_sl2(Sl2Variant::Standard, &[4.0, 16.0], &inputs).unwrap().applicable);
        assert!(!corollary_sl2(Sl2Variant::Standard, &[4.0, 10.0], &inputs).unwrap().applicable);
    }

    #[test]
    fn evaluate_flags_inapplicable() {
        let rep = RepresentationData::standard_sl2();
        let tuple = [DiagonalElement::sl2(2.0), DiagonalElement::sl2(8.0)];
        let inputs = BoundInputs { c_prime: 4.0, ..unit() };
        let e = evaluate_theorem_3_3(&inputs, &rep, &tuple, LambdaRange::FromIdentity).unwrap();
        assert!(!e.applicable);
        assert_eq!(e.factors.product, 120.0);
    }

    #[test]
    fn calibration_examples() {
        let zeros = [BoundSample { exact_abs: 0.0, unit_bound: Some(0.3) }; 3];
        assert_eq!(calibrate_constant(&zeros, &zeros).unwrap().c_cal, 0.0);
        let one = [BoundSample { exact_abs: 0.05, unit_bound: Some(0.1) }];
        let cal = calibrate_constant(&one, &[]).unwrap();
        assert_eq!(cal.c_cal, 0.5);
        let held = [
            BoundSample { exact_abs: 0.01, unit_bound: Some(0.1) },
            BoundSample { exact_abs: 0.2, unit_bound: Some(0.1) },
            BoundSample { exact_abs: 9.0, unit_bound: None },
        ];
        let cal = calibrate_constant(&one, &held).unwrap();
        assert_eq!(cal.violations, vec![1]);
        assert_eq!(cal.held_out_count, 2);
        assert_eq!(calibrate_constant(&[], &held), Err(BoundError::EmptyCalibration));
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("1/3"), Some(BigRational::new(1.into(), 3.into())));
        assert_eq!(parse_rational(" 1 "), Some(BigRational::one()));
        assert_eq!(parse_rational("0.5"), Some(BigRational::new(1.into(), 2.into())));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
    }
}
