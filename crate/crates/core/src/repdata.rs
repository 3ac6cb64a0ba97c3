//! Weights of torus representations, the decay exponent `q`, and the
//! weight-sum factor `R(a)` that controls multiple-mixing rates.
//!
//! Diagonal elements come in three flavours: floating point (`Real`), exact
//! rationals (`Rational`), and integer valuations (`QPower`) standing for
//! non-archimedean entries `q^{n_i}` with `|q| = 1/Q` for a residue field of
//! cardinality `Q`. Only absolute values of characters enter the bounds, so
//! valuations are all the non-archimedean arithmetic that is needed.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative tolerance for the `det = 1` check on floating diagonal elements.
pub const REAL_DET_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RepError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("representation has {0} weight(s); at least 2 are required")]
    DegenerateRepresentation(usize),
    #[error("acting tuple is empty")]
    EmptyTuple,
    #[error("diagonal entry {index} is not strictly positive ({value})")]
    NonPositiveEntry { index: usize, value: String },
    #[error("diagonal element is not in SL: {0}")]
    NotUnimodular(String),
    #[error("cannot combine diagonal elements of different modes")]
    ModeMismatch,
    #[error("q override {0} is outside (0, 1]")]
    InvalidOverride(String),
    #[error("invalid representation data: {0}")]
    InvalidRepresentation(String),
}

/// Integer exponent tuple: the character `diag(t_1..t_d) ↦ Π t_i^{e_i}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightVector(pub Vec<i64>);

impl WeightVector {
    pub fn new(exponents: Vec<i64>) -> Self {
        WeightVector(exponents)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn exponents(&self) -> &[i64] {
        &self.0
    }

    /// The root `e_j - e_l` of `SL(n)` (0-based indices).
    pub fn root(n: usize, j: usize, l: usize) -> Self {
        let mut e = vec![0; n];
        e[j] += 1;
        e[l] -= 1;
        WeightVector(e)
    }

    /// The simple root `α_i = e_i - e_{i+1}` (0-based).
    pub fn simple_root(n: usize, i: usize) -> Self {
        Self::root(n, i, i + 1)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

/// A diagonal element of the split torus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagonalElement {
    Real(Vec<f64>),
    Rational(Vec<BigRational>),
    /// Entry `i` is `q^{exponents[i]}`; `|q| = 1/residue`.
    QPower { exponents: Vec<i64>, residue: u64 },
}

/// Value of a character on a diagonal element.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightValue {
    Real(f64),
    Rational(BigRational),
    /// Valuation `v`: the value is `q^v`, with absolute value `residue^{-v}`.
    Valuation { valuation: i64, residue: u64 },
}

impl WeightValue {
    pub fn abs_f64(&self) -> f64 {
        match self {
            WeightValue::Real(v) => v.abs(),
            WeightValue::Rational(q) => q.abs().to_f64().unwrap_or(f64::NAN),
            WeightValue::Valuation { valuation, residue } => {
                (*residue as f64).powf(-(*valuation as f64))
            }
        }
    }

    /// Compares absolute values, exactly when both sides are exact.
    pub fn cmp_abs(&self, other: &WeightValue) -> Ordering {
        match (self, other) {
            (WeightValue::Rational(a), WeightValue::Rational(b)) => a.abs().cmp(&b.abs()),
            (
                WeightValue::Valuation { valuation: a, residue: ra },
                WeightValue::Valuation { valuation: b, residue: rb },
            ) if ra == rb => b.cmp(a),
            _ => self.abs_f64().total_cmp(&other.abs_f64()),
        }
    }
}

fn rational_pow(base: &BigRational, e: i64) -> BigRational {
    let p = base.pow(e.unsigned_abs() as i32);
    if e < 0 {
        p.recip()
    } else {
        p
    }
}

impl DiagonalElement {
    /// Floating diagonal element; entries must be positive with product 1.
    pub fn real(entries: Vec<f64>) -> Result<Self, RepError> {
        for (index, &v) in entries.iter().enumerate() {
            if !(v > 0.0 && v.is_finite()) {
                return Err(RepError::NonPositiveEntry { index, value: v.to_string() });
            }
        }
        let log_det: f64 = entries.iter().map(|v| v.ln()).sum();
        if log_det.abs() > REAL_DET_TOLERANCE {
            return Err(RepError::NotUnimodular(format!("log det = {log_det:e}")));
        }
        Ok(DiagonalElement::Real(entries))
    }

    /// `diag(a, 1/a)` in `SL(2)`.
    pub fn sl2(a: f64) -> Self {
        DiagonalElement::Real(vec![a, 1.0 / a])
    }

    pub fn rational(entries: Vec<BigRational>) -> Result<Self, RepError> {
        for (index, v) in entries.iter().enumerate() {
            if !v.is_positive() {
                return Err(RepError::NonPositiveEntry { index, value: v.to_string() });
            }
        }
        let det: BigRational = entries.iter().fold(BigRational::one(), |acc, v| acc * v);
        if !det.is_one() {
            return Err(RepError::NotUnimodular(format!("det = {det}")));
        }
        Ok(DiagonalElement::Rational(entries))
    }

    /// Rational element from `(numerator, denominator)` pairs.
    pub fn ratios(entries: &[(i64, i64)]) -> Result<Self, RepError> {
        Self::rational(
            entries
                .iter()
                .map(|&(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
                .collect(),
        )
    }

    pub fn q_power(exponents: Vec<i64>, residue: u64) -> Result<Self, RepError> {
        let sum: i64 = exponents.iter().sum();
        if sum != 0 {
            return Err(RepError::NotUnimodular(format!("exponent sum = {sum}")));
        }
        if residue < 2 {
            return Err(RepError::InvalidRepresentation(format!(
                "residue field cardinality must be >= 2, got {residue}"
            )));
        }
        Ok(DiagonalElement::QPower { exponents, residue })
    }

    pub fn dim(&self) -> usize {
        match self {
            DiagonalElement::Real(v) => v.len(),
            DiagonalElement::Rational(v) => v.len(),
            DiagonalElement::QPower { exponents, .. } => exponents.len(),
        }
    }

    /// The identity in the same mode and dimension.
    pub fn identity_like(&self) -> Self {
        let d = self.dim();
        match self {
            DiagonalElement::Real(_) => DiagonalElement::Real(vec![1.0; d]),
            DiagonalElement::Rational(_) => DiagonalElement::Rational(vec![BigRational::one(); d]),
            DiagonalElement::QPower { residue, .. } => DiagonalElement::QPower {
                exponents: vec![0; d],
                residue: *residue,
            },
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            DiagonalElement::Real(v) => v.iter().all(|&x| x == 1.0),
            DiagonalElement::Rational(v) => v.iter().all(One::is_one),
            DiagonalElement::QPower { exponents, .. } => exponents.iter().all(|&e| e == 0),
        }
    }

    pub fn mul(&self, rhs: &DiagonalElement) -> Result<DiagonalElement, RepError> {
        self.check_dim(rhs.dim())?;
        match (self, rhs) {
            (DiagonalElement::Real(a), DiagonalElement::Real(b)) => {
                Ok(DiagonalElement::Real(a.iter().zip(b).map(|(x, y)| x * y).collect()))
            }
            (DiagonalElement::Rational(a), DiagonalElement::Rational(b)) => Ok(
                DiagonalElement::Rational(a.iter().zip(b).map(|(x, y)| x * y).collect()),
            ),
            (
                DiagonalElement::QPower { exponents: a, residue: ra },
                DiagonalElement::QPower { exponents: b, residue: rb },
            ) if ra == rb => Ok(DiagonalElement::QPower {
                exponents: a.iter().zip(b).map(|(x, y)| x + y).collect(),
                residue: *ra,
            }),
            _ => Err(RepError::ModeMismatch),
        }
    }

    pub fn inverse(&self) -> DiagonalElement {
        match self {
            DiagonalElement::Real(a) => DiagonalElement::Real(a.iter().map(|x| 1.0 / x).collect()),
            DiagonalElement::Rational(a) => {
                DiagonalElement::Rational(a.iter().map(|x| x.recip()).collect())
            }
            DiagonalElement::QPower { exponents, residue } => DiagonalElement::QPower {
                exponents: exponents.iter().map(|e| -e).collect(),
                residue: *residue,
            },
        }
    }

    /// `self / rhs`, dividing entrywise (not multiplying by the inverse, so
    /// floating quotients are correctly rounded).
    pub fn div(&self, rhs: &DiagonalElement) -> Result<DiagonalElement, RepError> {
        self.check_dim(rhs.dim())?;
        match (self, rhs) {
            (DiagonalElement::Real(a), DiagonalElement::Real(b)) => {
                Ok(DiagonalElement::Real(a.iter().zip(b).map(|(x, y)| x / y).collect()))
            }
            (DiagonalElement::Rational(a), DiagonalElement::Rational(b)) => Ok(
                DiagonalElement::Rational(a.iter().zip(b).map(|(x, y)| x / y).collect()),
            ),
            _ => self.mul(&rhs.inverse()),
        }
    }

    /// Absolute values of the entries as floats.
    pub fn abs_entries(&self) -> Vec<f64> {
        match self {
            DiagonalElement::Real(v) => v.iter().map(|x| x.abs()).collect(),
            DiagonalElement::Rational(v) => {
                v.iter().map(|x| x.abs().to_f64().unwrap_or(f64::NAN)).collect()
            }
            DiagonalElement::QPower { exponents, residue } => exponents
                .iter()
                .map(|&e| (*residue as f64).powf(-(e as f64)))
                .collect(),
        }
    }

    /// Membership in the positive Weyl chamber for the standard ordering of
    /// type A: absolute values of the entries are non-increasing.
    pub fn in_positive_chamber(&self) -> bool {
        match self {
            DiagonalElement::QPower { exponents, .. } => exponents.windows(2).all(|w| w[0] <= w[1]),
            DiagonalElement::Rational(v) => v.windows(2).all(|w| w[0].abs() >= w[1].abs()),
            DiagonalElement::Real(v) => v.windows(2).all(|w| w[0].abs() >= w[1].abs()),
        }
    }

    fn check_dim(&self, d: usize) -> Result<(), RepError> {
        if self.dim() != d {
            return Err(RepError::DimensionMismatch { expected: self.dim(), found: d });
        }
        Ok(())
    }

    fn lex_cmp(&self, other: &DiagonalElement) -> Ordering {
        match (self, other) {
            (DiagonalElement::Rational(a), DiagonalElement::Rational(b)) => a.cmp(b),
            (
                DiagonalElement::QPower { exponents: a, .. },
                DiagonalElement::QPower { exponents: b, .. },
            ) => a.cmp(b),
            _ => {
                let (a, b) = (self.abs_entries(), other.abs_entries());
                a.iter()
                    .zip(&b)
                    .map(|(x, y)| x.total_cmp(y))
                    .find(|o| *o != Ordering::Equal)
                    .unwrap_or(Ordering::Equal)
            }
        }
    }
}

impl fmt::Display for DiagonalElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiagonalElement::Real(v) => write!(f, "diag{v:?}"),
            DiagonalElement::Rational(v) => {
                let s: Vec<String> = v.iter().map(ToString::to_string).collect();
                write!(f, "diag[{}]", s.join(", "))
            }
            DiagonalElement::QPower { exponents, residue } => {
                write!(f, "diag(q^{exponents:?}), |q|=1/{residue}")
            }
        }
    }
}

/// Evaluates the character `w` on `a`.
pub fn evaluate_weight(w: &WeightVector, a: &DiagonalElement) -> Result<WeightValue, RepError> {
    if w.dim() != a.dim() {
        return Err(RepError::DimensionMismatch { expected: a.dim(), found: w.dim() });
    }
    Ok(match a {
        DiagonalElement::Real(v) => {
            WeightValue::Real(v.iter().zip(&w.0).map(|(x, &e)| x.powi(e as i32)).product())
        }
        DiagonalElement::Rational(v) => WeightValue::Rational(
            v.iter()
                .zip(&w.0)
                .fold(BigRational::one(), |acc, (x, &e)| acc * rational_pow(x, e)),
        ),
        DiagonalElement::QPower { exponents, residue } => WeightValue::Valuation {
            valuation: exponents.iter().zip(&w.0).map(|(n, e)| n * e).sum(),
            residue: *residue,
        },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepKind {
    Standard,
    Adjoint,
    Custom,
}

/// Weights of an irreducible representation with designated highest and
/// lowest weights (stored as indices into the weight list).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepresentationData {
    pub name: RepKind,
    pub weights: Vec<WeightVector>,
    pub dims: Vec<u32>,
    pub highest: usize,
    pub lowest: usize,
}

impl RepresentationData {
    pub fn new(
        name: RepKind,
        weights: Vec<WeightVector>,
        dims: Vec<u32>,
        highest: usize,
        lowest: usize,
    ) -> Result<Self, RepError> {
        let rep = RepresentationData { name, weights, dims, highest, lowest };
        rep.validate()?;
        Ok(rep)
    }

    pub fn validate(&self) -> Result<(), RepError> {
        if self.weights.len() != self.dims.len() {
            return Err(RepError::InvalidRepresentation(format!(
                "{} weights but {} weight-space dimensions",
                self.weights.len(),
                self.dims.len()
            )));
        }
        if self.highest >= self.weights.len() || self.lowest >= self.weights.len() {
            return Err(RepError::InvalidRepresentation(
                "highest/lowest weight index out of range".into(),
            ));
        }
        if self.dims.contains(&0) {
            return Err(RepError::InvalidRepresentation("zero weight-space dimension".into()));
        }
        if let Some(first) = self.weights.first() {
            if let Some(bad) = self.weights.iter().find(|w| w.dim() != first.dim()) {
                return Err(RepError::DimensionMismatch { expected: first.dim(), found: bad.dim() });
            }
        }
        Ok(())
    }

    /// Standard representation of `SL(2)` on `k^2`: weights `a` and `a^{-1}`.
    pub fn standard_sl2() -> Self {
        RepresentationData {
            name: RepKind::Standard,
            weights: vec![WeightVector(vec![1, 0]), WeightVector(vec![0, 1])],
            dims: vec![1, 1],
            highest: 0,
            lowest: 1,
        }
    }

    /// Adjoint representation of `SL(2)`: weights `a^2`, `1`, `a^{-2}`.
    pub fn adjoint_sl2() -> Self {
        RepresentationData {
            name: RepKind::Adjoint,
            weights: vec![
                WeightVector(vec![1, -1]),
                WeightVector(vec![0, 0]),
                WeightVector(vec![-1, 1]),
            ],
            dims: vec![1, 1, 1],
            highest: 0,
            lowest: 2,
        }
    }

    /// Standard representation of `SL(n)`: weights `e_1, ..., e_n`.
    pub fn standard_sln(n: usize) -> Self {
        let weights = (0..n)
            .map(|i| {
                let mut e = vec![0; n];
                e[i] = 1;
                WeightVector(e)
            })
            .collect();
        RepresentationData {
            name: RepKind::Standard,
            weights,
            dims: vec![1; n],
            highest: 0,
            lowest: n - 1,
        }
    }

    pub fn highest_weight(&self) -> &WeightVector {
        &self.weights[self.highest]
    }

    pub fn lowest_weight(&self) -> &WeightVector {
        &self.weights[self.lowest]
    }

    pub fn dim_v(&self) -> u32 {
        self.dims.iter().sum()
    }

    /// `q = (1/3)^{#Φ-1}` if the highest weight space has dimension > 1,
    /// otherwise `(1/3)^{#Φ-2}`.
    pub fn q_exponent(&self) -> Result<BigRational, RepError> {
        let count = self.weights.len();
        if count < 2 {
            return Err(RepError::DegenerateRepresentation(count));
        }
        let power = if self.dims[self.highest] > 1 { count - 1 } else { count - 2 };
        Ok(BigRational::new(BigInt::one(), BigInt::from(3u32).pow(power as u32)))
    }

    /// The formula value unless an override in `(0, 1]` is supplied.
    pub fn q_exponent_with(&self, q_override: Option<&BigRational>) -> Result<BigRational, RepError> {
        match q_override {
            None => self.q_exponent(),
            Some(q) => {
                if !q.is_positive() || *q > BigRational::one() {
                    return Err(RepError::InvalidOverride(q.to_string()));
                }
                Ok(q.clone())
            }
        }
    }
}

/// Which indices enter the highest-weight ratio sum `Σ_i |λ(a^k / a^i)|`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaRange {
    /// `i = 0..k-1`, including `a^0 = I`.
    #[default]
    FromIdentity,
    /// `i = 1..k-1`.
    FromFirst,
}

/// The two weight sums and their product `R(a)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioFactor {
    /// `|Σ_i λ(a^k / a^i)|`
    pub lambda_sum: f64,
    /// `|Σ_{i=1..k} ϱ(a^i)^{-1}|`
    pub varrho_sum: f64,
    pub product: f64,
}

// Sum of character values with the absolute value taken at the end. For
// valuations the ultrametric absolute value of the sum is the largest term.
fn abs_of_sum(values: &[WeightValue]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    match &values[0] {
        WeightValue::Rational(_) => {
            let mut acc = BigRational::zero();
            for v in values {
                match v {
                    WeightValue::Rational(q) => acc += q,
                    other => acc += BigRational::from_float(other.abs_f64()).unwrap_or_default(),
                }
            }
            acc.abs().to_f64().unwrap_or(f64::NAN)
        }
        WeightValue::Valuation { .. } => {
            values.iter().map(WeightValue::abs_f64).fold(0.0, f64::max)
        }
        WeightValue::Real(_) => values
            .iter()
            .map(|v| match v {
                WeightValue::Real(x) => *x,
                other => other.abs_f64(),
            })
            .sum::<f64>()
            .abs(),
    }
}

fn check_tuple(rep: &RepresentationData, tuple: &[DiagonalElement]) -> Result<(), RepError> {
    if tuple.is_empty() {
        return Err(RepError::EmptyTuple);
    }
    let d = rep.highest_weight().dim();
    if let Some(bad) = tuple.iter().find(|a| a.dim() != d) {
        return Err(RepError::DimensionMismatch { expected: d, found: bad.dim() });
    }
    Ok(())
}

fn lambda_ratios(
    rep: &RepresentationData,
    tuple: &[DiagonalElement],
    range: LambdaRange,
) -> Result<Vec<WeightValue>, RepError> {
    let k = tuple.len();
    let last = &tuple[k - 1];
    let start = match range {
        LambdaRange::FromIdentity => 0,
        LambdaRange::FromFirst => 1,
    };
    (start..k)
        .map(|i| {
            // a^0 is the identity
            let ratio = if i == 0 { last.clone() } else { last.div(&tuple[i - 1])? };
            evaluate_weight(rep.highest_weight(), &ratio)
        })
        .collect()
}

fn varrho_inverses(
    rep: &RepresentationData,
    tuple: &[DiagonalElement],
) -> Result<Vec<WeightValue>, RepError> {
    tuple
        .iter()
        .map(|a| evaluate_weight(rep.lowest_weight(), &a.inverse()))
        .collect()
}

/// `R(a) = |Σ_i λ(a^k/a^i)| · |Σ_{i=1..k} ϱ(a^i)^{-1}|` for the tuple
/// `a^1..a^k` (the identity `a^0` is implicit).
pub fn ratio_factor(
    rep: &RepresentationData,
    tuple: &[DiagonalElement],
    range: LambdaRange,
) -> Result<RatioFactor, RepError> {
    check_tuple(rep, tuple)?;
    let lambda_sum = abs_of_sum(&lambda_ratios(rep, tuple, range)?);
    let varrho_sum = abs_of_sum(&varrho_inverses(rep, tuple)?);
    Ok(RatioFactor { lambda_sum, varrho_sum, product: lambda_sum * varrho_sum })
}

/// Sorts so that `|λ(a^i)|` is increasing; ties are broken lexicographically
/// on the entries.
pub fn order_by_highest_weight(
    rep: &RepresentationData,
    tuple: &[DiagonalElement],
) -> Result<Vec<DiagonalElement>, RepError> {
    let mut keyed = tuple
        .iter()
        .map(|a| Ok((evaluate_weight(rep.highest_weight(), a)?, a.clone())))
        .collect::<Result<Vec<_>, RepError>>()?;
    keyed.sort_by(|(va, a), (vb, b)| va.cmp_abs(vb).then_with(|| a.lex_cmp(b)));
    Ok(keyed.into_iter().map(|(_, a)| a).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Divergence {
    pub holds: bool,
    pub minimum: f64,
}

/// Checks `min(min_{i<k} |λ(a^k/a^i)|, min_{i>=1} |ϱ(a^i)^{-1}|) > threshold`.
pub fn divergence_check(
    rep: &RepresentationData,
    tuple: &[DiagonalElement],
    threshold: f64,
) -> Result<Divergence, RepError> {
    check_tuple(rep, tuple)?;
    let minimum = lambda_ratios(rep, tuple, LambdaRange::FromIdentity)?
        .iter()
        .chain(varrho_inverses(rep, tuple)?.iter())
        .map(WeightValue::abs_f64)
        .fold(f64::INFINITY, f64::min);
    Ok(Divergence { holds: minimum > threshold, minimum })
}
