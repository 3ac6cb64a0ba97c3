use std::collections::BTreeMap;
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::SpecError;
use crate::lattice::{Freq, IntMatrix};

/// Exact complex rationals, used by symbols and by the exact operator suites.
pub type ExactComplex = Complex<BigRational>;

/// Scalar field for Fourier coefficients.
pub trait Coefficient:
    Clone
    + PartialEq
    + Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn conj(&self) -> Self;
    fn from_exact(v: &ExactComplex) -> Self;
    fn to_c64(&self) -> Complex64;
    fn norm_sqr_f64(&self) -> f64 {
        self.to_c64().norm_sqr()
    }
}

impl Coefficient for Complex64 {
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn from_exact(v: &ExactComplex) -> Self {
        Complex64::new(
            v.re.to_f64().unwrap_or(f64::NAN),
            v.im.to_f64().unwrap_or(f64::NAN),
        )
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
}

impl Coefficient for ExactComplex {
    fn conj(&self) -> Self {
        Complex::conj(self)
    }
    fn from_exact(v: &ExactComplex) -> Self {
        v.clone()
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::from_exact(self)
    }
}

pub fn exact(re: i64, im: i64) -> ExactComplex {
    Complex::new(BigRational::from_integer(re.into()), BigRational::from_integer(im.into()))
}

/// A trigonometric polynomial `Σ c_m e^{2πi m·x}` on `T^d`, stored in
/// canonical form: no zero coefficients, frequencies in sorted order.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPolynomial<C: Coefficient = Complex64> {
    dim: usize,
    terms: BTreeMap<Freq, C>,
}

pub type TrigPoly = TrigPolynomial<Complex64>;
pub type ExactTrigPoly = TrigPolynomial<ExactComplex>;

impl<C: Coefficient> TrigPolynomial<C> {
    pub fn zero(dim: usize) -> Self {
        TrigPolynomial { dim, terms: BTreeMap::new() }
    }

    /// Sums repeated frequencies and drops zeros.
    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self, SpecError>
    where
        I: IntoIterator<Item = (Freq, C)>,
    {
        let mut p = Self::zero(dim);
        for (m, c) in terms {
            if m.dim() != dim {
                return Err(SpecError::DimensionMismatch { expected: dim, found: m.dim() });
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub fn monomial(m: Freq, c: C) -> Self {
        let dim = m.dim();
        let mut p = Self::zero(dim);
        p.add_term(m, c);
        p
    }

    /// The character `e_m` with unit coefficient.
    pub fn character(m: Freq) -> Self {
        Self::monomial(m, C::one())
    }

    pub fn constant(dim: usize, c: C) -> Self {
        Self::monomial(Freq::zero(dim), c)
    }

    fn add_term(&mut self, m: Freq, c: C) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                if !c.is_zero() {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Freq, &C)> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &Freq> {
        self.terms.keys()
    }

    pub fn coeff(&self, m: &Freq) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    /// The mean `∫ f`, i.e. the coefficient at frequency 0.
    pub fn mean(&self) -> C {
        self.coeff(&Freq::zero(self.dim))
    }

    /// `⟨f, g⟩ = Σ c_f(m) conj(c_g(m))`.
    pub fn inner(&self, other: &Self) -> C {
        self.terms
            .iter()
            .filter_map(|(m, c)| other.terms.get(m).map(|d| c.clone() * d.conj()))
            .fold(C::zero(), |a, b| a + b)
    }

    /// `‖f‖₂²` by Parseval.
    pub fn l2_norm_sqr(&self) -> f64 {
        self.terms.values().map(Coefficient::norm_sqr_f64).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sqr().sqrt()
    }

    /// Largest coefficient modulus.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.norm_sqr_f64().sqrt())
            .fold(0.0, f64::max)
    }

    /// Triangle-inequality bound `Σ |c_m| ≥ ‖f‖_∞`.
    pub fn l1_coeff_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm_sqr_f64().sqrt()).sum()
    }

    pub fn scale(&self, k: &C) -> Self {
        let mut out = Self::zero(self.dim);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.clone() * k.clone());
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self, SpecError> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SpecError> {
        self.add(&other.scale(&-C::one()))
    }

    /// Pointwise product, realized as convolution of coefficient maps.
    pub fn multiply(&self, other: &Self) -> Result<Self, SpecError> {
        self.check_dim(other)?;
        let mut out = Self::zero(self.dim);
        for (u, cu) in &self.terms {
            for (v, cv) in &other.terms {
                out.add_term(u + v, cu.clone() * cv.clone());
            }
        }
        Ok(out)
    }

    /// Keeps the terms whose frequency satisfies `keep`.
    pub fn filter<F: FnMut(&Freq) -> bool>(&self, mut keep: F) -> Self {
        TrigPolynomial {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Replaces each coefficient by `f(m, c)`, dropping zeros.
    pub fn map_coeffs<F: FnMut(&Freq, &C) -> C>(&self, mut f: F) -> Self {
        let mut out = Self::zero(self.dim);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(m, c));
        }
        out
    }

    /// Relabels frequencies `m ↦ M m`.
    pub fn transform_frequencies(&self, matrix: &IntMatrix) -> Result<Self, SpecError> {
        if matrix.size() != self.dim {
            return Err(SpecError::DimensionMismatch { expected: self.dim, found: matrix.size() });
        }
        let mut out = Self::zero(self.dim);
        for (m, c) in &self.terms {
            out.add_term(matrix.apply(m), c.clone());
        }
        Ok(out)
    }

    /// Translate by a toral automorphism `g`: `(g·f)(x) = f(g^{-1} x)`, which
    /// sends `e_m` to `e_{g^{-T} m}`.
    pub fn act_linear(&self, g: &IntMatrix) -> Result<Self, SpecError> {
        let inv = g.inverse().ok_or_else(|| SpecError::NotUnimodular(format!("{g:?}")))?;
        self.transform_frequencies(&inv.transpose())
    }

    /// Pointwise evaluation at `x ∈ [0,1)^d`.
    pub fn evaluate(&self, x: &[f64]) -> Complex64 {
        let mut acc = Complex64::zero();
        for (m, c) in &self.terms {
            let phase: f64 = m
                .coords()
                .iter()
                .zip(x)
                .map(|(k, xi)| k.to_f64().unwrap_or(f64::NAN) * xi)
                .sum();
            acc += c.to_c64() * Complex64::from_polar(1.0, std::f64::consts::TAU * phase);
        }
        acc
    }

    pub fn to_c64(&self) -> TrigPoly {
        TrigPolynomial {
            dim: self.dim,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.to_c64())).collect(),
        }
    }

    fn check_dim(&self, other: &Self) -> Result<(), SpecError> {
        if self.dim != other.dim {
            return Err(SpecError::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct WireTerm {
    freq: Freq,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct WirePoly {
    dim: usize,
    terms: Vec<WireTerm>,
}

impl Serialize for TrigPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        WirePoly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| WireTerm { freq: m.clone(), re: c.re, im: c.im })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TrigPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let wire = WirePoly::deserialize(d)?;
        TrigPolynomial::from_terms(
            wire.dim,
            wire.terms.into_iter().map(|t| (t.freq, Complex64::new(t.re, t.im))),
        )
        .map_err(serde::de::Error::custom)
    }
}

impl ExactTrigPoly {
    /// Exact `‖f‖₂²`.
    pub fn l2_norm_sqr_exact(&self) -> BigRational {
        self.terms
            .values()
            .map(|c| &c.re * &c.re + &c.im * &c.im)
            .fold(BigRational::zero(), |a, b| a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn character_product() {
        let a = TrigPoly::character(Freq::from([1, 0, 0]));
        let b = TrigPoly::character(Freq::from([0, 1, 0]));
        assert_eq!(a.multiply(&b).unwrap(), TrigPoly::character(Freq::from([1, 1, 0])));
        let one = TrigPoly::constant(3, c(1.0));
        assert_eq!(a.multiply(&one).unwrap(), a);
    }

    #[test]
    fn square_of_cosine() {
        let f = TrigPoly::from_terms(3, [(Freq::from([1, 0, 0]), c(1.0)), (Freq::from([-1, 0, 0]), c(1.0))])
            .unwrap();
        let sq = f.multiply(&f).unwrap();
        let expected = TrigPoly::from_terms(
            3,
            [
                (Freq::from([2, 0, 0]), c(1.0)),
                (Freq::from([0, 0, 0]), c(2.0)),
                (Freq::from([-2, 0, 0]), c(1.0)),
            ],
        )
        .unwrap();
        assert_eq!(sq, expected);
        assert_eq!(sq.mean(), c(2.0));
    }

    #[test]
    fn dimension_mismatch() {
        let a = TrigPoly::character(Freq::from([1, 0]));
        let b = TrigPoly::character(Freq::from([1, 0, 0]));
        assert_eq!(
            a.multiply(&b),
            Err(SpecError::DimensionMismatch { expected: 2, found: 3 })
        );
    }

    #[test]
    fn canonical_form_drops_cancellations() {
        let p = TrigPoly::from_terms(1, [(Freq::from([2]), c(1.5)), (Freq::from([2]), c(-1.5))]).unwrap();
        assert!(p.is_empty());
    }

    #[test]
    fn json_shape() {
        let p = TrigPoly::from_terms(2, [(Freq::from([1, -1]), Complex64::new(0.5, -2.0))]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"dim":2,"terms":[{"freq":[1,-1],"re":0.5,"im":-2.0}]}"#);
        let back: TrigPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn evaluate_matches_closed_form() {
        let f = TrigPoly::from_terms(2, [(Freq::from([1, 0]), c(1.0)), (Freq::from([-1, 0]), c(1.0))]).unwrap();
        let v = f.evaluate(&[0.125, 0.7]);
        assert!((v.re - 2.0 * (std::f64::consts::TAU * 0.125).cos()).abs() < 1e-14);
        assert!(v.im.abs() < 1e-14);
    }

    #[test]
    fn act_linear_sends_characters_through_inverse_transpose() {
        let g = IntMatrix::from_rows(&[[2, 1], [1, 1]]);
        let f = TrigPoly::character(Freq::from([1, 0]));
        assert_eq!(f.act_linear(&g).unwrap(), TrigPoly::character(Freq::from([1, -1])));
        assert!(f.act_linear(&IntMatrix::from_rows(&[[2, 0], [0, 1]])).is_err());
    }
}
