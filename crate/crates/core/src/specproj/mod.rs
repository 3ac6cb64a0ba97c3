//! Spectral projections on trigonometric polynomials.
//!
//! For the translation action of `R^d` on `T^d` the approximate projection
//! `P_φ` is the Fourier multiplier `c_m ↦ φ(m) c_m`; the sign convention is
//! fixed so that `P_φ e_m = φ(m) e_m`. Frequencies are measured in the
//! max-norm, annuli are open on both sides, and for the `±` norms the ball
//! keeps `‖m‖ < s` while its complement keeps `‖m‖ ≥ s`.

mod poly;
mod region;
mod symbol;

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use poly::{exact, Coefficient, ExactComplex, ExactTrigPoly, TrigPoly, TrigPolynomial};
pub use region::{
    cone_mass, cone_membership, region_mass, weight_coordinates, ConeSpec, ConeVariant,
    SpectralRegion, XSet, XSetKind,
};
pub use symbol::{in_open_annulus, lattice_box, sumset, RadialProfile, SpectralSymbol};

use crate::lattice::{Freq, IntMatrix};
use crate::repdata::RepError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("annulus parameter s = {0} must exceed 1")]
    InvalidAnnulus(String),
    #[error("matrix is not invertible over the integers: {0}")]
    NotUnimodular(String),
    #[error("exponent A must be positive, got {0}")]
    NonPositiveExponent(f64),
    #[error("coordinate index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("invalid symbol: {0}")]
    InvalidSymbol(String),
    #[error("symbol support is not finite")]
    InfiniteSupport,
    #[error("support enumeration of radius {radius} in dimension {dim} is too large")]
    SupportTooLarge { dim: usize, radius: i64 },
    #[error("unsupported mode: {0}")]
    UnsupportedMode(String),
    #[error("conjugation law violated at frequency {0}")]
    ConjugationMismatch(Freq),
    #[error(transparent)]
    Rep(#[from] RepError),
}

/// `Ann(s) = { m : s^{-1} < ‖m‖ < s }`, `s > 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct AnnulusSpec {
    s: BigRational,
}

impl AnnulusSpec {
    pub fn new(s: BigRational) -> Result<Self, SpecError> {
        if s <= BigRational::one() {
            return Err(SpecError::InvalidAnnulus(s.to_string()));
        }
        Ok(AnnulusSpec { s })
    }

    pub fn from_f64(s: f64) -> Result<Self, SpecError> {
        let q = BigRational::from_float(s).ok_or_else(|| SpecError::InvalidAnnulus(s.to_string()))?;
        Self::new(q)
    }

    pub fn s(&self) -> &BigRational {
        &self.s
    }

    pub fn contains(&self, m: &Freq) -> bool {
        in_open_annulus(&self.s, m)
    }

    /// Smallest integer `s` whose annulus contains every nonzero frequency
    /// of `f`.
    pub fn covering<C: Coefficient>(f: &TrigPolynomial<C>) -> Self {
        let r = f.support().map(Freq::max_norm).max().unwrap_or_default();
        let s = BigRational::from_integer(r + 1).max(BigRational::from_integer(2.into()));
        AnnulusSpec { s }
    }
}

/// `P_φ f`: multiplies each coefficient by `φ(m)`.
pub fn apply_multiplier<C: Coefficient>(phi: &SpectralSymbol, f: &TrigPolynomial<C>) -> TrigPolynomial<C> {
    f.map_coeffs(|m, c| C::from_exact(&phi.eval(m)) * c.clone())
}

/// `σ(g) P_φ σ(g^{-1}) f`, computed through the group action and checked
/// against direct application of the transported symbol `m ↦ φ(g^T m)`.
pub fn conjugated_multiplier<C: Coefficient>(
    g: &IntMatrix,
    phi: &SpectralSymbol,
    f: &TrigPolynomial<C>,
) -> Result<TrigPolynomial<C>, SpecError> {
    let g_inv = g.inverse().ok_or_else(|| SpecError::NotUnimodular(format!("{g:?}")))?;
    let pulled = f.act_linear(&g_inv)?;
    let conjugated = apply_multiplier(phi, &pulled).act_linear(g)?;
    let direct = apply_multiplier(&phi.clone().transported(g.transpose()), f);
    if conjugated != direct {
        let witness = conjugated
            .support()
            .chain(direct.support())
            .find(|m| conjugated.coeff(m) != direct.coeff(m))
            .cloned()
            .unwrap_or_else(|| Freq::zero(f.dim()));
        return Err(SpecError::ConjugationMismatch(witness));
    }
    Ok(conjugated)
}

/// Result of checking `P_ω(P_φ f · P_ψ g) = P_φ f · P_ψ g`.
#[derive(Clone, Debug, PartialEq)]
pub enum SumsetOutcome {
    /// `ω ≡ 1` on `supp φ + supp ψ` and the identity holds exactly.
    Verified,
    /// `ω(witness) ≠ 1` at a point of the sumset; `identity_holds` tells
    /// whether the product still happens to be fixed by `P_ω`.
    HypothesisFails { witness: Freq, identity_holds: bool },
    /// The hypothesis holds but the identity does not (never expected).
    IdentityViolated { witness: Freq },
}

impl SumsetOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, SumsetOutcome::Verified)
    }
}

pub fn sumset_projection_check<C: Coefficient>(
    phi: &SpectralSymbol,
    psi: &SpectralSymbol,
    omega: &SpectralSymbol,
    f: &TrigPolynomial<C>,
    g: &TrigPolynomial<C>,
) -> Result<SumsetOutcome, SpecError> {
    let dim = f.dim();
    let supp_phi = phi.finite_support(dim)?.ok_or(SpecError::InfiniteSupport)?;
    let supp_psi = psi.finite_support(dim)?.ok_or(SpecError::InfiniteSupport)?;
    let one = ExactComplex::one();
    let hypothesis_witness = sumset(&supp_phi, &supp_psi)
        .into_iter()
        .find(|m| omega.eval(m) != one);

    let product = apply_multiplier(phi, f).multiply(&apply_multiplier(psi, g))?;
    let projected = apply_multiplier(omega, &product);
    let identity_witness = product
        .support()
        .chain(projected.support())
        .find(|m| product.coeff(m) != projected.coeff(m))
        .cloned();

    Ok(match (hypothesis_witness, identity_witness) {
        (None, None) => SumsetOutcome::Verified,
        (None, Some(witness)) => SumsetOutcome::IdentityViolated { witness },
        (Some(witness), id) => SumsetOutcome::HypothesisFails { witness, identity_holds: id.is_none() },
    })
}

/// `P_{S+T}(P_S f · P_T g)` with indicator symbols; equals the product when
/// `S` and `T` are finite.
pub fn sumset_closure<C: Coefficient>(
    s: &BTreeSet<Freq>,
    t: &BTreeSet<Freq>,
    f: &TrigPolynomial<C>,
    g: &TrigPolynomial<C>,
) -> Result<(TrigPolynomial<C>, TrigPolynomial<C>), SpecError> {
    let product = apply_multiplier(&SpectralSymbol::Indicator(s.clone()), f)
        .multiply(&apply_multiplier(&SpectralSymbol::Indicator(t.clone()), g))?;
    let closed = apply_multiplier(&SpectralSymbol::Indicator(sumset(s, t)), &product);
    Ok((closed, product))
}

/// `P_{(s)} f`: keeps exactly the frequencies in the open annulus `Ann(s)`.
pub fn annulus_truncate<C: Coefficient>(s: &BigRational, f: &TrigPolynomial<C>) -> Result<TrigPolynomial<C>, SpecError> {
    let ann = AnnulusSpec::new(s.clone())?;
    Ok(f.filter(|m| ann.contains(m)))
}

/// Whether `f` lies in the range of `P_{(s)}` for some `s`, i.e. has no mean.
pub fn is_spectrally_bounded<C: Coefficient>(f: &TrigPolynomial<C>) -> bool {
    f.mean().is_zero()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PmNorms {
    pub minus: f64,
    pub plus: f64,
    pub total: f64,
}

/// `‖f‖_{-,A}`, `‖f‖_{+,A}` and their sum. Both suprema over `s` are
/// determined by the finitely many radii `r = ‖m‖` of the support: the minus
/// norm is `sup_r r^{-A} ‖P_{‖m‖≤r} f‖₂` (approached as `s → r⁺`) and the
/// plus norm is `max_r r^A ‖P_{‖m‖≥r} f‖₂` (attained at `s = r`). A nonzero
/// mean makes the minus norm infinite.
pub fn pm_norms<C: Coefficient>(a: f64, f: &TrigPolynomial<C>) -> Result<PmNorms, SpecError> {
    if a.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(SpecError::NonPositiveExponent(a));
    }
    // squared mass per radius, ascending
    let mut shells: Vec<(f64, f64)> = Vec::new();
    let mut by_radius = std::collections::BTreeMap::new();
    for (m, c) in f.terms() {
        *by_radius.entry(m.max_norm()).or_insert(0.0) += c.norm_sqr_f64();
    }
    for (r, mass) in by_radius {
        shells.push((r.to_f64().unwrap_or(f64::INFINITY), mass));
    }
    let total_mass: f64 = shells.iter().map(|(_, m)| m).sum();

    let mut minus: f64 = 0.0;
    let mut inside = 0.0;
    for &(r, mass) in &shells {
        inside += mass;
        if r == 0.0 {
            if mass > 0.0 {
                minus = f64::INFINITY;
            }
            continue;
        }
        minus = minus.max(r.powf(-a) * inside.sqrt());
    }

    let mut plus: f64 = 0.0;
    let mut outside = total_mass;
    for &(r, mass) in &shells {
        plus = plus.max(r.powf(a) * outside.max(0.0).sqrt());
        outside -= mass;
    }
    Ok(PmNorms { minus, plus, total: minus + plus })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_complex::Complex64;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    fn poly(terms: &[([i64; 3], f64)]) -> TrigPoly {
        TrigPoly::from_terms(3, terms.iter().map(|(m, c)| (Freq::from(*m), Complex64::new(*c, 0.0)))).unwrap()
    }

    #[test]
    fn multiplier_on_annulus() {
        let phi = SpectralSymbol::annulus(r(2, 1)).unwrap();
        let f = poly(&[([1, 0, 0], 1.0), ([3, 0, 0], 1.0)]);
        assert_eq!(apply_multiplier(&phi, &f), poly(&[([1, 0, 0], 1.0)]));
        assert_eq!(apply_multiplier(&SpectralSymbol::one(), &f), f);
    }

    #[test]
    fn multiplier_homomorphism_example() {
        let psi = SpectralSymbol::annulus(r(3, 1)).unwrap();
        let omega = SpectralSymbol::Radial(RadialProfile::annulus_approximant(&r(2, 1), 3).unwrap());
        let f = ExactTrigPoly::from_terms(
            2,
            [(Freq::from([1, 2]), exact(3, -1)), (Freq::from([2, 2]), exact(1, 1)), (Freq::from([0, 0]), exact(5, 0))],
        )
        .unwrap();
        let lhs = apply_multiplier(&psi.clone().times(omega.clone()), &f);
        let rhs = apply_multiplier(&psi, &apply_multiplier(&omega, &f));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn conjugation_examples() {
        let f = TrigPoly::character(Freq::from([1, -1]));
        let id = IntMatrix::identity(2);
        let phi = SpectralSymbol::indicator([Freq::from([1, 0])]);
        assert_eq!(conjugated_multiplier(&id, &phi, &f).unwrap(), apply_multiplier(&phi, &f));

        let g = IntMatrix::from_rows(&[[2, 1], [1, 1]]);
        let out = conjugated_multiplier(&g, &phi, &f).unwrap();
        // φ(g^T (1,-1)) = φ((1,0)) = 1
        assert_eq!(out, f);

        let swap = IntMatrix::from_rows(&[[0, 1], [1, 0]]);
        let radial = SpectralSymbol::annulus(r(3, 1)).unwrap();
        let h = TrigPoly::from_terms(2, [(Freq::from([2, 0]), one()), (Freq::from([0, 5]), one())]).unwrap();
        assert_eq!(conjugated_multiplier(&swap, &radial, &h).unwrap(), apply_multiplier(&radial, &h));

        let bad = IntMatrix::from_rows(&[[2, 0], [0, 1]]);
        assert!(matches!(conjugated_multiplier(&bad, &phi, &f), Err(SpecError::NotUnimodular(_))));
    }

    #[test]
    fn sumset_singletons() {
        let phi = SpectralSymbol::indicator([Freq::from([1, 0, 0])]);
        let psi = SpectralSymbol::indicator([Freq::from([0, 1, 0])]);
        let omega = SpectralSymbol::indicator([Freq::from([1, 1, 0])]);
        let f = poly(&[([1, 0, 0], 2.0), ([2, 0, 0], 1.0)]);
        let g = poly(&[([0, 1, 0], 3.0)]);
        assert!(sumset_projection_check(&phi, &psi, &omega, &f, &g).unwrap().holds());
    }

    #[test]
    fn sumset_of_unit_annuli() {
        let phi = SpectralSymbol::annulus(r(2, 1)).unwrap();
        let omega = SpectralSymbol::annulus(r(4, 1)).unwrap().plus(SpectralSymbol::indicator([Freq::zero(2)]));
        let f = TrigPoly::from_terms(2, [(Freq::from([1, 1]), one()), (Freq::from([-1, 0]), one()), (Freq::from([3, 0]), one())]).unwrap();
        let g = TrigPoly::from_terms(2, [(Freq::from([1, -1]), one()), (Freq::from([1, 0]), one())]).unwrap();
        assert_eq!(sumset_projection_check(&phi, &phi, &omega, &f, &g).unwrap(), SumsetOutcome::Verified);
    }

    #[test]
    fn sumset_hypothesis_failure_has_witness() {
        let phi = SpectralSymbol::indicator([Freq::from([1, 0, 0])]);
        let psi = SpectralSymbol::indicator([Freq::from([0, 1, 0]), Freq::from([0, 2, 0])]);
        let omega = SpectralSymbol::indicator([Freq::from([1, 1, 0])]);
        let f = poly(&[([1, 0, 0], 1.0)]);
        let g = poly(&[([0, 2, 0], 1.0)]);
        let out = sumset_projection_check(&phi, &psi, &omega, &f, &g).unwrap();
        assert_eq!(
            out,
            SumsetOutcome::HypothesisFails { witness: Freq::from([1, 2, 0]), identity_holds: false }
        );
        assert!(!out.holds());
    }

    #[test]
    fn indicator_closure() {
        let s: BTreeSet<Freq> = [Freq::from([1, 0]), Freq::from([0, 1])].into_iter().collect();
        let t: BTreeSet<Freq> = [Freq::from([2, -1])].into_iter().collect();
        let f = TrigPoly::from_terms(2, [(Freq::from([1, 0]), one()), (Freq::from([0, 1]), one()), (Freq::from([4, 4]), one())]).unwrap();
        let g = TrigPoly::from_terms(2, [(Freq::from([2, -1]), one()), (Freq::from([0, 0]), one())]).unwrap();
        let (closed, product) = sumset_closure(&s, &t, &f, &g).unwrap();
        assert_eq!(closed, product);
        assert_eq!(product.len(), 2);
    }

    #[test]
    fn annulus_truncation() {
        let f = poly(&[([0, 0, 0], 1.0), ([1, 0, 0], 1.0), ([3, 0, 0], 1.0)]);
        let t = annulus_truncate(&r(2, 1), &f).unwrap();
        assert_eq!(t, poly(&[([1, 0, 0], 1.0)]));
        assert_eq!(annulus_truncate(&r(2, 1), &t).unwrap(), t);
        let wide = annulus_truncate(&r(10, 1), &f).unwrap();
        assert_eq!(wide, poly(&[([1, 0, 0], 1.0), ([3, 0, 0], 1.0)]));
        assert!(is_spectrally_bounded(&wide));
        assert!(annulus_truncate(&r(1, 1), &f).is_err());
    }

    #[test]
    fn pm_norms_single_frequency() {
        let f = TrigPoly::character(Freq::from([2, 0]));
        let n = pm_norms(1.0, &f).unwrap();
        assert_eq!(n, PmNorms { minus: 0.5, plus: 2.0, total: 2.5 });
        let n2 = pm_norms(1.0, &f.scale(&Complex64::new(2.0, 0.0))).unwrap();
        assert_eq!(n2, PmNorms { minus: 1.0, plus: 4.0, total: 5.0 });
        assert_eq!(pm_norms(1.0, &TrigPoly::zero(2)).unwrap().total, 0.0);
        assert!(pm_norms(0.0, &f).is_err());
        let with_mean = TrigPoly::constant(2, one());
        assert!(pm_norms(1.0, &with_mean).unwrap().minus.is_infinite());
    }

    #[test]
    fn pm_norms_bounded_on_annulus_range() {
        let f = TrigPoly::from_terms(2, [(Freq::from([1, 0]), one()), (Freq::from([2, 3]), Complex64::new(0.0, 2.0)), (Freq::from([-4, 1]), one())]).unwrap();
        let s0: f64 = 5.0;
        for a in [0.5, 1.0, 2.0, 3.5] {
            let n = pm_norms(a, &f).unwrap();
            let cap = s0.powf(a) * f.l2_norm();
            assert!(n.minus <= cap && n.plus <= cap, "A = {a}: {n:?}");
        }
    }
}
