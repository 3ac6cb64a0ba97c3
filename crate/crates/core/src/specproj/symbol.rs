use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::poly::ExactComplex;
use super::SpecError;
use crate::lattice::{Freq, IntMatrix};

/// Upper limit on lattice points enumerated when materializing the support of
/// a radial or annular symbol.
pub const SUPPORT_ENUMERATION_LIMIT: usize = 2_000_000;

/// Piecewise-linear profile in `r = ‖m‖` (max-norm), interpolating between
/// knots and vanishing outside the knot range.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialProfile {
    knots: Vec<(BigRational, BigRational)>,
}

impl RadialProfile {
    /// Knots must have strictly increasing, nonnegative radii.
    pub fn new(knots: Vec<(BigRational, BigRational)>) -> Result<Self, SpecError> {
        if knots.is_empty() {
            return Err(SpecError::InvalidSymbol("radial profile needs at least one knot".into()));
        }
        if knots[0].0.is_negative() || knots.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(SpecError::InvalidSymbol(
                "radial knots must be nonnegative and strictly increasing".into(),
            ));
        }
        Ok(RadialProfile { knots })
    }

    /// The smooth-annulus approximant: `1` on `Ann(s)`, `0` outside
    /// `Ann(s + 1/k)`, linear in between.
    pub fn annulus_approximant(s: &BigRational, k: u32) -> Result<Self, SpecError> {
        if *s <= BigRational::one() || k == 0 {
            return Err(SpecError::InvalidAnnulus(s.to_string()));
        }
        let outer = s + BigRational::new(BigInt::one(), BigInt::from(k));
        let (zero, one) = (BigRational::zero(), BigRational::one());
        RadialProfile::new(vec![
            (outer.recip(), zero.clone()),
            (s.recip(), one.clone()),
            (s.clone(), one),
            (outer, zero),
        ])
    }

    pub fn eval(&self, r: &BigRational) -> BigRational {
        let (first, last) = (&self.knots[0], &self.knots[self.knots.len() - 1]);
        if r < &first.0 || r > &last.0 {
            return BigRational::zero();
        }
        for w in self.knots.windows(2) {
            let ((r0, v0), (r1, v1)) = (&w[0], &w[1]);
            if r >= r0 && r <= r1 {
                return v0 + (v1 - v0) * (r - r0) / (r1 - r0);
            }
        }
        last.1.clone()
    }

    pub fn outer_radius(&self) -> &BigRational {
        &self.knots[self.knots.len() - 1].0
    }

    pub fn sup_abs(&self) -> BigRational {
        self.knots.iter().map(|(_, v)| v.abs()).max().unwrap_or_default()
    }
}

/// A Fourier multiplier symbol on `Z^d`, evaluated lazily at integer
/// frequencies with exact rational complex values.
#[derive(Clone, Debug, PartialEq)]
pub enum SpectralSymbol {
    /// Indicator of a finite set.
    Indicator(BTreeSet<Freq>),
    /// Finitely supported table of values.
    Table(BTreeMap<Freq, ExactComplex>),
    Constant(ExactComplex),
    /// Indicator of the open annulus `s^{-1} < ‖m‖ < s`.
    Annulus(BigRational),
    Radial(RadialProfile),
    Product(Box<SpectralSymbol>, Box<SpectralSymbol>),
    Sum(Box<SpectralSymbol>, Box<SpectralSymbol>),
    /// Complex conjugate of the inner symbol.
    Conjugate(Box<SpectralSymbol>),
    /// `m ↦ inner(M m)`.
    Transport { matrix: IntMatrix, inner: Box<SpectralSymbol> },
}

pub fn in_open_annulus(s: &BigRational, m: &Freq) -> bool {
    let r = m.max_norm_rational();
    r > s.recip() && &r < s
}

impl SpectralSymbol {
    pub fn one() -> Self {
        SpectralSymbol::Constant(Complex::new(BigRational::one(), BigRational::zero()))
    }

    pub fn indicator<I: IntoIterator<Item = Freq>>(set: I) -> Self {
        SpectralSymbol::Indicator(set.into_iter().collect())
    }

    pub fn annulus(s: BigRational) -> Result<Self, SpecError> {
        if s <= BigRational::one() {
            return Err(SpecError::InvalidAnnulus(s.to_string()));
        }
        Ok(SpectralSymbol::Annulus(s))
    }

    pub fn times(self, other: SpectralSymbol) -> Self {
        SpectralSymbol::Product(Box::new(self), Box::new(other))
    }

    pub fn plus(self, other: SpectralSymbol) -> Self {
        SpectralSymbol::Sum(Box::new(self), Box::new(other))
    }

    pub fn conjugate(self) -> Self {
        SpectralSymbol::Conjugate(Box::new(self))
    }

    pub fn transported(self, matrix: IntMatrix) -> Self {
        SpectralSymbol::Transport { matrix, inner: Box::new(self) }
    }

    pub fn eval(&self, m: &Freq) -> ExactComplex {
        let real = |v: BigRational| Complex::new(v, BigRational::zero());
        match self {
            SpectralSymbol::Indicator(set) => {
                real(if set.contains(m) { BigRational::one() } else { BigRational::zero() })
            }
            SpectralSymbol::Table(t) => t.get(m).cloned().unwrap_or_else(Complex::zero),
            SpectralSymbol::Constant(c) => c.clone(),
            SpectralSymbol::Annulus(s) => real(if in_open_annulus(s, m) {
                BigRational::one()
            } else {
                BigRational::zero()
            }),
            SpectralSymbol::Radial(p) => real(p.eval(&m.max_norm_rational())),
            SpectralSymbol::Product(a, b) => a.eval(m) * b.eval(m),
            SpectralSymbol::Sum(a, b) => a.eval(m) + b.eval(m),
            SpectralSymbol::Conjugate(a) => a.eval(m).conj(),
            SpectralSymbol::Transport { matrix, inner } => inner.eval(&matrix.apply(m)),
        }
    }

    /// Whether the symbol is invariant under signed coordinate permutations,
    /// which holds for everything built from max-norm radial pieces.
    pub fn is_radial(&self) -> bool {
        match self {
            SpectralSymbol::Constant(_) | SpectralSymbol::Annulus(_) | SpectralSymbol::Radial(_) => true,
            SpectralSymbol::Product(a, b) | SpectralSymbol::Sum(a, b) => a.is_radial() && b.is_radial(),
            SpectralSymbol::Conjugate(a) => a.is_radial(),
            _ => false,
        }
    }

    /// `sup |φ|` over the given frequencies.
    pub fn sup_abs_on<'a, I: IntoIterator<Item = &'a Freq>>(&self, freqs: I) -> f64 {
        freqs
            .into_iter()
            .map(|m| {
                let v = self.eval(m);
                (&v.re * &v.re + &v.im * &v.im).to_f64().unwrap_or(f64::NAN).sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// The finite set of lattice points where the symbol is nonzero, or
    /// `None` when the support is unbounded.
    pub fn finite_support(&self, dim: usize) -> Result<Option<BTreeSet<Freq>>, SpecError> {
        let nonzero = |set: BTreeSet<Freq>| -> BTreeSet<Freq> {
            set.into_iter().filter(|m| !self.eval(m).is_zero()).collect()
        };
        Ok(match self {
            SpectralSymbol::Indicator(set) => Some(set.clone()),
            SpectralSymbol::Table(t) => {
                Some(t.iter().filter(|(_, v)| !v.is_zero()).map(|(m, _)| m.clone()).collect())
            }
            SpectralSymbol::Constant(c) => {
                if c.is_zero() {
                    Some(BTreeSet::new())
                } else {
                    None
                }
            }
            SpectralSymbol::Annulus(s) => Some(nonzero(lattice_box(dim, &ceil_below(s))?)),
            SpectralSymbol::Radial(p) => Some(nonzero(lattice_box(dim, &p.outer_radius().floor().to_integer())?)),
            SpectralSymbol::Product(a, b) => {
                match (a.finite_support(dim)?, b.finite_support(dim)?) {
                    (Some(sa), Some(sb)) => Some(nonzero(sa.intersection(&sb).cloned().collect())),
                    (Some(s), None) | (None, Some(s)) => Some(nonzero(s)),
                    (None, None) => None,
                }
            }
            SpectralSymbol::Sum(a, b) => match (a.finite_support(dim)?, b.finite_support(dim)?) {
                (Some(sa), Some(sb)) => Some(nonzero(sa.union(&sb).cloned().collect())),
                _ => None,
            },
            SpectralSymbol::Conjugate(a) => a.finite_support(dim)?,
            SpectralSymbol::Transport { matrix, inner } => match inner.finite_support(dim)? {
                None => None,
                Some(s) => {
                    let inv = matrix
                        .inverse()
                        .ok_or_else(|| SpecError::NotUnimodular(format!("{matrix:?}")))?;
                    Some(s.iter().map(|n| inv.apply(n)).collect())
                }
            },
        })
    }
}

// Largest integer strictly below s.
fn ceil_below(s: &BigRational) -> BigInt {
    let c = s.ceil().to_integer();
    c - BigInt::one()
}

/// All `m ∈ Z^d` with `‖m‖ ≤ radius`.
pub fn lattice_box(dim: usize, radius: &BigInt) -> Result<BTreeSet<Freq>, SpecError> {
    let r = radius.to_i64().filter(|r| *r >= 0).unwrap_or(-1);
    if r < 0 {
        return Ok(BTreeSet::new());
    }
    let side = (2 * r + 1) as f64;
    if side.powi(dim as i32) > SUPPORT_ENUMERATION_LIMIT as f64 {
        return Err(SpecError::SupportTooLarge { dim, radius: r });
    }
    let mut out = BTreeSet::new();
    let mut cur = vec![-r; dim];
    loop {
        out.insert(Freq::from(cur.clone()));
        let mut i = 0;
        loop {
            if i == dim {
                return Ok(out);
            }
            if cur[i] < r {
                cur[i] += 1;
                break;
            }
            cur[i] = -r;
            i += 1;
        }
    }
}

/// Indicator of the Minkowski sum `S + T` of two finite sets.
pub fn sumset(a: &BTreeSet<Freq>, b: &BTreeSet<Freq>) -> BTreeSet<Freq> {
    a.iter().flat_map(|u| b.iter().map(move |v| u + v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn approximant_profile_values() {
        let p = RadialProfile::annulus_approximant(&r(2, 1), 2).unwrap();
        // outer radius 5/2, inner 2/5
        assert_eq!(p.eval(&r(1, 1)), r(1, 1));
        assert_eq!(p.eval(&r(2, 1)), r(1, 1));
        assert_eq!(p.eval(&r(9, 4)), r(1, 2));
        assert_eq!(p.eval(&r(5, 2)), r(0, 1));
        assert_eq!(p.eval(&r(3, 1)), r(0, 1));
        assert_eq!(p.eval(&r(0, 1)), r(0, 1));
    }

    #[test]
    fn annulus_support_enumeration() {
        let s = SpectralSymbol::annulus(r(2, 1)).unwrap();
        let supp = s.finite_support(2).unwrap().unwrap();
        // ‖m‖ = 1 exactly: 3x3 box minus the origin
        assert_eq!(supp.len(), 8);
        assert!(!supp.contains(&Freq::from([0, 0])));
        assert!(SpectralSymbol::one().finite_support(2).unwrap().is_none());
    }

    #[test]
    fn transported_support_is_preimage() {
        let g = IntMatrix::from_rows(&[[2, 1], [1, 1]]);
        let phi = SpectralSymbol::indicator([Freq::from([1, 0])]).transported(g.clone());
        let supp = phi.finite_support(2).unwrap().unwrap();
        assert_eq!(supp.len(), 1);
        let m = supp.iter().next().unwrap();
        assert_eq!(g.apply(m), Freq::from([1, 0]));
    }

    #[test]
    fn rejects_bad_profiles() {
        assert!(RadialProfile::new(vec![]).is_err());
        assert!(RadialProfile::new(vec![(r(2, 1), r(1, 1)), (r(1, 1), r(0, 1))]).is_err());
        assert!(SpectralSymbol::annulus(r(1, 1)).is_err());
    }
}
