//! Frequency regions used to localize spectral mass: the cones around the
//! highest/lowest weight spaces and the sets `X₁(a,s)`, `X₂(a,s)`.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::poly::{Coefficient, TrigPolynomial};
use super::symbol::in_open_annulus;
use super::SpecError;
use crate::lattice::Freq;
use crate::repdata::{evaluate_weight, DiagonalElement, RepresentationData, WeightValue};

/// A set of frequencies with an exact membership predicate.
pub trait SpectralRegion {
    fn contains(&self, m: &Freq) -> bool;
}

/// `‖P_U f‖₂ = (Σ_{m∈U} |c_m|²)^{1/2}`.
pub fn region_mass<R: SpectralRegion + ?Sized, C: Coefficient>(region: &R, f: &TrigPolynomial<C>) -> f64 {
    f.terms()
        .filter(|(m, _)| region.contains(m))
        .map(|(_, c)| c.norm_sqr_f64())
        .sum::<f64>()
        .sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConeVariant {
    /// `Cone₁`: small component along the highest weight space.
    Highest,
    /// `Cone₂`: small component along the lowest weight space.
    Lowest,
}

/// `Cone(c, s) = { v : ‖π(v)‖ ≤ c and ‖v‖ ≥ s }` where `π` keeps the
/// designated coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeSpec {
    pub c: BigRational,
    pub s: BigRational,
    pub coords: Vec<usize>,
    pub variant: ConeVariant,
}

/// Coordinates of `V` spanned by weight `index`, with weights laid out in
/// list order and each repeated by its multiplicity.
pub fn weight_coordinates(rep: &RepresentationData, index: usize) -> Vec<usize> {
    let start: u32 = rep.dims[..index].iter().sum();
    (start..start + rep.dims[index]).map(|c| c as usize).collect()
}

impl ConeSpec {
    pub fn new(
        c: BigRational,
        s: BigRational,
        coords: Vec<usize>,
        variant: ConeVariant,
        dim: usize,
    ) -> Result<Self, SpecError> {
        if let Some(&bad) = coords.iter().find(|&&i| i >= dim) {
            return Err(SpecError::IndexOutOfRange { index: bad, dim });
        }
        if c.is_negative() || s.is_negative() {
            return Err(SpecError::InvalidSymbol("cone parameters must be nonnegative".into()));
        }
        Ok(ConeSpec { c, s, coords, variant })
    }

    /// The cone whose projection is onto the highest (`Cone₁`) or lowest
    /// (`Cone₂`) weight space of `rep`.
    pub fn for_rep(
        rep: &RepresentationData,
        variant: ConeVariant,
        c: BigRational,
        s: BigRational,
    ) -> Result<Self, SpecError> {
        let index = match variant {
            ConeVariant::Highest => rep.highest,
            ConeVariant::Lowest => rep.lowest,
        };
        Self::new(c, s, weight_coordinates(rep, index), variant, rep.dim_v() as usize)
    }
}

impl SpectralRegion for ConeSpec {
    fn contains(&self, m: &Freq) -> bool {
        let proj = self
            .coords
            .iter()
            .filter_map(|&i| m.coords().get(i))
            .map(|x| x.abs())
            .max()
            .unwrap_or_default();
        BigRational::from_integer(proj) <= self.c && m.max_norm_rational() >= self.s
    }
}

pub fn cone_membership(spec: &ConeSpec, m: &Freq) -> bool {
    spec.contains(m)
}

pub fn cone_mass<C: Coefficient>(spec: &ConeSpec, f: &TrigPolynomial<C>) -> f64 {
    region_mass(spec, f)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum XSetKind {
    /// `Ann(s) ∩ Σ_{i=1..k} ρ*(a^i) Ann(s)`
    X1,
    /// `Ann(s) ∩ Σ_{i=0..k-1} ρ*(a^i / a^k) Ann(s)`
    X2,
}

/// `X₁(a,s)` or `X₂(a,s)` on the frequency space of `rep`. Each summand
/// `ρ*(b) Ann(s)` is a diagonal image of the max-norm annulus; membership in
/// the Minkowski sum is decided exactly by covering `Ann(s)` with `2d` open
/// boxes and testing every choice of boxes.
#[derive(Clone, Debug, PartialEq)]
pub struct XSet {
    pub kind: XSetKind,
    pub s: BigRational,
    /// Per summand, the diagonal of `ρ*(b)` on `V`.
    scalings: Vec<Vec<BigRational>>,
}

fn exact_abs(v: &WeightValue) -> Result<BigRational, SpecError> {
    match v {
        WeightValue::Rational(q) => Ok(q.abs()),
        WeightValue::Real(x) => BigRational::from_float(x.abs())
            .ok_or_else(|| SpecError::InvalidSymbol(format!("non-finite weight value {x}"))),
        WeightValue::Valuation { .. } => Err(SpecError::UnsupportedMode(
            "X-sets need archimedean diagonal elements".into(),
        )),
    }
}

impl XSet {
    /// `tuple` holds `a^1..a^k`, already ordered.
    pub fn new(
        kind: XSetKind,
        rep: &RepresentationData,
        tuple: &[DiagonalElement],
        s: BigRational,
    ) -> Result<Self, SpecError> {
        if s <= BigRational::one() {
            return Err(SpecError::InvalidAnnulus(s.to_string()));
        }
        let k = tuple.len();
        if k == 0 {
            return Err(SpecError::InvalidSymbol("empty acting tuple".into()));
        }
        let last = &tuple[k - 1];
        let elements: Vec<DiagonalElement> = match kind {
            XSetKind::X1 => tuple.to_vec(),
            XSetKind::X2 => std::iter::once(Ok(last.inverse()))
                .chain(tuple[..k - 1].iter().map(|a| a.div(last)))
                .collect::<Result<_, _>>()?,
        };
        let scalings = elements
            .iter()
            .map(|b| {
                let mut diag = Vec::new();
                for (w, &mult) in rep.weights.iter().zip(&rep.dims) {
                    // ρ*(b) = ρ(b)^{-T} acts on V_ψ by ψ(b)^{-1}
                    let v = exact_abs(&evaluate_weight(w, b)?)?;
                    if v.is_zero() {
                        return Err(SpecError::InvalidSymbol("zero weight value".into()));
                    }
                    let inv = v.recip();
                    diag.extend(std::iter::repeat_n(inv, mult as usize));
                }
                Ok(diag)
            })
            .collect::<Result<Vec<_>, SpecError>>()?;
        Ok(XSet { kind, s, scalings })
    }

    fn in_minkowski_sum(&self, m: &Freq) -> bool {
        let d = m.dim();
        let s = &self.s;
        let inv_s = s.recip();
        let target: Vec<BigRational> = m.coords().iter().cloned().map(BigRational::from_integer).collect();
        let pieces = 2 * d;
        let k = self.scalings.len();
        let mut choice = vec![0usize; k];
        loop {
            // open box sum: coordinate l ranges over (lo_l, hi_l)
            let mut ok = true;
            for l in 0..d {
                let mut lo = BigRational::zero();
                let mut hi = BigRational::zero();
                for (i, &p) in choice.iter().enumerate() {
                    let t = &self.scalings[i][l];
                    let (a, b) = if p / 2 == l {
                        if p % 2 == 0 {
                            (inv_s.clone(), s.clone())
                        } else {
                            (-s.clone(), -inv_s.clone())
                        }
                    } else {
                        (-s.clone(), s.clone())
                    };
                    lo += t * a;
                    hi += t * b;
                }
                if !(lo < target[l] && target[l] < hi) {
                    ok = false;
                    break;
                }
            }
            if ok {
                return true;
            }
            let mut i = 0;
            loop {
                if i == k {
                    return false;
                }
                choice[i] += 1;
                if choice[i] < pieces {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
        }
    }
}

impl SpectralRegion for XSet {
    fn contains(&self, m: &Freq) -> bool {
        if self.scalings.first().is_some_and(|d| d.len() != m.dim()) {
            return false;
        }
        in_open_annulus(&self.s, m) && self.in_minkowski_sum(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn cone_examples() {
        let cone = ConeSpec::new(r(1, 2), r(1, 1), vec![0], ConeVariant::Highest, 2).unwrap();
        assert!(cone_membership(&cone, &Freq::from([0, 5])));
        assert!(!cone_membership(&cone, &Freq::from([1, 0])));
        assert!(ConeSpec::new(r(1, 2), r(1, 1), vec![2], ConeVariant::Highest, 2).is_err());
    }

    #[test]
    fn cone_for_standard_rep() {
        let rep = RepresentationData::standard_sl2();
        let c1 = ConeSpec::for_rep(&rep, ConeVariant::Highest, r(0, 1), r(1, 1)).unwrap();
        let c2 = ConeSpec::for_rep(&rep, ConeVariant::Lowest, r(0, 1), r(1, 1)).unwrap();
        assert_eq!(c1.coords, vec![0]);
        assert_eq!(c2.coords, vec![1]);
    }

    #[test]
    fn cone_mass_sums_members() {
        use num_complex::Complex64;
        let cone = ConeSpec::new(r(1, 2), r(1, 1), vec![0], ConeVariant::Highest, 2).unwrap();
        let f = TrigPolynomial::from_terms(
            2,
            [
                (Freq::from([0, 3]), Complex64::new(3.0, 0.0)),
                (Freq::from([0, -2]), Complex64::new(0.0, 4.0)),
                (Freq::from([1, 1]), Complex64::new(7.0, 0.0)),
            ],
        )
        .unwrap();
        assert_eq!(cone_mass(&cone, &f), 5.0);
    }

    // For a single element, membership in ρ*(a) Ann(s) is equivalent to the
    // preimage a^T m lying in Ann(s).
    #[test]
    fn x1_single_element_matches_preimage_oracle() {
        let rep = RepresentationData::standard_sl2();
        let a = DiagonalElement::ratios(&[(2, 1), (1, 2)]).unwrap();
        let s = r(4, 1);
        let x1 = XSet::new(XSetKind::X1, &rep, std::slice::from_ref(&a), s.clone()).unwrap();
        assert!(x1.contains(&Freq::from([1, 1])));
        for m1 in -9..=9 {
            for m2 in -9..=9 {
                let m = Freq::from([m1, m2]);
                let pre = [r(2 * m1, 1), r(m2, 2)];
                let pre_norm = pre.iter().map(|x| x.abs()).max().unwrap();
                let oracle = in_open_annulus(&s, &m) && pre_norm > s.recip() && pre_norm < s;
                assert_eq!(x1.contains(&m), oracle, "m = {m}");
            }
        }
    }

    #[test]
    fn x2_two_elements_contains_small_frequencies() {
        let rep = RepresentationData::standard_sl2();
        let tuple = [
            DiagonalElement::ratios(&[(2, 1), (1, 2)]).unwrap(),
            DiagonalElement::ratios(&[(8, 1), (1, 8)]).unwrap(),
        ];
        let x2 = XSet::new(XSetKind::X2, &rep, &tuple, r(3, 1)).unwrap();
        // summand scalings are diag(8, 1/8) and diag(4, 1/4)
        assert!(x2.contains(&Freq::from([2, 0])));
        assert!(!x2.contains(&Freq::from([0, 0])));
        assert!(!x2.contains(&Freq::from([0, 2])));
    }
}
