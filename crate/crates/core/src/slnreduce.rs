//! Building blocks for reducing `SL(n)` correlations to `SL(2) ⋉ k²`:
//! embedding a copy of the semidirect product, splitting a diagonal element
//! as `â·a′` with `a′` centralizing the embedded rotations, choosing a
//! neighbouring root, and decomposing along a root.
//!
//! Indices are 0-based throughout.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::repdata::{DiagonalElement, RepError, WeightVector};
use crate::torus::AffineLatticeElement;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReduceError {
    #[error("indices (j, l) = ({j}, {l}) invalid for n = {n}: need j < l < n")]
    IndexOutOfRange { n: usize, j: usize, l: usize },
    #[error("SL({0}) has rank {r}; the reduction needs n >= 3", r = .0.saturating_sub(1))]
    RankTooSmall(usize),
    #[error("simple root index {index} out of range for SL({n})")]
    SimpleRootOutOfRange { n: usize, index: usize },
    #[error("{0:?} is not a root e_j - e_l")]
    NotARoot(WeightVector),
    #[error("a_j a_l = {0} is not a perfect square; use floating mode")]
    NotPerfectSquare(String),
    #[error("matrix has determinant {0}, not 1")]
    NotSpecialLinear(String),
    #[error(transparent)]
    Rep(#[from] RepError),
}

/// Dense square matrix over `Q`, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    n: usize,
    data: Vec<BigRational>,
}

impl RatMatrix {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![BigRational::zero(); n * n];
        for i in 0..n {
            data[i * n + i] = BigRational::one();
        }
        RatMatrix { n, data }
    }

    pub fn diagonal(entries: &[BigRational]) -> Self {
        let mut m = Self::identity(entries.len());
        for (i, e) in entries.iter().enumerate() {
            m.set(i, i, e.clone());
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.data[i * self.n + j] = v;
    }

    pub fn mul(&self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = BigRational::zero();
                for l in 0..n {
                    let a = self.get(i, l);
                    if !a.is_zero() {
                        acc += a * rhs.get(l, j);
                    }
                }
                data.push(acc);
            }
        }
        RatMatrix { n, data }
    }

    pub fn det(&self) -> BigRational {
        let n = self.n;
        let mut m = self.data.clone();
        let mut det = BigRational::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !m[r * n + col].is_zero()) else {
                return BigRational::zero();
            };
            if p != col {
                for c in 0..n {
                    m.swap(p * n + c, col * n + c);
                }
                det = -det;
            }
            let pivot = m[col * n + col].clone();
            det *= &pivot;
            for r in col + 1..n {
                let factor = &m[r * n + col] / &pivot;
                if factor.is_zero() {
                    continue;
                }
                for c in col..n {
                    let v = &factor * &m[col * n + c];
                    m[r * n + c] -= v;
                }
            }
        }
        det
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.n)
            .map(|i| {
                let r: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
                format!("[{}]", r.join(","))
            })
            .collect();
        write!(f, "[{}]", rows.join(","))
    }
}

/// `((a, b; c, d), (x, y))` in `SL(2, Q) ⋉ Q²`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sl2Affine {
    pub a: [[BigRational; 2]; 2],
    pub v: [BigRational; 2],
}

impl Sl2Affine {
    pub fn new(a: [[BigRational; 2]; 2], v: [BigRational; 2]) -> Result<Self, ReduceError> {
        let det = &a[0][0] * &a[1][1] - &a[0][1] * &a[1][0];
        if !det.is_one() {
            return Err(ReduceError::NotSpecialLinear(det.to_string()));
        }
        Ok(Sl2Affine { a, v })
    }

    pub fn identity() -> Self {
        let (o, z) = (BigRational::one(), BigRational::zero());
        Sl2Affine { a: [[o.clone(), z.clone()], [z.clone(), o]], v: [z.clone(), z] }
    }

    /// The rotation `((0, -1; 1, 0), 0)` generating the embedded compact part.
    pub fn rotation() -> Self {
        let (o, z) = (BigRational::one(), BigRational::zero());
        Sl2Affine { a: [[z.clone(), -o.clone()], [o, z.clone()]], v: [z.clone(), z] }
    }

    /// `(A, v)(B, w) = (AB, Aw + v)`.
    pub fn compose(&self, other: &Self) -> Self {
        let (a, b) = (&self.a, &other.a);
        let m = |i: usize, j: usize| &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j];
        let t = |i: usize| &a[i][0] * &other.v[0] + &a[i][1] * &other.v[1] + &self.v[i];
        Sl2Affine { a: [[m(0, 0), m(0, 1)], [m(1, 0), m(1, 1)]], v: [t(0), t(1)] }
    }
}

impl From<&AffineLatticeElement> for Sl2Affine {
    fn from(g: &AffineLatticeElement) -> Self {
        let r = |x: BigInt| BigRational::from_integer(x);
        let [[a, b], [c, d]] = g.a();
        let [x, y] = g.v();
        Sl2Affine { a: [[r(a), r(b)], [r(c), r(d)]], v: [r(x), r(y)] }
    }
}

/// Column holding the translation part, if one exists.
pub fn translation_column(n: usize, l: usize) -> Option<usize> {
    (l + 1 < n).then_some(l + 1)
}

/// Places `A` on rows/columns `{j, l}` and the translation in column `l + 1`.
/// When `l = n - 1` there is no such column: only `A` is embedded and a
/// warning is logged.
pub fn embed_sl2_v(n: usize, j: usize, l: usize, g: &Sl2Affine) -> Result<RatMatrix, ReduceError> {
    if !(j < l && l < n) {
        return Err(ReduceError::IndexOutOfRange { n, j, l });
    }
    let mut m = RatMatrix::identity(n);
    let idx = [j, l];
    for (r, &row) in idx.iter().enumerate() {
        for (c, &col) in idx.iter().enumerate() {
            m.set(row, col, g.a[r][c].clone());
        }
    }
    match translation_column(n, l) {
        Some(t) => {
            m.set(j, t, g.v[0].clone());
            m.set(l, t, g.v[1].clone());
        }
        None if !(g.v[0].is_zero() && g.v[1].is_zero()) => {
            log::warn!("no column after l = {l} in SL({n}); translation part dropped");
        }
        None => {}
    }
    Ok(m)
}

/// Half-unit shift applied in q-exponent mode when `e_j + e_l` is odd: the
/// stored `â` carries `+1/2` at `j` and `-1/2` at `l` relative to the ideal
/// half-integer split, and `a′` the opposite, so all stored exponents stay
/// integers while `â·a′ = a` still holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityShift {
    pub j: usize,
    pub l: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitMode {
    Archimedean,
    Exact,
    QExponent,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagonalSplit {
    pub schema_version: u32,
    pub input: DiagonalElement,
    pub j: usize,
    pub l: usize,
    pub mode: SplitMode,
    /// `b` at `j`, `b^{-1}` at `l`, `1` elsewhere.
    pub a_hat: DiagonalElement,
    /// `c` at `j` and `l`, the input entries elsewhere.
    pub a_prime: DiagonalElement,
    pub parity_compensation: Option<ParityShift>,
}

impl DiagonalSplit {
    pub fn product(&self) -> Result<DiagonalElement, RepError> {
        self.a_hat.mul(&self.a_prime)
    }

    /// Exponents of the ideal split, doubled so half-integers are exact:
    /// `(2·â, 2·a′)`. Only meaningful in q-exponent mode.
    pub fn ideal_doubled_exponents(&self) -> Option<(Vec<i64>, Vec<i64>)> {
        let (DiagonalElement::QPower { exponents: h, .. }, DiagonalElement::QPower { exponents: p, .. }) =
            (&self.a_hat, &self.a_prime)
        else {
            return None;
        };
        let mut h2: Vec<i64> = h.iter().map(|e| 2 * e).collect();
        let mut p2: Vec<i64> = p.iter().map(|e| 2 * e).collect();
        if let Some(ParityShift { j, l }) = self.parity_compensation {
            h2[j] -= 1;
            h2[l] += 1;
            p2[j] += 1;
            p2[l] -= 1;
        }
        Some((h2, p2))
    }
}

fn check_pair(n: usize, j: usize, l: usize) -> Result<(), ReduceError> {
    if !(j < l && l < n) {
        return Err(ReduceError::IndexOutOfRange { n, j, l });
    }
    Ok(())
}

fn exact_sqrt(x: &BigRational) -> Option<BigRational> {
    if x.is_negative() {
        return None;
    }
    let (n, d) = (x.numer(), x.denom());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    (&rn * &rn == *n && &rd * &rd == *d).then(|| BigRational::new(rn, rd))
}

/// `c = √(a_j a_l)`, `b = a_j / c`, `â = diag(b at j, 1/b at l)`,
/// `a′ = diag(c at j and l, a elsewhere)`.
pub fn split_diagonal(a: &DiagonalElement, j: usize, l: usize) -> Result<DiagonalSplit, ReduceError> {
    let n = a.dim();
    check_pair(n, j, l)?;
    let (mode, a_hat, a_prime, parity) = match a {
        DiagonalElement::Real(v) => {
            let c = v[j].sqrt() * v[l].sqrt();
            let b = v[j] / c;
            let mut hat = vec![1.0; n];
            hat[j] = b;
            hat[l] = 1.0 / b;
            let mut prime = v.clone();
            prime[j] = c;
            prime[l] = c;
            (SplitMode::Archimedean, DiagonalElement::Real(hat), DiagonalElement::Real(prime), None)
        }
        DiagonalElement::Rational(v) => {
            let prod = &v[j] * &v[l];
            let c = exact_sqrt(&prod).ok_or_else(|| ReduceError::NotPerfectSquare(prod.to_string()))?;
            let b = &v[j] / &c;
            let mut hat = vec![BigRational::one(); n];
            hat[l] = b.recip();
            hat[j] = b;
            let mut prime = v.clone();
            prime[j] = c.clone();
            prime[l] = c;
            (SplitMode::Exact, DiagonalElement::rational(hat)?, DiagonalElement::rational(prime)?, None)
        }
        DiagonalElement::QPower { exponents: e, residue } => {
            let sum = e[j] + e[l];
            let c = sum.div_euclid(2);
            let odd = sum.rem_euclid(2) == 1;
            // odd: a′ gets (c, c + 1), â absorbs the remaining half-units
            let (pj, pl) = if odd { (c, c + 1) } else { (c, c) };
            let mut hat = vec![0; n];
            hat[j] = e[j] - pj;
            hat[l] = e[l] - pl;
            let mut prime = e.clone();
            prime[j] = pj;
            prime[l] = pl;
            (
                SplitMode::QExponent,
                DiagonalElement::q_power(hat, *residue)?,
                DiagonalElement::q_power(prime, *residue)?,
                odd.then_some(ParityShift { j, l }),
            )
        }
    };
    Ok(DiagonalSplit {
        schema_version: 1,
        input: a.clone(),
        j,
        l,
        mode,
        a_hat,
        a_prime,
        parity_compensation: parity,
    })
}

/// For the simple root `ω = e_i - e_{i+1}` of type `A_{n-1}`, the adjacent
/// simple root `ω′`; together they span an `A₂` subsystem. The lower-index
/// neighbour is preferred. Only type A is handled.
pub fn select_root_pair(n: usize, omega: usize) -> Result<(usize, usize), ReduceError> {
    if n < 3 {
        return Err(ReduceError::RankTooSmall(n));
    }
    if omega + 1 >= n {
        return Err(ReduceError::SimpleRootOutOfRange { n, index: omega });
    }
    let other = if omega > 0 { omega - 1 } else { omega + 1 };
    Ok((omega, other))
}

/// `(j, l)` with `ω = e_j - e_l`.
pub fn root_indices(omega: &WeightVector) -> Result<(usize, usize), ReduceError> {
    let e = omega.exponents();
    let plus: Vec<usize> = (0..e.len()).filter(|&i| e[i] == 1).collect();
    let minus: Vec<usize> = (0..e.len()).filter(|&i| e[i] == -1).collect();
    let others = e.iter().filter(|&&x| x != 0 && x != 1 && x != -1).count();
    match (plus.as_slice(), minus.as_slice(), others) {
        ([p], [m], 0) => Ok((*p, *m)),
        _ => Err(ReduceError::NotARoot(omega.clone())),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusDecomposition {
    /// Part on which `ω` is trivial.
    pub kernel: DiagonalElement,
    /// `diag(t at j, t^{-1} at l)` with `t = √(a_j / a_l)`.
    pub d_omega: DiagonalElement,
    pub parity_compensation: Option<ParityShift>,
}

/// `a = kernel · d_omega` with `d_omega` in the one-parameter subgroup of
/// `ω = e_j - e_l`. For `j > l` the roles of the two slots swap.
pub fn decompose_torus(a: &DiagonalElement, omega: &WeightVector) -> Result<TorusDecomposition, ReduceError> {
    if omega.dim() != a.dim() {
        return Err(RepError::DimensionMismatch { expected: a.dim(), found: omega.dim() }.into());
    }
    let (p, m) = root_indices(omega)?;
    let split = split_diagonal(a, p.min(m), p.max(m))?;
    Ok(TorusDecomposition {
        kernel: split.a_prime,
        d_omega: split.a_hat,
        parity_compensation: split.parity_compensation,
    })
}
