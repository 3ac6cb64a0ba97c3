//! Integer lattice primitives: frequency vectors in `Z^d` and square integer
//! matrices. Entries are arbitrary precision because dual orbits of hyperbolic
//! matrices grow exponentially.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An integer frequency vector `m ∈ Z^d`, indexing the character
/// `x ↦ e^{2πi m·x}` on the torus `T^d`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Freq(Vec<BigInt>);

impl Freq {
    pub fn new(coords: Vec<BigInt>) -> Self {
        Freq(coords)
    }

    pub fn zero(dim: usize) -> Self {
        Freq(vec![BigInt::zero(); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// Max-norm `max_i |m_i|`.
    pub fn max_norm(&self) -> BigInt {
        self.0
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    pub fn max_norm_rational(&self) -> BigRational {
        BigRational::from_integer(self.max_norm())
    }

    /// Coordinates as `i64`, if they all fit.
    pub fn to_i64s(&self) -> Option<Vec<i64>> {
        self.0.iter().map(ToPrimitive::to_i64).collect()
    }

    pub fn dot_i64(&self, other: &[i64]) -> BigInt {
        self.0
            .iter()
            .zip(other)
            .map(|(a, b)| a * BigInt::from(*b))
            .sum()
    }
}

impl From<Vec<i64>> for Freq {
    fn from(v: Vec<i64>) -> Self {
        Freq(v.into_iter().map(BigInt::from).collect())
    }
}

impl<const N: usize> From<[i64; N]> for Freq {
    fn from(v: [i64; N]) -> Self {
        Freq(v.iter().copied().map(BigInt::from).collect())
    }
}

impl<'a> Add<&'a Freq> for &'a Freq {
    type Output = Freq;
    fn add(self, rhs: &Freq) -> Freq {
        debug_assert_eq!(self.dim(), rhs.dim());
        Freq(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl<'a> Sub<&'a Freq> for &'a Freq {
    type Output = Freq;
    fn sub(self, rhs: &Freq) -> Freq {
        debug_assert_eq!(self.dim(), rhs.dim());
        Freq(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Freq {
    type Output = Freq;
    fn neg(self) -> Freq {
        Freq(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Debug for Freq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Freq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

// Coordinates serialize as JSON integers when they fit in i64 and as decimal
// strings otherwise.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum WireInt {
    Small(i64),
    Big(String),
}

impl Serialize for Freq {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let wire: Vec<WireInt> = self
            .0
            .iter()
            .map(|c| match c.to_i64() {
                Some(v) => WireInt::Small(v),
                None => WireInt::Big(c.to_string()),
            })
            .collect();
        wire.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Freq {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let wire = Vec::<WireInt>::deserialize(d)?;
        wire.into_iter()
            .map(|w| match w {
                WireInt::Small(v) => Ok(BigInt::from(v)),
                WireInt::Big(s) => s.parse::<BigInt>().map_err(serde::de::Error::custom),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Freq)
    }
}

/// Square integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    n: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![BigInt::zero(); n * n];
        for i in 0..n {
            data[i * n + i] = BigInt::one();
        }
        IntMatrix { n, data }
    }

    /// Builds from rows; panics if the rows are not square.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), n, "IntMatrix::from_rows: row length {} != {}", r.len(), n);
            data.extend(r.iter().copied().map(BigInt::from));
        }
        IntMatrix { n, data }
    }

    pub fn from_entries(n: usize, data: Vec<BigInt>) -> Self {
        assert_eq!(data.len(), n * n);
        IntMatrix { n, data }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.n + j] = v;
    }

    pub fn is_identity(&self) -> bool {
        *self == IntMatrix::identity(self.n)
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut data = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                data.push(self.get(i, j).clone());
            }
        }
        IntMatrix { n, data }
    }

    pub fn mul(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = BigInt::zero();
                for l in 0..n {
                    acc += self.get(i, l) * rhs.get(l, j);
                }
                data.push(acc);
            }
        }
        IntMatrix { n, data }
    }

    pub fn apply(&self, m: &Freq) -> Freq {
        assert_eq!(self.n, m.dim());
        let n = self.n;
        Freq::new(
            (0..n)
                .map(|i| (0..n).map(|j| self.get(i, j) * &m.coords()[j]).sum())
                .collect(),
        )
    }

    pub fn pow(&self, mut e: u32) -> IntMatrix {
        let mut base = self.clone();
        let mut acc = IntMatrix::identity(self.n);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        let n = self.n;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.data.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k * n + k].is_zero() {
                match (k + 1..n).find(|&r| !a[r * n + k].is_zero()) {
                    Some(r) => {
                        for c in 0..n {
                            a.swap(k * n + c, r * n + c);
                        }
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j]) / &prev;
                    a[i * n + j] = v;
                }
            }
            prev = a[k * n + k].clone();
        }
        sign * &a[n * n - 1]
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().abs().is_one()
    }

    /// Inverse over the integers; `None` unless `det = ±1`.
    pub fn inverse(&self) -> Option<IntMatrix> {
        if !self.is_unimodular() {
            return None;
        }
        let n = self.n;
        // Gauss-Jordan over the rationals; the result is integral for unimodular input.
        let mut a: Vec<BigRational> = self
            .data
            .iter()
            .cloned()
            .map(BigRational::from_integer)
            .collect();
        let mut inv: Vec<BigRational> = IntMatrix::identity(n)
            .data
            .into_iter()
            .map(BigRational::from_integer)
            .collect();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[r * n + col].is_zero())?;
            if pivot != col {
                for c in 0..n {
                    a.swap(col * n + c, pivot * n + c);
                    inv.swap(col * n + c, pivot * n + c);
                }
            }
            let p = a[col * n + col].clone();
            for c in 0..n {
                a[col * n + c] = &a[col * n + c] / &p;
                inv[col * n + c] = &inv[col * n + c] / &p;
            }
            for r in 0..n {
                if r == col || a[r * n + col].is_zero() {
                    continue;
                }
                let factor = a[r * n + col].clone();
                for c in 0..n {
                    let da = &factor * &a[col * n + c];
                    let di = &factor * &inv[col * n + c];
                    a[r * n + c] -= da;
                    inv[r * n + c] -= di;
                }
            }
        }
        let data = inv
            .into_iter()
            .map(|q| {
                debug_assert!(q.is_integer());
                q.to_integer()
            })
            .collect();
        Some(IntMatrix { n, data })
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| self.get(i, j).to_f64().unwrap_or(f64::NAN))
                    .collect()
            })
            .collect()
    }

    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).to_i64()).collect())
            .collect()
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, ";")?;
            }
            for j in 0..self.n {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_and_inverse_of_cat_map() {
        let m = IntMatrix::from_rows(&[[2, 1], [1, 1]]);
        assert_eq!(m.det(), BigInt::one());
        let inv = m.inverse().unwrap();
        assert_eq!(inv, IntMatrix::from_rows(&[[1, -1], [-1, 2]]));
        assert!(m.mul(&inv).is_identity());
    }

    #[test]
    fn det_with_pivoting() {
        let m = IntMatrix::from_rows(&[[0, 1, 0], [1, 0, 0], [0, 0, 1]]);
        assert_eq!(m.det(), BigInt::from(-1));
        assert_eq!(m.inverse().unwrap(), m);
        let s = IntMatrix::from_rows(&[[2, 0], [0, 1]]);
        assert!(s.inverse().is_none());
    }

    #[test]
    fn pow_matches_repeated_product() {
        let m = IntMatrix::from_rows(&[[2, 1, 1], [1, 1, 0], [0, 0, 1]]);
        let mut acc = IntMatrix::identity(3);
        for _ in 0..7 {
            acc = acc.mul(&m);
        }
        assert_eq!(m.pow(7), acc);
        assert!(m.pow(0).is_identity());
    }

    #[test]
    fn freq_serde_handles_big_coordinates() {
        let big = BigInt::from(i64::MAX) * BigInt::from(4);
        let f = Freq::new(vec![BigInt::from(-3), big.clone()]);
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, format!("[-3,\"{big}\"]"));
        let back: Freq = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
    }
}
