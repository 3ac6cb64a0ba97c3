use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::TorusError;
use crate::lattice::{Freq, IntMatrix};

/// An element `(A, v)` of `SL(2,Z) ⋉ Z²`, stored through its embedding
/// `[[A, v], [0, 1]]` in `SL(3,Z)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AffineLatticeElement {
    embedding: IntMatrix,
    // (G^{-1})^T, the dual action on frequencies
    dual: IntMatrix,
}

impl AffineLatticeElement {
    pub fn new(a: [[i64; 2]; 2], v: [i64; 2]) -> Result<Self, TorusError> {
        Self::from_embedding(IntMatrix::from_rows(&[
            [a[0][0], a[0][1], v[0]],
            [a[1][0], a[1][1], v[1]],
            [0, 0, 1],
        ]))
    }

    pub fn linear(a: [[i64; 2]; 2]) -> Result<Self, TorusError> {
        Self::new(a, [0, 0])
    }

    pub fn translation(v: [i64; 2]) -> Self {
        Self::new([[1, 0], [0, 1]], v).expect("translations are unimodular")
    }

    pub fn identity() -> Self {
        Self::translation([0, 0])
    }

    pub fn from_embedding(g: IntMatrix) -> Result<Self, TorusError> {
        if g.size() != 3 {
            return Err(TorusError::NotAffine(format!("expected a 3x3 matrix, got {}x{}", g.size(), g.size())));
        }
        let last_row_ok = g.get(2, 0).is_zero() && g.get(2, 1).is_zero() && g.get(2, 2).is_one();
        if !last_row_ok {
            return Err(TorusError::NotAffine(format!("last row must be (0,0,1): {g:?}")));
        }
        if !g.det().is_one() {
            return Err(TorusError::NotAffine(format!("det A must be 1: {g:?}")));
        }
        let dual = g.inverse().expect("det 1").transpose();
        Ok(AffineLatticeElement { embedding: g, dual })
    }

    pub fn embedding(&self) -> &IntMatrix {
        &self.embedding
    }

    /// The `SL(2,Z)` part.
    pub fn a(&self) -> [[BigInt; 2]; 2] {
        let e = |i, j| self.embedding.get(i, j).clone();
        [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
    }

    pub fn v(&self) -> [BigInt; 2] {
        [self.embedding.get(0, 2).clone(), self.embedding.get(1, 2).clone()]
    }

    pub fn linear_part(&self) -> IntMatrix {
        let [[a, b], [c, d]] = self.a();
        IntMatrix::from_entries(2, vec![a, b, c, d])
    }

    /// `(A, v)(B, w) = (AB, Aw + v)`.
    pub fn compose(&self, other: &Self) -> Self {
        AffineLatticeElement {
            embedding: self.embedding.mul(&other.embedding),
            dual: self.dual.mul(&other.dual),
        }
    }

    pub fn invert(&self) -> Self {
        AffineLatticeElement {
            embedding: self.dual.transpose(),
            dual: self.embedding.transpose(),
        }
    }

    pub fn pow(&self, n: i64) -> Self {
        let base = if n < 0 { self.invert() } else { self.clone() };
        let e = u32::try_from(n.unsigned_abs()).expect("power fits in u32");
        AffineLatticeElement {
            embedding: base.embedding.pow(e),
            dual: base.dual.pow(e),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.embedding.is_identity()
    }

    pub fn trace(&self) -> BigInt {
        self.embedding.get(0, 0) + self.embedding.get(1, 1)
    }

    /// `|tr A| > 2`.
    pub fn is_hyperbolic(&self) -> bool {
        self.trace().abs() > BigInt::from(2)
    }

    /// `m ↦ ρ*(g) m = (G^{-1})^T m`, so that `g·e_m = e_{ρ*(g) m}`.
    pub fn frequency_action(&self, m: &Freq) -> Result<Freq, TorusError> {
        if m.dim() != 3 {
            return Err(TorusError::Dimension(m.dim()));
        }
        Ok(self.dual.apply(m))
    }

    pub fn dual_matrix(&self) -> &IntMatrix {
        &self.dual
    }

    pub fn inverse_matrix(&self) -> IntMatrix {
        self.dual.transpose()
    }
}

impl fmt::Debug for AffineLatticeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [[a, b], [c, d]] = self.a();
        let [v0, v1] = self.v();
        write!(f, "([[{a},{b}],[{c},{d}]], ({v0},{v1}))")
    }
}

impl fmt::Display for AffineLatticeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

fn int_json(x: &BigInt) -> serde_json::Value {
    match i64::try_from(x) {
        Ok(v) => serde_json::Value::from(v),
        Err(_) => serde_json::Value::from(x.to_string()),
    }
}

impl Serialize for AffineLatticeElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let [[a, b], [c, d]] = self.a();
        let [v0, v1] = self.v();
        serde_json::json!({
            "a": [[int_json(&a), int_json(&b)], [int_json(&c), int_json(&d)]],
            "v": [int_json(&v0), int_json(&v1)],
        })
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for AffineLatticeElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Plain {
            a: [[i64; 2]; 2],
            #[serde(default)]
            v: [i64; 2],
        }
        let p = Plain::deserialize(d)?;
        AffineLatticeElement::new(p.a, p.v).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cat() -> AffineLatticeElement {
        AffineLatticeElement::linear([[2, 1], [1, 1]]).unwrap()
    }

    #[test]
    fn semidirect_law() {
        let t = |v| AffineLatticeElement::translation(v);
        assert_eq!(t([1, 2]).compose(&t([3, -1])), t([4, 1]));
        let g = cat().compose(&t([1, 0]));
        assert_eq!(g, AffineLatticeElement::new([[2, 1], [1, 1]], [2, 1]).unwrap());
        let h = AffineLatticeElement::new([[2, 1], [1, 1]], [1, 0]).unwrap();
        assert!(h.compose(&h.invert()).is_identity());
        assert!(h.invert().compose(&h).is_identity());
        assert_eq!(h.invert(), AffineLatticeElement::new([[1, -1], [-1, 2]], [-1, 1]).unwrap());
    }

    #[test]
    fn rejects_non_unimodular() {
        assert!(AffineLatticeElement::linear([[2, 0], [0, 1]]).is_err());
        assert!(AffineLatticeElement::linear([[0, 1], [1, 0]]).is_err());
    }

    #[test]
    fn frequency_action_examples() {
        let g = cat();
        assert_eq!(g.frequency_action(&Freq::from([1, 0, 0])).unwrap(), Freq::from([1, -1, 0]));
        let h = AffineLatticeElement::new([[3, 2], [1, 1]], [5, -7]).unwrap();
        assert_eq!(h.frequency_action(&Freq::from([0, 0, 1])).unwrap(), Freq::from([0, 0, 1]));
        let m = Freq::from([4, -2, 9]);
        assert_eq!(AffineLatticeElement::identity().frequency_action(&m).unwrap(), m);
        assert!(g.frequency_action(&Freq::from([1, 0])).is_err());
    }

    #[test]
    fn powers() {
        let h = AffineLatticeElement::new([[2, 1], [1, 1]], [1, 0]).unwrap();
        assert_eq!(h.pow(3), h.compose(&h).compose(&h));
        assert!(h.pow(-2).compose(&h.pow(2)).is_identity());
        assert!(h.pow(0).is_identity());
        assert!(h.is_hyperbolic());
        assert!(!AffineLatticeElement::linear([[1, 1], [0, 1]]).unwrap().is_hyperbolic());
    }

    #[test]
    fn serde_round_trip() {
        let h = AffineLatticeElement::new([[2, 1], [1, 1]], [1, 0]).unwrap();
        let s = serde_json::to_string(&h).unwrap();
        assert_eq!(s, r#"{"a":[[2,1],[1,1]],"v":[1,0]}"#);
        let back: AffineLatticeElement = serde_json::from_str(&s).unwrap();
        assert_eq!(back, h);
    }
}
