use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::AffineLatticeElement;
use crate::repdata::DiagonalElement;

/// Singular values of the `SL(2)` part, standing in for the `D⁺` component
/// of `g = k₁ a k₂`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CartanProxy {
    pub sigma1: f64,
    pub sigma2: f64,
}

impl CartanProxy {
    /// `diag(σ₁, σ₁^{-1})`.
    pub fn element(&self) -> DiagonalElement {
        DiagonalElement::sl2(self.sigma1)
    }
}

/// `σ₁ = sqrt(λ_max(AᵀA))`. With `t = tr(AᵀA)` and `det(AᵀA) = 1` the
/// eigenvalues are `(t ± sqrt(t² - 4))/2`; `t² - 4` is formed exactly and
/// the small root is taken as `2 / (t + sqrt(t² - 4))`.
pub fn cartan_proxy(g: &AffineLatticeElement) -> CartanProxy {
    let [[a, b], [c, d]] = g.a();
    let t: BigInt = &a * &a + &b * &b + &c * &c + &d * &d;
    let two = BigInt::from(2);
    let disc: BigInt = (&t - &two) * (&t + &two);
    let t = t.to_f64().unwrap_or(f64::INFINITY);
    let root = disc.to_f64().unwrap_or(f64::INFINITY).sqrt();
    let big = (t + root) / 2.0;
    let small = 2.0 / (t + root);
    CartanProxy { sigma1: big.sqrt(), sigma2: small.sqrt() }
}
