use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::lattice::Freq;
use crate::specproj::TrigPoly;

/// Named band-limited test functions on `T³`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// `Σ (1 + ‖m‖∞)^{-2} e_m` over `0 < ‖(m₁, m₂)‖∞ ≤ 12`, `m₃ = 0`.
    SmoothBox,
    /// `2cos(2π x₁) + 2cos(2π x₂)`.
    Cosines,
    /// `e_{(1,0,0)} + e_{(0,1,0)} + e_{(1,1,1)}`.
    Sparse,
}

impl Preset {
    pub fn build(self) -> TrigPoly {
        match self {
            Preset::SmoothBox => smooth_box(12, 0, 2.0),
            Preset::Cosines => from_list(&[[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0]]),
            Preset::Sparse => from_list(&[[1, 0, 0], [0, 1, 0], [1, 1, 1]]),
        }
    }
}

fn from_list(ms: &[[i64; 3]]) -> TrigPoly {
    TrigPoly::from_terms(3, ms.iter().map(|m| (Freq::from(*m), Complex64::new(1.0, 0.0)))).expect("dim 3")
}

/// `Σ (1 + ‖m‖∞)^{-decay} e_m` over the box `‖(m₁, m₂)‖∞ ≤ radius`,
/// `|m₃| ≤ radius3`, skipping the invariant line `m₁ = m₂ = 0`.
pub fn smooth_box(radius: i64, radius3: i64, decay: f64) -> TrigPoly {
    let mut terms = Vec::new();
    for m1 in -radius..=radius {
        for m2 in -radius..=radius {
            if m1 == 0 && m2 == 0 {
                continue;
            }
            for m3 in -radius3..=radius3 {
                let norm = m1.abs().max(m2.abs()).max(m3.abs()) as f64;
                terms.push((Freq::from([m1, m2, m3]), Complex64::new((1.0 + norm).powf(-decay), 0.0)));
            }
        }
    }
    TrigPoly::from_terms(3, terms).expect("dim 3")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_box_shape() {
        let f = Preset::SmoothBox.build();
        assert_eq!(f.len(), 25 * 25 - 1);
        assert_eq!(f.coeff(&Freq::from([12, -3, 0])), Complex64::new(1.0 / 169.0, 0.0));
        assert_eq!(f.mean(), Complex64::new(0.0, 0.0));
        assert_eq!(smooth_box(1, 1, 1.0).len(), 8 * 3);
    }

    #[test]
    fn presets_are_real_valued() {
        for p in [Preset::SmoothBox, Preset::Cosines] {
            let f = p.build();
            for (m, c) in f.terms() {
                let neg = &Freq::zero(3) - m;
                assert_eq!(f.coeff(&neg), c.conj());
            }
        }
    }
}
