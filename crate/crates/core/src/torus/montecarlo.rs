use num_bigint::{BigInt, Sign};
use num_complex::Complex64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{AffineLatticeElement, TorusError};
use crate::lattice::IntMatrix;
use crate::specproj::TrigPoly;

/// Number of independent substreams; fixed so results do not depend on the
/// thread count.
pub const MC_SHARDS: u64 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: Complex64,
    /// `sqrt(Σ|z - z̄|² / ((N-1) N))`
    pub stderr: f64,
    pub samples: u64,
}

// x ∈ T represented as X / 2^64
fn wrap(x: &BigInt) -> u64 {
    let low = x.iter_u64_digits().next().unwrap_or(0);
    if x.sign() == Sign::Minus {
        low.wrapping_neg()
    } else {
        low
    }
}

struct Slot {
    // G^{-1} mod 2^64, row-major
    inv: [u64; 9],
    terms: Vec<([u64; 3], Complex64)>,
    // per-axis frequency offsets into character tables, when the box is small
    table: Option<Tables>,
}

struct Tables {
    radius: [i64; 3],
    terms: Vec<([usize; 3], Complex64)>,
}

const MAX_TABLE_RADIUS: i64 = 4096;

fn cis_turns(phase: u64) -> Complex64 {
    // centred in [-1/2, 1/2)
    let turns = phase as i64 as f64 * (1.0 / 18446744073709551616.0);
    let (s, c) = (std::f64::consts::TAU * turns).sin_cos();
    Complex64::new(c, s)
}

impl Slot {
    fn new(f: &TrigPoly, inv: &IntMatrix) -> Self {
        let mut m = [0u64; 9];
        for (i, e) in m.iter_mut().enumerate() {
            *e = wrap(inv.get(i / 3, i % 3));
        }
        let terms = f
            .terms()
            .map(|(k, c)| ([wrap(&k.coords()[0]), wrap(&k.coords()[1]), wrap(&k.coords()[2])], *c))
            .collect();
        Slot { inv: m, terms, table: Tables::new(f) }
    }

    fn eval(&self, x: &[u64; 3]) -> Complex64 {
        let mut y = [0u64; 3];
        for (r, yr) in y.iter_mut().enumerate() {
            *yr = (0..3).fold(0u64, |acc, j| acc.wrapping_add(self.inv[3 * r + j].wrapping_mul(x[j])));
        }
        if let Some(t) = &self.table {
            return t.eval(&y);
        }
        let mut acc = Complex64::zero();
        for (k, c) in &self.terms {
            let phase = (0..3).fold(0u64, |a, j| a.wrapping_add(k[j].wrapping_mul(y[j])));
            acc += c * cis_turns(phase);
        }
        acc
    }
}

impl Tables {
    fn new(f: &TrigPoly) -> Option<Self> {
        let mut radius = [0i64; 3];
        let mut small = Vec::with_capacity(f.len());
        for (k, c) in f.terms() {
            let mut idx = [0i64; 3];
            for j in 0..3 {
                idx[j] = i64::try_from(&k.coords()[j]).ok().filter(|v| v.abs() <= MAX_TABLE_RADIUS)?;
                radius[j] = radius[j].max(idx[j].abs());
            }
            small.push((idx, *c));
        }
        let width: i64 = radius.iter().map(|r| 2 * r + 1).sum();
        if width as usize >= f.len() {
            return None;
        }
        let terms = small
            .into_iter()
            .map(|(idx, c)| ([0, 1, 2].map(|j| (idx[j] + radius[j]) as usize), c))
            .collect();
        Some(Tables { radius, terms })
    }

    fn eval(&self, y: &[u64; 3]) -> Complex64 {
        let axes: [Vec<Complex64>; 3] = [0, 1, 2].map(|j| {
            let r = self.radius[j];
            (-r..=r).map(|k| cis_turns((k as u64).wrapping_mul(y[j]))).collect()
        });
        self.terms
            .iter()
            .map(|([a, b, c], coeff)| coeff * axes[0][*a] * axes[1][*b] * axes[2][*c])
            .sum()
    }
}

#[derive(Clone, Copy, Default)]
struct Welford {
    n: u64,
    mean: Complex64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, z: Complex64) {
        self.n += 1;
        let delta = z - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += (delta.conj() * (z - self.mean)).re;
    }

    fn merge(self, other: Welford) -> Welford {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let (na, nb) = (self.n as f64, other.n as f64);
        Welford {
            n,
            mean: self.mean + delta * (nb / n as f64),
            m2: self.m2 + other.m2 + delta.norm_sqr() * na * nb / n as f64,
        }
    }
}

/// Averages `f₀(x) Π f_i(g_i^{-1} x)` over `n` uniform points. Points are
/// fixed-point in `(2^{-64} Z / Z)³`, so `g^{-1} x mod 1` is computed exactly.
pub fn mc_multicorrelation(
    fs: &[TrigPoly],
    gs: &[AffineLatticeElement],
    n: u64,
    seed: u64,
) -> Result<McEstimate, TorusError> {
    if n < 2 {
        return Err(TorusError::TooFewSamples(n));
    }
    if fs.len() != gs.len() + 1 {
        return Err(TorusError::Arity { expected: gs.len() + 1, elements: gs.len(), found: fs.len() });
    }
    if let Some(f) = fs.iter().find(|f| f.dim() != 3) {
        return Err(TorusError::Dimension(f.dim()));
    }
    let mut slots = vec![Slot::new(&fs[0], &IntMatrix::identity(3))];
    for (f, g) in fs[1..].iter().zip(gs) {
        slots.push(Slot::new(f, &g.inverse_matrix()));
    }
    let partials: Vec<Welford> = (0..MC_SHARDS)
        .into_par_iter()
        .map(|shard| {
            let start = n * shard / MC_SHARDS;
            let end = n * (shard + 1) / MC_SHARDS;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(shard);
            let mut acc = Welford::default();
            for _ in start..end {
                let x: [u64; 3] = [rng.random(), rng.random(), rng.random()];
                let mut z = Complex64::new(1.0, 0.0);
                for slot in &slots {
                    z *= slot.eval(&x);
                    if z.is_zero() {
                        break;
                    }
                }
                acc.push(z);
            }
            acc
        })
        .collect();
    let total = partials.into_iter().fold(Welford::default(), Welford::merge);
    let variance = total.m2 / (total.n - 1) as f64;
    Ok(McEstimate {
        estimate: total.mean,
        stderr: (variance / total.n as f64).sqrt(),
        samples: total.n,
    })
}
