use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{AffineLatticeElement, TorusError};
use crate::lattice::{Freq, IntMatrix};
use crate::specproj::TrigPoly;

/// Largest product of support sizes, excluding the largest factor, handled
/// by one chain before the factors are split into two halves matched
/// against each other.
pub const DEFAULT_CONVOLUTION_BUDGET: u128 = 1 << 24;

/// Rejects any frequency on the invariant line, reporting the first one.
pub fn check_zero_mean(fs: &[TrigPoly]) -> Result<(), TorusError> {
    for (slot, f) in fs.iter().enumerate() {
        if f.dim() != 3 {
            return Err(TorusError::Dimension(f.dim()));
        }
        if let Some(m) = f.support().find(|m| m.coords()[0].is_zero() && m.coords()[1].is_zero()) {
            return Err(TorusError::InvariantFrequency { slot, witness: m.clone() });
        }
    }
    Ok(())
}

fn check_arity(fs: &[TrigPoly], gs: &[AffineLatticeElement]) -> Result<(), TorusError> {
    if fs.len() != gs.len() + 1 || gs.is_empty() {
        return Err(TorusError::Arity { expected: gs.len() + 1, elements: gs.len(), found: fs.len() });
    }
    Ok(())
}

/// `∫ f₀ · (g₁·f₁) ⋯ (g_k·f_k) dμ`, i.e. the sum of `Π c_i(m_i)` over tuples
/// with `m₀ + Σ ρ*(g_i) m_i = 0`.
pub fn exact_multicorrelation(fs: &[TrigPoly], gs: &[AffineLatticeElement]) -> Result<Complex64, TorusError> {
    exact_multicorrelation_with(fs, gs, DEFAULT_CONVOLUTION_BUDGET)
}

pub fn exact_multicorrelation_with(
    fs: &[TrigPoly],
    gs: &[AffineLatticeElement],
    budget: u128,
) -> Result<Complex64, TorusError> {
    check_arity(fs, gs)?;
    check_zero_mean(fs)?;
    if fs.iter().any(TrigPoly::is_empty) {
        return Ok(Complex64::zero());
    }
    let mut moved = vec![fs[0].clone()];
    for (f, g) in fs[1..].iter().zip(gs) {
        moved.push(f.transform_frequencies(g.dual_matrix())?);
    }
    // stable: ties keep slot order
    moved.sort_by_key(TrigPoly::len);
    let work: u128 = moved[..moved.len() - 1].iter().map(|f| f.len() as u128).product();
    if work <= budget || moved.len() < 3 {
        let last = moved.pop().expect("at least two factors");
        if moved.len() == 1 {
            return Ok(pair_constant_term(&moved[0], &last));
        }
        let second = moved.pop().expect("at least three factors");
        return Ok(triple_constant_term(&convolve_all(moved)?, &second, &last));
    }
    let (left, right) = balanced_halves(moved);
    Ok(pair_constant_term(&convolve_all(left)?, &convolve_all(right)?))
}

fn convolve_all(mut fs: Vec<TrigPoly>) -> Result<TrigPoly, TorusError> {
    fs.sort_by_key(TrigPoly::len);
    let mut iter = fs.into_iter();
    let mut acc = iter.next().expect("nonempty group");
    for f in iter {
        acc = acc.multiply(&f)?;
    }
    Ok(acc)
}

fn balanced_halves(mut fs: Vec<TrigPoly>) -> (Vec<TrigPoly>, Vec<TrigPoly>) {
    fs.sort_by_key(|f| std::cmp::Reverse(f.len()));
    let (mut a, mut b) = (Vec::new(), Vec::new());
    let (mut pa, mut pb) = (1u128, 1u128);
    for f in fs {
        if pa <= pb {
            pa = pa.saturating_mul(f.len() as u128);
            a.push(f);
        } else {
            pb = pb.saturating_mul(f.len() as u128);
            b.push(f);
        }
    }
    (a, b)
}

type Key = [i64; 3];

// frequencies small enough that sums of three stay far from overflow
fn small_terms(f: &TrigPoly) -> Option<Vec<(Key, Complex64)>> {
    const LIMIT: i64 = 1 << 60;
    f.terms()
        .map(|(m, c)| {
            let v = m.to_i64s()?;
            v.iter().all(|x| x.abs() < LIMIT).then(|| ([v[0], v[1], v[2]], *c))
        })
        .collect()
}

fn lookup_table(f: &[(Key, Complex64)]) -> HashMap<Key, Complex64> {
    f.iter().copied().collect()
}

// Σ_m P(m) Q(-m), iterating the smaller side in frequency order
fn pair_constant_term(p: &TrigPoly, q: &TrigPoly) -> Complex64 {
    let (small, large) = if p.len() <= q.len() { (p, q) } else { (q, p) };
    let mut acc = Complex64::zero();
    if let (Some(s), Some(l)) = (small_terms(small), small_terms(large)) {
        let table = lookup_table(&l);
        for (m, c) in s {
            if let Some(other) = table.get(&[-m[0], -m[1], -m[2]]) {
                acc += c * other;
            }
        }
        return acc;
    }
    for (m, c) in small.terms() {
        let other = large.coeff(&-m);
        if !other.is_zero() {
            acc += c * other;
        }
    }
    acc
}

// Σ_{m,n} P(m) F(n) L(-m-n)
fn triple_constant_term(p: &TrigPoly, f: &TrigPoly, l: &TrigPoly) -> Complex64 {
    let mut acc = Complex64::zero();
    if let (Some(ps), Some(fs), Some(ls)) = (small_terms(p), small_terms(f), small_terms(l)) {
        let table = lookup_table(&ls);
        for (m, a) in &ps {
            for (n, b) in &fs {
                if let Some(c) = table.get(&[-m[0] - n[0], -m[1] - n[1], -m[2] - n[2]]) {
                    acc += a * b * c;
                }
            }
        }
        return acc;
    }
    for (m, a) in p.terms() {
        for (n, b) in f.terms() {
            let c = l.coeff(&-&(m + n));
            if !c.is_zero() {
                acc += a * b * c;
            }
        }
    }
    acc
}

/// `dim span{ k·f : k ∈ K }` for `K` the four rotations `[[0,-1],[1,0]]^j`
/// acting linearly on the first two coordinates.
pub fn k_orbit_dimension(f: &TrigPoly) -> Result<usize, TorusError> {
    check_zero_mean(std::slice::from_ref(f))?;
    if f.is_empty() {
        return Ok(0);
    }
    let rot = AffineLatticeElement::linear([[0, -1], [1, 0]]).expect("rotation is in SL(2,Z)");
    let mut orbit = vec![f.clone()];
    for j in 1..4 {
        orbit.push(f.transform_frequencies(rot.pow(j).dual_matrix())?);
    }
    let support: Vec<Freq> = orbit
        .iter()
        .flat_map(|g| g.support().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut rows: Vec<Vec<Complex64>> =
        orbit.iter().map(|g| support.iter().map(|m| g.coeff(m)).collect()).collect();
    let scale = f.max_abs_coeff();
    Ok(complex_rank(&mut rows, 1e-9 * scale))
}

fn complex_rank(rows: &mut [Vec<Complex64>], tol: f64) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        if rank == rows.len() {
            break;
        }
        let pivot = (rank..rows.len())
            .max_by(|&a, &b| rows[a][col].norm().total_cmp(&rows[b][col].norm()))
            .expect("nonempty range");
        if rows[pivot][col].norm() <= tol {
            continue;
        }
        rows.swap(rank, pivot);
        let p = rows[rank][col];
        for r in rank + 1..rows.len() {
            let factor = rows[r][col] / p;
            for c in col..ncols {
                let v = rows[rank][c];
                rows[r][c] -= factor * v;
            }
        }
        rank += 1;
    }
    rank
}

fn planar(m: &Freq) -> [BigInt; 2] {
    [m.coords()[0].clone(), m.coords()[1].clone()]
}

/// Smallest `n₀` such that no pair `(m₀, m₁)` of support frequencies has
/// `m₀ + ρ*(Mⁿ) m₁ = 0` for any `n ≥ n₀`; hence `∫ f₀ · Mⁿ·f₁ = 0` for all
/// such `n`. Powers are enumerated exactly until the expanding component of
/// every orbit certifiably exceeds the support radius of `f₀`.
pub fn support_escape_power(f0: &TrigPoly, f1: &TrigPoly, m: &AffineLatticeElement) -> Result<u32, TorusError> {
    const MAX_POWER: u32 = 10_000;
    check_zero_mean(&[f0.clone(), f1.clone()])?;
    if !m.is_hyperbolic() {
        return Err(TorusError::NotAffine(format!("{m} is not hyperbolic")));
    }
    let targets: BTreeSet<Freq> = f0.support().map(|x| -x).collect();
    let radius = f0
        .support()
        .map(|x| planar(x).iter().map(BigInt::abs).max().unwrap_or_default())
        .max()
        .unwrap_or_default()
        .to_f64()
        .unwrap_or(f64::INFINITY);
    let dual = m.dual_matrix();
    let b = dual_planar(dual);
    let (mu, e_plus, e_minus) = expanding_basis(&b);
    let mut threshold = 0;
    for m1 in f1.support() {
        let p = planar(m1);
        let p = [p[0].to_f64().unwrap_or(f64::NAN), p[1].to_f64().unwrap_or(f64::NAN)];
        // p = α e₊ + β e₋
        let det = e_plus[0] * e_minus[1] - e_plus[1] * e_minus[0];
        let alpha = ((p[0] * e_minus[1] - p[1] * e_minus[0]) / det).abs();
        let beta = ((e_plus[0] * p[1] - e_plus[1] * p[0]) / det).abs();
        let mut w = m1.clone();
        let mut n = 0u32;
        loop {
            if targets.contains(&w) {
                threshold = threshold.max(n + 1);
            }
            let grow = mu.powi(n as i32);
            // max-norm ≥ 2-norm / √2, unit eigenvectors
            let lower = (alpha * grow - beta / grow) / std::f64::consts::SQRT_2;
            if lower > 2.0 * (radius + 1.0) {
                break;
            }
            n += 1;
            if n > MAX_POWER {
                return Err(TorusError::EscapeNotCertified(MAX_POWER));
            }
            w = dual.apply(&w);
        }
    }
    Ok(threshold)
}

fn dual_planar(dual: &IntMatrix) -> [[f64; 2]; 2] {
    let e = |i, j| dual.get(i, j).to_f64().unwrap_or(f64::NAN);
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

// |μ| > 1 and unit eigenvectors for μ and 1/μ of a hyperbolic det-1 matrix
fn expanding_basis(b: &[[f64; 2]; 2]) -> (f64, [f64; 2], [f64; 2]) {
    let t = b[0][0] + b[1][1];
    let root = (t * t - 4.0).sqrt();
    let mu = (t.abs() + root) / 2.0 * t.signum();
    let nu = 1.0 / mu;
    let eig = |l: f64| {
        let v = if (b[0][1]).abs() > (b[1][0]).abs() {
            [b[0][1], l - b[0][0]]
        } else {
            [l - b[1][1], b[1][0]]
        };
        let n = v[0].hypot(v[1]);
        [v[0] / n, v[1] / n]
    };
    (mu.abs(), eig(mu), eig(nu))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(m: [i64; 3]) -> TrigPoly {
        TrigPoly::character(Freq::from(m))
    }

    fn cat() -> AffineLatticeElement {
        AffineLatticeElement::linear([[2, 1], [1, 1]]).unwrap()
    }

    #[test]
    fn single_tuple_cancellation() {
        let v = exact_multicorrelation(&[e([-1, 1, 0]), e([1, 0, 0])], &[cat()]).unwrap();
        assert_eq!(v, Complex64::new(1.0, 0.0));
        let id = AffineLatticeElement::identity();
        let v = exact_multicorrelation(&[e([1, 0, 0]), e([1, 0, 0])], std::slice::from_ref(&id)).unwrap();
        assert_eq!(v, Complex64::zero());
        let v = exact_multicorrelation(&[e([1, 0, 0]), TrigPoly::zero(3)], &[id]).unwrap();
        assert_eq!(v, Complex64::zero());
    }

    #[test]
    fn rejects_invariant_frequencies_with_witness() {
        let bad = e([1, 0, 0]).add(&e([0, 0, 2])).unwrap();
        let err = exact_multicorrelation(&[e([1, 0, 0]), bad], &[cat()]).unwrap_err();
        assert_eq!(err, TorusError::InvariantFrequency { slot: 1, witness: Freq::from([0, 0, 2]) });
    }

    #[test]
    fn arity_is_checked() {
        assert!(matches!(
            exact_multicorrelation(&[e([1, 0, 0])], &[cat()]),
            Err(TorusError::Arity { .. })
        ));
    }

    #[test]
    fn split_strategy_matches_chain() {
        let f = e([1, 0, 0]).add(&e([-1, 1, 0])).unwrap().add(&e([0, 1, 1])).unwrap();
        let fs = vec![f.clone(), f.clone(), f.clone(), f];
        let g = cat();
        let gs = vec![AffineLatticeElement::identity(), g.clone(), g.invert()];
        let chain = exact_multicorrelation_with(&fs, &gs, u128::MAX).unwrap();
        let split = exact_multicorrelation_with(&fs, &gs, 1).unwrap();
        assert_eq!(chain, split);
        assert_ne!(chain, Complex64::zero());
    }

    #[test]
    fn orbit_dimension() {
        assert_eq!(k_orbit_dimension(&e([1, 0, 0])).unwrap(), 4);
        let sym = [e([1, 0, 0]), e([0, 1, 0]), e([-1, 0, 0]), e([0, -1, 0])]
            .iter()
            .fold(TrigPoly::zero(3), |acc, f| acc.add(f).unwrap());
        assert_eq!(k_orbit_dimension(&sym).unwrap(), 1);
        let cos = e([1, 0, 0]).add(&e([-1, 0, 0])).unwrap();
        assert_eq!(k_orbit_dimension(&cos).unwrap(), 2);
    }

    #[test]
    fn escape_power_matches_direct_enumeration() {
        let f0 = [e([-1, 1, 0]), e([2, -1, 0]), e([3, 4, 0])]
            .iter()
            .fold(TrigPoly::zero(3), |acc, f| acc.add(f).unwrap());
        let f1 = e([1, 0, 0]).add(&e([0, 1, 0])).unwrap();
        let m = cat();
        let n0 = support_escape_power(&f0, &f1, &m).unwrap();
        assert!(n0 >= 1);
        let value = |n: i64| exact_multicorrelation(&[f0.clone(), f1.clone()], &[m.pow(n)]).unwrap();
        assert_ne!(value(n0 as i64 - 1), Complex64::zero());
        for n in n0 as i64..n0 as i64 + 10 {
            assert_eq!(value(n), Complex64::zero(), "n = {n}");
        }
    }
}
