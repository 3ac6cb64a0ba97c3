//! Randomized property suites shared by `mixinglab verify` and the test
//! targets. Every suite is driven by a seeded `ChaCha8Rng`, so a failing
//! case is reproducible from `(suite, seed, case)`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::lattice::{Freq, IntMatrix};
use crate::repdata::DiagonalElement;
use crate::slnreduce::{embed_sl2_v, split_diagonal, RatMatrix, Sl2Affine};
use crate::specproj::{
    apply_multiplier, conjugated_multiplier, sumset, sumset_projection_check, ExactComplex, ExactTrigPoly,
    RadialProfile, SpectralSymbol, SumsetOutcome, TrigPoly,
};
use crate::torus::{
    exact_multicorrelation, mc_multicorrelation, support_escape_power, AffineLatticeElement,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub case: usize,
    pub check: String,
    pub witness: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub cases: usize,
    pub failures: Vec<Failure>,
    /// Suite-specific counters, e.g. how many adversarial cases occurred.
    pub counters: BTreeMap<String, u64>,
}

impl SuiteReport {
    fn new(suite: &str, seed: u64) -> Self {
        SuiteReport { suite: suite.into(), seed, cases: 0, failures: Vec::new(), counters: BTreeMap::new() }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn fail(&mut self, case: usize, check: &str, witness: impl Into<String>) {
        self.failures.push(Failure { case, check: check.into(), witness: witness.into() });
    }

    fn bump(&mut self, key: &str) {
        *self.counters.entry(key.into()).or_default() += 1;
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn rat(rng: &mut ChaCha8Rng) -> BigRational {
    BigRational::new(BigInt::from(rng.random_range(-6i64..=6)), BigInt::from(rng.random_range(1i64..=4)))
}

fn nonneg_rat(rng: &mut ChaCha8Rng) -> BigRational {
    BigRational::new(BigInt::from(rng.random_range(0i64..=6)), BigInt::from(rng.random_range(1i64..=4)))
}

fn exact_c(rng: &mut ChaCha8Rng) -> ExactComplex {
    Complex::new(rat(rng), rat(rng))
}

fn freq(rng: &mut ChaCha8Rng, dim: usize, r: i64) -> Freq {
    Freq::from((0..dim).map(|_| rng.random_range(-r..=r)).collect::<Vec<_>>())
}

fn freq_set(rng: &mut ChaCha8Rng, dim: usize, r: i64, n: usize) -> BTreeSet<Freq> {
    (0..n).map(|_| freq(rng, dim, r)).collect()
}

fn exact_poly(rng: &mut ChaCha8Rng, dim: usize, terms: usize) -> ExactTrigPoly {
    let t: Vec<(Freq, ExactComplex)> = (0..terms).map(|_| (freq(rng, dim, 4), exact_c(rng))).collect();
    let mut f = ExactTrigPoly::zero(dim);
    for (m, c) in t {
        f = f.add(&ExactTrigPoly::monomial(m, c)).expect("same dimension");
    }
    f
}

fn base_symbol(rng: &mut ChaCha8Rng, dim: usize) -> SpectralSymbol {
    match rng.random_range(0..5) {
        0 => SpectralSymbol::indicator(freq_set(rng, dim, 4, 6)),
        1 => SpectralSymbol::Table(
            freq_set(rng, dim, 4, 8).into_iter().map(|m| (m, exact_c(rng))).collect(),
        ),
        2 => {
            let s = BigRational::new(BigInt::from(rng.random_range(3i64..=12)), BigInt::from(2));
            SpectralSymbol::annulus(s).expect("s > 1")
        }
        3 => {
            let s = BigRational::new(BigInt::from(rng.random_range(3i64..=8)), BigInt::from(2));
            SpectralSymbol::Radial(RadialProfile::annulus_approximant(&s, rng.random_range(1..=3)).expect("valid"))
        }
        _ => SpectralSymbol::Constant(exact_c(rng)),
    }
}

fn symbol(rng: &mut ChaCha8Rng, dim: usize) -> SpectralSymbol {
    let a = base_symbol(rng, dim);
    match rng.random_range(0..4) {
        0 => a.times(base_symbol(rng, dim)),
        1 => a.plus(base_symbol(rng, dim)),
        2 => a.conjugate(),
        _ => a,
    }
}

/// Product of elementary transvections and a signed permutation.
fn unimodular(rng: &mut ChaCha8Rng, dim: usize) -> IntMatrix {
    let mut g = IntMatrix::identity(dim);
    for _ in 0..rng.random_range(1..=4) {
        let i = rng.random_range(0..dim);
        let j = (i + rng.random_range(1..dim)) % dim;
        let mut e = IntMatrix::identity(dim);
        e.set(i, j, BigInt::from(rng.random_range(-2i64..=2)));
        g = g.mul(&e);
    }
    let mut perm: Vec<usize> = (0..dim).collect();
    for i in (1..dim).rev() {
        perm.swap(i, rng.random_range(0..=i));
    }
    let mut p = IntMatrix::from_entries(dim, vec![BigInt::zero(); dim * dim]);
    for (i, &j) in perm.iter().enumerate() {
        p.set(i, j, BigInt::from(if rng.random_bool(0.5) { 1 } else { -1 }));
    }
    g.mul(&p)
}

fn affine(rng: &mut ChaCha8Rng, steps: usize, v: i64) -> AffineLatticeElement {
    let mut g = AffineLatticeElement::identity();
    for _ in 0..steps {
        let t = rng.random_range(-2i64..=2);
        let e = if rng.random_bool(0.5) { [[1, t], [0, 1]] } else { [[1, 0], [t, 1]] };
        g = g.compose(&AffineLatticeElement::linear(e).expect("transvection"));
    }
    let tr = AffineLatticeElement::translation([rng.random_range(-v..=v), rng.random_range(-v..=v)]);
    g.compose(&tr)
}

fn off_axis_freq(rng: &mut ChaCha8Rng, r: i64) -> Freq {
    loop {
        let m = freq(rng, 3, r);
        if !(m.coords()[0].is_zero() && m.coords()[1].is_zero()) {
            return m;
        }
    }
}

fn small_poly(rng: &mut ChaCha8Rng, terms: usize, integer: bool) -> TrigPoly {
    let mut f = TrigPoly::zero(3);
    for _ in 0..terms {
        let c = if integer {
            Complex64::new(rng.random_range(-3..=3) as f64, rng.random_range(-3..=3) as f64)
        } else {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        };
        f = f.add(&TrigPoly::monomial(off_axis_freq(rng, 2), c)).expect("dim 3");
    }
    f
}

fn dump<T: std::fmt::Debug>(x: &T) -> String {
    let s = format!("{x:?}");
    if s.len() > 2000 {
        format!("{}…", &s[..s.char_indices().nth(2000).map_or(s.len(), |(i, _)| i)])
    } else {
        s
    }
}

/// Multiplier homomorphism, self-adjointness, positivity/monotonicity and
/// the conjugation law, all with exact coefficient equality.
pub fn operator_identities(cases: usize, seed: u64) -> SuiteReport {
    let mut report = SuiteReport::new("operator_identities", seed);
    for case in 0..cases {
        let mut rng = rng_for(seed, case as u64);
        let dim = rng.random_range(2..=3);
        let (phi, psi) = (symbol(&mut rng, dim), symbol(&mut rng, dim));
        let f = exact_poly(&mut rng, dim, 6);
        let g = exact_poly(&mut rng, dim, 6);
        report.cases += 1;

        let lhs = apply_multiplier(&phi.clone().times(psi.clone()), &f);
        let rhs = apply_multiplier(&phi, &apply_multiplier(&psi, &f));
        if lhs != rhs {
            report.fail(case, "homomorphism", dump(&(&phi, &psi, &f)));
        }

        let left = apply_multiplier(&phi, &f).inner(&g);
        let right = f.inner(&apply_multiplier(&phi.clone().conjugate(), &g));
        if left != right {
            report.fail(case, "self_adjoint", dump(&(&phi, &f, &g)));
        }

        let small = SpectralSymbol::Table(f.support().map(|m| (m.clone(), Complex::from(nonneg_rat(&mut rng)))).collect());
        let extra = SpectralSymbol::Table(f.support().map(|m| (m.clone(), Complex::from(nonneg_rat(&mut rng)))).collect());
        let big = small.clone().plus(extra);
        let q_small = apply_multiplier(&small, &f).inner(&f);
        let q_big = apply_multiplier(&big, &f).inner(&f);
        let ordered = q_small.im.is_zero()
            && q_big.im.is_zero()
            && q_small.re >= BigRational::zero()
            && q_big.re >= q_small.re;
        if !ordered {
            report.fail(case, "positivity", dump(&(&small, &big, &f)));
        }

        let u = unimodular(&mut rng, dim);
        if let Err(e) = conjugated_multiplier(&u, &phi, &f) {
            report.fail(case, "conjugation", format!("{e}: {}", dump(&(&u, &phi, &f))));
        }
    }
    report
}

/// `P_ω(P_φ f · P_ψ g) = P_φ f · P_ψ g` when `ω ≡ 1` on the sumset, and a
/// witness when an adversarial `ω` misses a sumset point.
pub fn sumset_projection(cases: usize, seed: u64) -> SuiteReport {
    let mut report = SuiteReport::new("sumset_projection", seed);
    for case in 0..cases {
        let mut rng = rng_for(seed, case as u64);
        let dim = rng.random_range(2..=3);
        let (sa, sb) = (freq_set(&mut rng, dim, 3, 3), freq_set(&mut rng, dim, 3, 3));
        let as_symbol = |rng: &mut ChaCha8Rng, s: &BTreeSet<Freq>| {
            if rng.random_bool(0.5) {
                SpectralSymbol::Indicator(s.clone())
            } else {
                let t = s.iter().map(|m| (m.clone(), Complex::new(BigRational::from_integer(rng.random_range(1..=5).into()), rat(rng))));
                SpectralSymbol::Table(t.collect())
            }
        };
        let phi = as_symbol(&mut rng, &sa);
        let psi = as_symbol(&mut rng, &sb);
        let mut f = exact_poly(&mut rng, dim, 3);
        let mut g = exact_poly(&mut rng, dim, 3);
        for m in &sa {
            f = f.add(&ExactTrigPoly::monomial(m.clone(), exact_c(&mut rng))).expect("dim");
        }
        for m in &sb {
            g = g.add(&ExactTrigPoly::monomial(m.clone(), exact_c(&mut rng))).expect("dim");
        }
        let full = sumset(&sa, &sb);
        let adversarial = rng.random_bool(0.5);
        let mut omega_set = full.clone();
        omega_set.extend(freq_set(&mut rng, dim, 6, 4));
        let missing = adversarial.then(|| {
            let idx = rng.random_range(0..full.len());
            let p = full.iter().nth(idx).expect("index in range").clone();
            omega_set.remove(&p);
            p
        });
        let omega = SpectralSymbol::Indicator(omega_set);
        report.cases += 1;
        let outcome = match sumset_projection_check(&phi, &psi, &omega, &f, &g) {
            Ok(o) => o,
            Err(e) => {
                report.fail(case, "evaluation", e.to_string());
                continue;
            }
        };
        let product = apply_multiplier(&phi, &f).multiply(&apply_multiplier(&psi, &g)).expect("dim");
        let fixed = apply_multiplier(&omega, &product) == product;
        match (missing, outcome) {
            (None, SumsetOutcome::Verified) => report.bump("verified"),
            (Some(p), SumsetOutcome::HypothesisFails { witness, identity_holds }) => {
                report.bump("adversarial");
                if !identity_holds {
                    report.bump("adversarial_identity_broken");
                }
                if witness != p || identity_holds != fixed {
                    report.fail(case, "witness", format!("expected {p}, got {witness} (identity_holds {identity_holds})"));
                }
            }
            (_, other) => report.fail(case, "classification", dump(&(other, &phi, &psi, &f, &g))),
        }
    }
    report
}

/// Exact correlation against the Monte Carlo oracle: `|mc - exact| ≤ 5σ`.
pub fn mc_oracle(instances: usize, samples: u64, seed: u64) -> SuiteReport {
    let mut report = SuiteReport::new("mc_oracle", seed);
    for case in 0..instances {
        let mut rng = rng_for(seed, case as u64);
        let k = rng.random_range(1..=3);
        let gs: Vec<AffineLatticeElement> = (0..k).map(|_| affine(&mut rng, 2, 2)).collect();
        let mut fs: Vec<TrigPoly> = (0..=k).map(|_| small_poly(&mut rng, 2, false)).collect();
        // plant a cancelling tuple so the exact value is typically nonzero
        let mut m0 = Freq::zero(3);
        for (f, g) in fs[1..].iter().zip(&gs) {
            let m = f.support().next().expect("nonempty").clone();
            m0 = &m0 - &g.frequency_action(&m).expect("dim 3");
        }
        if !(m0.coords()[0].is_zero() && m0.coords()[1].is_zero()) {
            fs[0] = fs[0].add(&TrigPoly::monomial(m0, Complex64::new(0.5, -0.25))).expect("dim 3");
        }
        report.cases += 1;
        let exact = match exact_multicorrelation(&fs, &gs) {
            Ok(v) => v,
            Err(e) => {
                report.fail(case, "exact", e.to_string());
                continue;
            }
        };
        let mc = match mc_multicorrelation(&fs, &gs, samples, seed.wrapping_add(case as u64)) {
            Ok(v) => v,
            Err(e) => {
                report.fail(case, "mc", e.to_string());
                continue;
            }
        };
        if !exact.is_zero() {
            report.bump("nonzero_exact");
        }
        let err = (mc.estimate - exact).norm();
        if err > 5.0 * mc.stderr + 1e-12 {
            report.fail(case, "agreement", format!("exact {exact}, mc {} ± {}", mc.estimate, mc.stderr));
        }
    }
    report
}

/// Composition law, invariant characters, unitarity and orbit escape on the
/// lattice model.
pub fn torus_invariants(cases: usize, seed: u64) -> SuiteReport {
    let mut report = SuiteReport::new("torus_invariants", seed);
    for case in 0..cases {
        let mut rng = rng_for(seed, case as u64);
        let g = affine(&mut rng, 3, 5);
        let h = affine(&mut rng, 3, 5);
        let m = freq(&mut rng, 3, 9);
        report.cases += 1;
        let lhs = g.compose(&h).frequency_action(&m).expect("dim 3");
        let rhs = g.frequency_action(&h.frequency_action(&m).expect("dim 3")).expect("dim 3");
        if lhs != rhs {
            report.fail(case, "composition", dump(&(&g, &h, &m)));
        }
        if !g.invert().compose(&g).is_identity() {
            report.fail(case, "inverse", dump(&g));
        }
        let fixed = Freq::from([0, 0, rng.random_range(-9..=9)]);
        if g.frequency_action(&fixed).expect("dim 3") != fixed {
            report.fail(case, "invariant_character", dump(&(&g, &fixed)));
        }

        if case % 5 == 0 {
            let k = rng.random_range(1..=2);
            let fs: Vec<TrigPoly> = (0..=k).map(|_| small_poly(&mut rng, 3, true)).collect();
            let gs: Vec<AffineLatticeElement> = (0..k).map(|_| affine(&mut rng, 2, 2)).collect();
            let h = affine(&mut rng, 2, 2);
            let moved_f0 = fs[0].transform_frequencies(h.dual_matrix()).expect("dim 3");
            let mut moved = fs.clone();
            moved[0] = moved_f0;
            let hg: Vec<AffineLatticeElement> = gs.iter().map(|g| h.compose(g)).collect();
            match (exact_multicorrelation(&fs, &gs), exact_multicorrelation(&moved, &hg)) {
                (Ok(a), Ok(b)) if a == b => {}
                (a, b) => report.fail(case, "unitarity", format!("{a:?} vs {b:?}")),
            }
        }

        if case % 20 == 0 {
            let f0 = small_poly(&mut rng, 4, true);
            let f1 = small_poly(&mut rng, 3, true);
            let cat = AffineLatticeElement::new([[2, 1], [1, 1]], [rng.random_range(-1..=1), 0]).expect("SL(2,Z)");
            match support_escape_power(&f0, &f1, &cat) {
                Ok(n0) => {
                    for n in n0 as i64..n0 as i64 + 6 {
                        let v = exact_multicorrelation(&[f0.clone(), f1.clone()], &[cat.pow(n)]);
                        if v != Ok(Complex64::zero()) {
                            report.fail(case, "orbit_escape", format!("n0 = {n0}, n = {n}: {v:?}"));
                        }
                    }
                }
                Err(e) => report.fail(case, "orbit_escape", e.to_string()),
            }
        }
    }
    report
}

/// `â·a′ = a` (exact on perfect squares, `1e-12` in floating point),
/// centralization of the embedded rotation, unit determinants, and the
/// q-exponent parity round trip, for `n ∈ {3, 4, 5}`.
pub fn splitting(cases: usize, seed: u64) -> SuiteReport {
    let mut report = SuiteReport::new("splitting", seed);
    for case in 0..cases {
        let mut rng = rng_for(seed, case as u64);
        let n = rng.random_range(3..=5);
        let j = rng.random_range(0..n - 1);
        let l = rng.random_range(j + 1..n);
        report.cases += 1;

        // exact: squares of rationals, last entry fixes the determinant
        let mut entries: Vec<BigRational> = (0..n - 1)
            .map(|_| {
                let r = BigRational::new(BigInt::from(rng.random_range(1i64..=30)), BigInt::from(rng.random_range(1i64..=30)));
                &r * &r
            })
            .collect();
        let prod: BigRational = entries.iter().fold(BigRational::one(), |a, b| a * b);
        entries.push(prod.recip());
        let a = DiagonalElement::rational(entries).expect("det 1");
        match split_diagonal(&a, j, l) {
            Ok(s) => {
                if s.product().ok().as_ref() != Some(&a) {
                    report.fail(case, "exact_product", dump(&s));
                }
                let (DiagonalElement::Rational(h), DiagonalElement::Rational(p)) = (&s.a_hat, &s.a_prime) else {
                    report.fail(case, "exact_mode", dump(&s));
                    continue;
                };
                let det = |v: &[BigRational]| v.iter().fold(BigRational::one(), |x, y| x * y);
                if !det(h).is_one() || !det(p).is_one() {
                    report.fail(case, "determinant", dump(&s));
                }
                let d = RatMatrix::diagonal(p);
                for gen in [Sl2Affine::rotation(), Sl2Affine::rotation().compose(&Sl2Affine::rotation())] {
                    let r = embed_sl2_v(n, j, l, &gen).expect("valid indices");
                    if d.mul(&r) != r.mul(&d) {
                        report.fail(case, "centralizes", dump(&(&s, &gen)));
                    }
                }
            }
            Err(e) => report.fail(case, "exact_split", e.to_string()),
        }

        // floating
        let mut logs: Vec<f64> = (0..n - 1).map(|_| rng.random_range(-4.0..4.0)).collect();
        logs.push(-logs.iter().sum::<f64>());
        let v: Vec<f64> = logs.iter().map(|x: &f64| x.exp()).collect();
        match DiagonalElement::real(v.clone()).map_err(|e| e.to_string()).and_then(|a| split_diagonal(&a, j, l).map_err(|e| e.to_string())) {
            Ok(s) => {
                let (DiagonalElement::Real(h), DiagonalElement::Real(p)) = (&s.a_hat, &s.a_prime) else {
                    report.fail(case, "float_mode", dump(&s));
                    continue;
                };
                let close = h.iter().zip(p).zip(&v).all(|((x, y), z)| ((x * y) / z - 1.0).abs() <= 1e-12);
                if !close || p[j] != p[l] || (h[j] * h[l] - 1.0).abs() > 1e-12 {
                    report.fail(case, "float_product", dump(&s));
                }
            }
            Err(e) => report.fail(case, "float_split", e),
        }

        // q-exponent parity round trip
        let mut e: Vec<i64> = (0..n - 1).map(|_| rng.random_range(-9..=9)).collect();
        e.push(-e.iter().sum::<i64>());
        let a = DiagonalElement::q_power(e.clone(), 2).expect("sum 0");
        match split_diagonal(&a, j, l) {
            Ok(s) => {
                let (h2, p2) = s.ideal_doubled_exponents().expect("q mode");
                let sum_ok = h2.iter().zip(&p2).zip(&e).all(|((x, y), z)| x + y == 2 * z);
                let shape_ok = p2[j] == p2[l] && h2[j] == -h2[l];
                let flag_ok = s.parity_compensation.is_some() == ((e[j] + e[l]) % 2 != 0);
                if s.product().ok().as_ref() != Some(&a) || !sum_ok || !shape_ok || !flag_ok {
                    report.fail(case, "parity_round_trip", dump(&s));
                }
                if s.parity_compensation.is_some() {
                    report.bump("parity_compensated");
                }
            }
            Err(e) => report.fail(case, "q_split", e.to_string()),
        }
    }
    report
}

/// Parseval through the Monte Carlo engine: `‖f‖₂² ≈ ∫ f · f̄`.
pub fn parseval(cases: usize, samples: u64, seed: u64) -> SuiteReport {
    let mut report = SuiteReport::new("parseval", seed);
    for case in 0..cases {
        let mut rng = rng_for(seed, case as u64);
        let f = small_poly(&mut rng, 4, false);
        let conj = f.map_coeffs(|_, c| c.conj()).transform_frequencies(&neg_identity()).expect("dim 3");
        let id = AffineLatticeElement::identity();
        report.cases += 1;
        match mc_multicorrelation(&[f.clone(), conj], &[id], samples, seed ^ case as u64) {
            Ok(mc) => {
                let exact = f.l2_norm_sqr();
                if (mc.estimate - Complex64::new(exact, 0.0)).norm() > 5.0 * mc.stderr + 1e-12 {
                    report.fail(case, "parseval", format!("‖f‖² = {exact}, mc {} ± {}", mc.estimate, mc.stderr));
                }
            }
            Err(e) => report.fail(case, "mc", e.to_string()),
        }
    }
    report
}

fn neg_identity() -> IntMatrix {
    IntMatrix::from_rows(&[[-1, 0, 0], [0, -1, 0], [0, 0, -1]])
}

/// Case counts for [`run_all`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyPlan {
    pub operator_cases: usize,
    pub sumset_cases: usize,
    pub mc_instances: usize,
    pub mc_samples: u64,
    pub torus_cases: usize,
    pub split_cases: usize,
    pub parseval_cases: usize,
}

impl Default for VerifyPlan {
    fn default() -> Self {
        VerifyPlan {
            operator_cases: 1000,
            sumset_cases: 500,
            mc_instances: 50,
            mc_samples: 1_000_000,
            torus_cases: 1000,
            split_cases: 1000,
            parseval_cases: 20,
        }
    }
}

pub fn run_all(plan: &VerifyPlan, seed: u64) -> Vec<SuiteReport> {
    vec![
        operator_identities(plan.operator_cases, seed),
        sumset_projection(plan.sumset_cases, seed),
        torus_invariants(plan.torus_cases, seed),
        splitting(plan.split_cases, seed),
        mc_oracle(plan.mc_instances, plan.mc_samples, seed),
        parseval(plan.parseval_cases, plan.mc_samples.min(200_000), seed),
    ]
}
