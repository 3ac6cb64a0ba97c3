//! Acceptance criteria 1-9. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use mixinglab::bounds::{
    balanced_envelope, calibrate_constant, corollary_sl2, optimal_epsilon, rhs_theorem_3_3, theorem_4_1_exponent,
    BoundInputs, Sl2Variant,
};
use mixinglab::repdata::{ratio_factor, DiagonalElement, LambdaRange, RepresentationData};
use mixinglab::torus::{decay_sweep, AffineLatticeElement, CorrelationReport, Preset, SweepConfig};
use mixinglab::verify::{mc_oracle, operator_identities, splitting, sumset_projection, SuiteReport};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20240917;

struct Verdict {
    pass: bool,
    detail: String,
}

fn suite(r: SuiteReport, limit: Duration, elapsed: Duration) -> Verdict {
    let mut detail = format!("{} cases, {} failures", r.cases, r.failures.len());
    for (k, v) in &r.counters {
        detail.push_str(&format!(", {k} = {v}"));
    }
    if let Some(f) = r.failures.first() {
        detail.push_str(&format!("; first: case {} [{}] {}", f.case, f.check, f.witness));
    }
    Verdict { pass: r.passed() && elapsed < limit, detail }
}

fn timed<F: FnOnce() -> SuiteReport>(limit: Duration, f: F) -> Verdict {
    let t = Instant::now();
    let r = f();
    suite(r, limit, t.elapsed())
}

fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

fn criterion_4() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let rep = RepresentationData::standard_sl2();
    let mut mismatches = 0;
    let mut worst_rate = 0f64;
    for _ in 0..100 {
        let a: f64 = rng.random_range(1.5..1e6);
        let inputs = BoundInputs {
            s: rng.random_range(1.0..10.0),
            d0: rng.random_range(1..=6) as f64,
            dk: rng.random_range(1..=6) as f64,
            c: rng.random_range(0.1..10.0),
            ..BoundInputs::default()
        }
        .with_q(&ratio(1, 1));
        let x = BigRational::from_float(a).unwrap();
        let tuple = [DiagonalElement::rational(vec![x.clone(), x.recip()]).unwrap()];
        let factors = ratio_factor(&rep, &tuple, LambdaRange::FromIdentity).unwrap();
        let general = rhs_theorem_3_3(&inputs, &factors).unwrap();
        let direct = corollary_sl2(Sl2Variant::Standard, &[a], &inputs).unwrap().value;
        if general != direct {
            mismatches += 1;
        }
        // the a^{-1} rate itself
        let rate = inputs.c * inputs.s.powi(2) * (inputs.d0 * inputs.dk).sqrt() / a;
        worst_rate = worst_rate.max((general / rate - 1.0).abs());
    }
    Verdict {
        pass: mismatches == 0 && worst_rate < 1e-12,
        detail: format!("100 inputs, {mismatches} inexact, max relative deviation from C s² √(d₀d_k)/a = {worst_rate:.1e}"),
    }
}

fn cat() -> AffineLatticeElement {
    AffineLatticeElement::new([[2, 1], [1, 1]], [1, 0]).unwrap()
}

fn sweep(q: &BigRational, ns: std::ops::RangeInclusive<i64>) -> Vec<CorrelationReport> {
    let f = Preset::SmoothBox.build();
    let powers: Vec<Vec<i64>> = ns.map(|n| vec![n, 2 * n]).collect();
    decay_sweep(
        &[f.clone(), f.clone(), f],
        &cat(),
        &powers,
        &RepresentationData::standard_sl2(),
        q,
        &SweepConfig::default(),
    )
    .unwrap()
}

fn criterion_5(rows: &[(BigRational, Vec<CorrelationReport>)], elapsed: Duration) -> Verdict {
    let mut pass = elapsed < Duration::from_secs(60);
    let mut detail = Vec::new();
    for (q, r) in rows {
        let samples: Vec<_> = r.iter().map(CorrelationReport::bound_sample).collect();
        let cal = calibrate_constant(&samples[..4], &samples[4..]).unwrap();
        pass &= cal.valid() && cal.held_out_count == 4;
        detail.push(format!("q = {q}: C_cal = {:.4}, {} held out, {} violations", cal.c_cal, cal.held_out_count, cal.violations.len()));
    }
    Verdict { pass, detail: format!("{}; {:.2?}", detail.join("; "), elapsed) }
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mx, my) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
    let num: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = points.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    num / den
}

fn criterion_6(rows: &[(BigRational, Vec<CorrelationReport>)]) -> Verdict {
    let mut pass = true;
    let mut detail = Vec::new();
    for (q, r) in rows {
        let pts: Vec<(f64, f64)> = r
            .iter()
            .filter(|r| r.exact_abs > 0.0)
            .map(|r| (r.r_factor.ln(), r.exact_abs.ln()))
            .collect();
        let limit = -num_traits::ToPrimitive::to_f64(q).unwrap() / 2.0 + 0.1;
        if pts.len() >= 4 {
            let s = slope(&pts);
            pass &= s <= limit;
            detail.push(format!("q = {q}: slope {s:.4} over {} points (limit {limit:.4})", pts.len()));
        } else {
            detail.push(format!("q = {q}: only {} nonzero points, vacuous", pts.len()));
        }
    }
    Verdict { pass, detail: detail.join("; ") }
}

// exponent of the envelope per unit log R, minimised over ε by refined grids
fn grid_epsilon(a: f64, q: f64) -> f64 {
    let h = |e: f64| (-a * e).max(2.0 * q * e - q / 2.0);
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut best = 0.0;
    while hi - lo > 1e-9 {
        let step = (hi - lo) / 1000.0;
        best = (0..=1000).map(|i| lo + step * i as f64).min_by(|x, y| h(*x).total_cmp(&h(*y))).unwrap();
        lo = (best - step).max(0.0);
        hi = best + step;
    }
    best
}

fn criterion_7() -> Verdict {
    let (mut eps_err, mut exp_err) = (0f64, 0f64);
    let r = 1e6f64;
    for i in 0..20 {
        let a = 0.1 + (10.0 - 0.1) * i as f64 / 19.0;
        for j in 1..=20 {
            let q = j as f64 / 20.0;
            let eps = optimal_epsilon(a, q).unwrap();
            eps_err = eps_err.max((eps - grid_epsilon(a, q)).abs());
            let envelope = balanced_envelope(a, q, r, eps).ln() / r.ln();
            exp_err = exp_err.max((envelope + theorem_4_1_exponent(a, q).unwrap()).abs());
        }
    }
    Verdict {
        pass: eps_err <= 1e-6 && exp_err <= 1e-9,
        detail: format!("400 grid points, max |ε* - grid| = {eps_err:.1e}, max exponent mismatch = {exp_err:.1e}"),
    }
}

fn criterion_9() -> Verdict {
    let bin = env!("CARGO_BIN_EXE_mixinglab");
    let configs = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");
    let dir = tempfile::tempdir().unwrap();
    let mut compared = Vec::new();
    let mut pass = true;
    for (command, config) in [
        ("decay", "decay_small.toml"),
        ("correlate", "correlate_small.toml"),
        ("calibrate", "calibrate_small.toml"),
        ("verify", "verify_small.toml"),
        ("reduce", "../../configs/reduce.toml"),
        ("bound", "../../configs/bound_balanced.toml"),
    ] {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let out = dir.path().join(format!("{command}-{run}"));
            let status = Command::new(bin)
                .args([command, "--config", &format!("{configs}/{config}"), "--out"])
                .arg(&out)
                .output()
                .unwrap();
            pass &= status.status.success();
            outputs.push(std::fs::read(&out).unwrap_or_default());
        }
        let same = outputs[0] == outputs[1] && !outputs[0].is_empty();
        pass &= same;
        compared.push(format!("{command} {}", if same { "identical" } else { "DIFFERS" }));
    }
    Verdict { pass, detail: compared.join(", ") }
}

fn main() -> ExitCode {
    let mut verdicts: Vec<(u32, &str, Verdict, Duration)> = Vec::new();
    let mut record = |n: u32, name: &'static str, f: &mut dyn FnMut() -> Verdict| {
        let t = Instant::now();
        let v = f();
        let elapsed = t.elapsed();
        println!(
            "{} criterion {n} ({name}): {} [{:.2?}]",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail,
            elapsed
        );
        verdicts.push((n, name, v, elapsed));
    };

    record(1, "operator identities", &mut || timed(Duration::from_secs(10), || operator_identities(1000, SEED)));
    record(2, "sumset projection", &mut || timed(Duration::from_secs(10), || sumset_projection(500, SEED)));
    record(3, "exact vs Monte Carlo", &mut || timed(Duration::from_secs(120), || mc_oracle(50, 1_000_000, SEED)));
    record(4, "2-mixing rate recovery", &mut criterion_4);

    let t = Instant::now();
    let rows: Vec<(BigRational, Vec<CorrelationReport>)> =
        [ratio(1, 1), ratio(1, 3)].into_iter().map(|q| { let r = sweep(&q, 1..=8); (q, r) }).collect();
    let sweep_time = t.elapsed();
    record(5, "bound validity sweep", &mut || criterion_5(&rows, sweep_time));
    record(6, "decay-rate sanity", &mut || criterion_6(&rows));
    record(7, "exponent optimization", &mut criterion_7);
    record(8, "splitting", &mut || timed(Duration::from_secs(60), || splitting(1000, SEED)));
    record(9, "reproducibility", &mut criterion_9);

    if verdicts.iter().all(|(_, _, v, _)| v.pass) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
