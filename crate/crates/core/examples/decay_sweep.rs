//! Decay of a 3-fold correlation of the cat map with powers (n, 2n),
//! written as CSV with the calibrated bound.

use mixinglab::bounds::calibrate_constant;
use mixinglab::repdata::RepresentationData;
use mixinglab::torus::{decay_sweep, reports_to_csv, AffineLatticeElement, CorrelationReport, Preset, SweepConfig};
use num_rational::BigRational;
use num_traits::One;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = Preset::SmoothBox.build();
    let fs = [f.clone(), f.clone(), f];
    let m = AffineLatticeElement::new([[2, 1], [1, 1]], [1, 0])?;
    let powers: Vec<Vec<i64>> = (1..=8).map(|n| vec![n, 2 * n]).collect();
    let rep = RepresentationData::standard_sl2();
    let q = BigRational::one();

    let rows = decay_sweep(&fs, &m, &powers, &rep, &q, &SweepConfig::default())?;
    let samples: Vec<_> = rows.iter().map(CorrelationReport::bound_sample).collect();
    let cal = calibrate_constant(&samples[..4], &samples[4..])?;
    eprintln!("C_cal = {}, held-out violations: {}", cal.c_cal, cal.violations.len());

    let cfg = SweepConfig { c: cal.c_cal, mc_samples: 20_000, ..SweepConfig::default() };
    let rows = decay_sweep(&fs, &m, &powers, &rep, &q, &cfg)?;
    print!("{}", reports_to_csv(&rows)?);
    Ok(())
}
