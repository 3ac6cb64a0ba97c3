//! Exact and Monte Carlo multiple correlations on T³.

use mixinglab::lattice::Freq;
use mixinglab::specproj::TrigPoly;
use mixinglab::torus::{
    exact_multicorrelation, k_orbit_dimension, mc_multicorrelation, support_escape_power, AffineLatticeElement,
};
use num_complex::Complex64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m = AffineLatticeElement::new([[2, 1], [1, 1]], [1, 0])?;
    println!("M = {m}, M^3 = {}", m.pow(3));
    println!("ρ*(M) (1,0,0) = {}", m.frequency_action(&Freq::from([1, 0, 0]))?);

    let gs = [m.clone(), m.pow(2)];
    let e1 = Freq::from([1, 0, 0]);
    // the frequency that cancels ρ*(M) e1 + ρ*(M²) e1
    let hit = &Freq::zero(3) - &(&gs[0].frequency_action(&e1)? + &gs[1].frequency_action(&e1)?);
    let f0 = TrigPoly::from_terms(3, [(hit, Complex64::new(1.0, 0.0)), (Freq::from([1, 1, 0]), Complex64::new(0.5, 0.5))])?;
    let f1 = TrigPoly::character(e1.clone());
    let fs = [f0.clone(), f1.clone(), f1.clone()];

    let exact = exact_multicorrelation(&fs, &gs)?;
    let mc = mc_multicorrelation(&fs, &gs, 200_000, 1)?;
    println!("exact = {exact}");
    println!("mc    = {} ± {}", mc.estimate, mc.stderr);

    println!("K-orbit dimension of f0: {}", k_orbit_dimension(&f0)?);
    let n0 = support_escape_power(&f0, &f1, &m)?;
    println!("⟨f0, M^n f1⟩ vanishes for n ≥ {n0}");
    Ok(())
}
