//! Fourier multipliers on exact trigonometric polynomials: composition,
//! conjugation by a unimodular matrix and the sumset projection check.

use std::collections::BTreeSet;

use mixinglab::lattice::{Freq, IntMatrix};
use mixinglab::specproj::{
    apply_multiplier, conjugated_multiplier, exact, pm_norms, sumset_projection_check, ExactTrigPoly,
    SpectralSymbol,
};
use num_bigint::BigInt;
use num_rational::BigRational;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = ExactTrigPoly::from_terms(
        2,
        [
            (Freq::from([1, 0]), exact(1, 0)),
            (Freq::from([2, 1]), exact(0, 2)),
            (Freq::from([-4, 3]), exact(3, -1)),
        ],
    )?;
    let annulus = SpectralSymbol::annulus(BigRational::new(BigInt::from(5), BigInt::from(2)))?;
    println!("P_s f for s = 5/2: {:?}", apply_multiplier(&annulus, &f));

    let phi = SpectralSymbol::indicator([Freq::from([1, 0]), Freq::from([-4, 3])]);
    let composed = apply_multiplier(&phi.clone().times(annulus.clone()), &f);
    let chained = apply_multiplier(&phi, &apply_multiplier(&annulus, &f));
    println!("P_(φψ) = P_φ P_ψ: {}", composed == chained);

    let g = IntMatrix::from_rows(&[[2, 1], [1, 1]]);
    let conj = conjugated_multiplier(&g, &annulus, &f)?;
    println!("σ(g) P_s σ(g)⁻¹ f: {conj:?}");

    let s: BTreeSet<Freq> = [Freq::from([1, 0]), Freq::from([2, 1])].into();
    let omega = SpectralSymbol::indicator([Freq::from([2, 0]), Freq::from([3, 1])]);
    let outcome = sumset_projection_check(&SpectralSymbol::Indicator(s.clone()), &SpectralSymbol::Indicator(s), &omega, &f, &f)?;
    println!("sumset check with ω missing (4,2): {outcome:?}");

    let norms = pm_norms(1.0, &f.to_c64())?;
    println!("‖f‖_(-,1) = {}, ‖f‖_(+,1) = {}", norms.minus, norms.plus);
    Ok(())
}
