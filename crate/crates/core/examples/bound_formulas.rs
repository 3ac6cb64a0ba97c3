//! The bound evaluators side by side.

use mixinglab::bounds::{
    balanced_envelope, corollary_sl2, evaluate_theorem_3_3, optimal_epsilon, rhs_theorem_4_1, theorem_4_1_exponent,
    BoundInputs, Sl2Variant,
};
use mixinglab::repdata::{ratio_factor, DiagonalElement, LambdaRange, RepresentationData};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let unit = BoundInputs::default();
    let std = corollary_sl2(Sl2Variant::Standard, &[2.0, 8.0], &unit)?;
    let adj = corollary_sl2(Sl2Variant::Adjoint, &[2.0, 8.0], &unit)?;
    println!("standard SL(2) at (2, 8): {} = 120^(-1/2)", std.value);
    println!("adjoint SL(2) at (2, 8): {}", adj.value);

    let rep = RepresentationData::standard_sl2();
    let tuple = [DiagonalElement::ratios(&[(2, 1), (1, 2)])?, DiagonalElement::ratios(&[(8, 1), (1, 8)])?];
    let general = evaluate_theorem_3_3(&unit, &rep, &tuple, LambdaRange::FromIdentity)?;
    println!("cutoff form with q = 1: {} (applicable: {})", general.value, general.applicable);

    let (a, q) = (2.0, 1.0 / 3.0);
    let eps = optimal_epsilon(a, q)?;
    println!("A = {a}, q = 1/3: ε* = {eps}, exponent = {}", theorem_4_1_exponent(a, q)?);
    for r in [1e2, 1e4, 1e8] {
        println!("  R = {r:e}: envelope {} vs R^(-exponent) {}", balanced_envelope(a, q, r, eps), r.powf(-theorem_4_1_exponent(a, q)?));
    }

    let factors = ratio_factor(&rep, &tuple, LambdaRange::FromIdentity)?;
    let inputs = BoundInputs { a: Some(a), q, sup_norms: vec![1.0; 3], pm_norms: vec![2.0; 3], ..unit };
    println!("balanced form with ± norms: {}", rhs_theorem_4_1(&inputs, &factors)?);
    Ok(())
}
