//! Weights, ordering of an acting tuple and the factor `R(a)`.

use mixinglab::repdata::{
    divergence_check, evaluate_weight, order_by_highest_weight, ratio_factor, DiagonalElement, LambdaRange,
    RepresentationData, WeightVector,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rep = RepresentationData::standard_sln(3);
    println!("q for the standard SL(3) action: {}", rep.q_exponent()?);
    println!("q for the adjoint SL(2) action: {}", RepresentationData::adjoint_sl2().q_exponent()?);

    let a = DiagonalElement::ratios(&[(4, 1), (1, 1), (1, 4)])?;
    let root = WeightVector::root(3, 0, 2);
    println!("|α_(0,2)(a)| = {}", evaluate_weight(&root, &a)?.abs_f64());

    let tuple = vec![
        DiagonalElement::ratios(&[(16, 1), (1, 2), (1, 8)])?,
        DiagonalElement::ratios(&[(2, 1), (1, 1), (1, 2)])?,
    ];
    let ordered = order_by_highest_weight(&rep, &tuple)?;
    println!("ordered tuple: {ordered:?}");

    let r = ratio_factor(&rep, &ordered, LambdaRange::FromIdentity)?;
    println!("Σλ = {}, Σϱ⁻¹ = {}, R(a) = {}", r.lambda_sum, r.varrho_sum, r.product);
    let d = divergence_check(&rep, &ordered, 1.5)?;
    println!("divergence above 1.5: {} (minimum {})", d.holds, d.minimum);
    Ok(())
}
