//! Splitting a diagonal element of SL(n) along a root and embedding
//! SL(2) ⋉ k² into SL(n).

use mixinglab::repdata::{DiagonalElement, WeightVector};
use mixinglab::torus::AffineLatticeElement;
use mixinglab::slnreduce::{decompose_torus, embed_sl2_v, select_root_pair, split_diagonal, Sl2Affine};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a = DiagonalElement::ratios(&[(9, 1), (1, 1), (1, 4), (4, 9)])?;
    let split = split_diagonal(&a, 0, 2)?;
    println!("â = {:?}", split.a_hat);
    println!("a′ = {:?}", split.a_prime);
    println!("â·a′ = a: {}", split.product()? == a);

    let real = DiagonalElement::real(vec![3.0, 0.5, 2.0 / 3.0])?;
    println!("archimedean split: {:?}", split_diagonal(&real, 0, 1)?.a_prime);

    let q = DiagonalElement::q_power(vec![3, 0, -4, 1], 7)?;
    let s = split_diagonal(&q, 0, 2)?;
    println!("q-adic split: â = {:?}, a′ = {:?}, shift {:?}", s.a_hat, s.a_prime, s.parity_compensation);

    let g = Sl2Affine::from(&AffineLatticeElement::new([[2, 1], [1, 1]], [5, -3])?);
    println!("embedded in SL(4) at (0, 2): {:?}", embed_sl2_v(4, 0, 2, &g)?);

    let (omega, other) = select_root_pair(4, 1)?;
    println!("simple roots {omega} and {other} span an A₂ subsystem");
    let d = decompose_torus(&a, &WeightVector::root(4, 1, 3))?;
    println!("kernel part {:?}, ω-part {:?}", d.kernel, d.d_omega);
    Ok(())
}
