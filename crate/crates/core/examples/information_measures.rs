//! Entropies, mutual information in its two forms, and total variation.
//!
//! `cargo run --example information_measures`

use discordlab::hadamard::{
    alternative_mutual_information, conditional_entropy_a_given_b, entropy_of, is_conditionally_pure, marginal_a,
    marginal_b, mutual_information, tv_distance, JointState, ProbVector,
};

fn main() -> discordlab::Result<()> {
    let p = JointState::from_rows(&[&[0.4, 0.1], &[0.1, 0.4]])?;
    println!("p = {:?}", p.as_array());
    println!("H(A)   = {:.6} bits", marginal_a(&p).entropy());
    println!("H(B)   = {:.6} bits", marginal_b(&p).entropy());
    println!("H(AB)  = {:.6} bits", p.entropy());
    println!("H(A|B) = {:.6} bits", conditional_entropy_a_given_b(&p));
    println!("I      = {:.6} bits", mutual_information(&p));
    println!("J      = {:.6} bits", alternative_mutual_information(&p));

    let product = JointState::product(&ProbVector::new(vec![0.3, 0.7])?, &ProbVector::new(vec![0.5, 0.5])?)?;
    println!("\nproduct state: I = {:.3e}", mutual_information(&product));
    println!("TV(p, product) = {:.6}", tv_distance(&p, &product)?);

    let diag = JointState::from_rows(&[&[0.0, 0.25], &[0.75, 0.0]])?;
    println!("\nanti-diagonal state conditionally pure: {}", is_conditionally_pure(&diag));
    println!("I = H(A) = {:.6} bits", mutual_information(&diag));
    println!("entropy of [0.5, 0.25, 0.25] = {} bits", entropy_of(&ndarray::arr1(&[0.5, 0.25, 0.25]))?);
    Ok(())
}
