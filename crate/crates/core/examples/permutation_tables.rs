//! Reverse-lexicographic permutation tables and their matrices.
//!
//! `cargo run --example permutation_tables -- 3`

use discordlab::permutations::{factorial, permutation_matrix, PermutationTable};

fn main() -> discordlab::Result<()> {
    let m: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let table = PermutationTable::reverse_lex(m)?;
    println!("M = {m}: {} permutations (M! = {})", table.len(), factorial(m));
    for (k, sigma) in table.iter().enumerate().take(12) {
        println!("  ℘_{:<3} ↔ σ = {:?}", k + 1, sigma.one_based());
    }
    if table.len() > 12 {
        println!("  ...");
    }
    let last = table.get(table.identity_index()).expect("nonempty");
    println!("last row is the identity: {}", last.is_identity());
    println!("Π for the first row:\n{}", permutation_matrix(table.get(0).expect("nonempty")));
    Ok(())
}
