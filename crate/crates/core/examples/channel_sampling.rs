//! Weight priors and the channels they generate, from low entropy to uniform.
//!
//! `cargo run --example channel_sampling`

use discordlab::channels::{
    assemble_channel, interpolate_weights, is_doubly_stochastic, low_entropy_weights, uniform_weights, LowEntropyRule,
    STOCHASTIC_TOL,
};
use discordlab::permutations::PermutationTable;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> discordlab::Result<()> {
    let m = 4;
    let table = PermutationTable::reverse_lex(m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let up = uniform_weights(m)?;
    println!("uniform weights: H = {:.4} bits (log2 {}! = {:.4})", up.entropy(), m, (24f64).log2());

    for rule in [LowEntropyRule::StickBreaking, LowEntropyRule::ClampedInterval] {
        let down = low_entropy_weights(m, rule, &mut rng)?;
        println!("\n{rule}: low-entropy draw has H = {:.4} bits", down.entropy());
        for a in [1.0, 0.75, 0.5, 0.25, 0.0] {
            let w = interpolate_weights(&down, &up, a)?;
            let e = assemble_channel(&w, &table)?;
            println!(
                "  a = {a:.2}: H = {:.4} bits, doubly stochastic = {}",
                e.entropy(),
                is_doubly_stochastic(e.matrix(), STOCHASTIC_TOL)
            );
        }
    }
    Ok(())
}
