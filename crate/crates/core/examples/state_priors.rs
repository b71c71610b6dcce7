//! The two state priors and the pull toward the identity.
//!
//! `cargo run --example state_priors`

use discordlab::hadamard::{is_conditionally_pure, mutual_information};
use discordlab::states::{state_batch, PriorKind, StatePrior};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> discordlab::Result<()> {
    let m = 6;
    for kind in [PriorKind::RandomJoint, PriorKind::ConditionallyPure] {
        let prior = StatePrior::reference(kind);
        let batch = state_batch(&prior, m, &mut ChaCha8Rng::seed_from_u64(1))?;
        println!("{kind}: {} states", batch.len());
        for k in [0, 25, 50, 75, 99] {
            let s = &batch[k];
            println!(
                "  a = {:.6}: H(AB) = {:.3} bits, I = {:.3} bits, conditionally pure = {}",
                prior.grid[k],
                s.entropy(),
                mutual_information(s),
                is_conditionally_pure(s)
            );
        }
    }
    Ok(())
}
