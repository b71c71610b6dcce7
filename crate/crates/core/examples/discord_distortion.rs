//! Minimized discord and distortion of one channel under both conventions.
//!
//! `cargo run --example discord_distortion`

use discordlab::channels::{assemble_channel, low_entropy_weights, LowEntropyRule};
use discordlab::estimators::{estimate_channel, minimize_over_permutations, state_discord, PermutationConvention};
use discordlab::permutations::PermutationTable;
use discordlab::states::{sample_random_joint, state_batch, PriorKind, StatePrior};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> discordlab::Result<()> {
    let m = 4;
    let table = PermutationTable::reverse_lex(m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let e = assemble_channel(&low_entropy_weights(m, LowEntropyRule::StickBreaking, &mut rng)?, &table)?;
    let p = sample_random_joint(m, &mut rng)?;
    println!("channel entropy {:.4} bits; unpermuted state discord {:.6} bits", e.entropy(), state_discord(&p, &e)?);

    for conv in [PermutationConvention::ChannelThenPermute, PermutationConvention::PermuteThenChannel] {
        let (d, t) = minimize_over_permutations(&p, &e, &table, conv)?;
        println!(
            "{conv}: discord {:.6} (σ = {:?}), distortion {:.6} (σ = {:?})",
            d.value,
            table.get(d.argmin).expect("in table").one_based(),
            t.value,
            table.get(t.argmin).expect("in table").one_based()
        );
    }

    let batch = state_batch(&StatePrior::with_grid_size(PriorKind::RandomJoint, 50), m, &mut rng)?;
    let est = estimate_channel(&e, &batch, &table, PermutationConvention::default())?;
    println!(
        "\nover {} states: average discord {:.6} bits, average distortion {:.6}, modal σ index {}",
        est.n_states,
        est.avg_discord,
        est.avg_distortion,
        est.distortion_argmin_mode()
    );
    Ok(())
}
