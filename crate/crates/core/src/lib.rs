//! Classical discord and distortion of doubly stochastic measurement channels.
//!
//! Joint states of two parties' messages are `M × M` probability matrices.
//! A channel `E = Σ_σ ℘_σ Π_σ` mixes permutations of Bob's messages; its
//! entropy is the entropy of the weights `℘`. For a channel this crate
//! estimates, by averaging over random states,
//!
//! * discord: the loss of mutual information `I(p) − I(p·E)`, and
//! * distortion: the total-variation distance between `p·E` and `p`,
//!
//! each minimized over relabelings of Bob's messages. All information
//! measures are in bits.
//!
//! | module | contents |
//! |---|---|
//! | [`hadamard`] | element-wise calculus, entropies, mutual information, total variation |
//! | [`permutations`] | reverse-lexicographic permutation tables |
//! | [`channels`] | weight priors and channel assembly |
//! | [`states`] | state priors pulled toward the identity |
//! | [`estimators`] | minimized state discord and distortion, channel averages |
//! | [`experiment`] | the seeded, parallel channel sweep |
//! | [`twobit`] | two-bit closed forms and the monotonicity scan |
//! | [`fitting`] | quadratic least squares and rank correlation |
//! | [`plot`] | SVG scatter |
//! | [`cli`] | the `discordlab` command line |
//!
//! Runnable walkthroughs live in `examples/`; try `cargo run --example scatter_experiment`.
//!
//! ```
//! use discordlab::prelude::*;
//!
//! let table = PermutationTable::reverse_lex(2)?;
//! let half = assemble_channel(&WeightVector::from_vec(vec![0.5, 0.5])?, &table)?;
//! let p = JointState::from_rows(&[&[0.5, 0.0], &[0.0, 0.5]])?;
//! assert!((state_discord(&p, &half)? - 1.0).abs() < 1e-15);
//! # Ok::<(), discordlab::Error>(())
//! ```

// `!(x >= 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channels;
pub mod cli;
pub mod error;
pub mod estimators;
pub mod experiment;
pub mod fitting;
pub mod hadamard;
pub mod permutations;
pub mod plot;
pub mod states;
pub mod twobit;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::channels::{
        apply_channel, assemble_channel, identity_channel, interpolate_weights, is_doubly_stochastic,
        low_entropy_weights, uniform_weights, Channel, LowEntropyRule, WeightVector,
    };
    pub use crate::error::{Error, Result};
    pub use crate::estimators::{
        channel_discord, channel_distortion, estimate_channel, minimize_over_permutations, state_discord,
        state_distortion, PermutationConvention,
    };
    pub use crate::experiment::{run_experiment, ExperimentConfig, ScatterPoint};
    pub use crate::fitting::{fit_quadratic, spearman, QuadraticFit};
    pub use crate::hadamard::{
        alternative_mutual_information, mutual_information, tv_distance, JointState, ProbVector,
    };
    pub use crate::permutations::{Permutation, PermutationTable};
    pub use crate::states::{sample_random_joint, state_batch, PriorKind, StatePrior};
    pub use crate::twobit::{ddelta_dalpha, monotonicity_scan, twobit_discord, TwoBitChannel, TwoBitState};
}
