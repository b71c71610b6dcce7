//! State discord and distortion, their minimization over message relabelings,
//! and the per-channel averages over a state batch.
//!
//! Two conventions place the relabeling `Π_σ` relative to the channel:
//!
//! * [`PermutationConvention::ChannelThenPermute`] compares `p·E·Π_σ` with `p`.
//!   Discord `I(p) − I(p·E·Π_σ)` is the same for every `σ`; distortion
//!   `TV(p·E·Π_σ, p)` is minimized, so a channel that only relabels messages
//!   has zero distortion.
//! * [`PermutationConvention::PermuteThenChannel`] evaluates `Δ_E(p·Π_σ)` and
//!   `TV(p·Π_σ·E, p·Π_σ)`.
//!
//! Minima break ties toward the smallest table index: a later permutation only
//! replaces the incumbent when it is lower by more than [`TIE_TOL`].

use serde::{Deserialize, Serialize};

use crate::channels::{apply_channel, Channel};
use crate::error::{Error, Result};
use crate::hadamard::{alternative_mutual_information, mutual_information, mutual_information_slice, tv_distance, JointState};
use crate::permutations::PermutationTable;

/// Values closer than this are ties.
pub const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PermutationConvention {
    #[default]
    ChannelThenPermute,
    PermuteThenChannel,
}

impl std::str::FromStr for PermutationConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "channel-then-permute" | "prose" => Ok(Self::ChannelThenPermute),
            "permute-then-channel" | "equation" => Ok(Self::PermuteThenChannel),
            other => Err(Error::Contract(format!("unknown permutation convention '{other}'"))),
        }
    }
}

impl std::fmt::Display for PermutationConvention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::ChannelThenPermute => "channel-then-permute",
            Self::PermuteThenChannel => "permute-then-channel",
        })
    }
}

/// A minimum over the permutation table and the index attaining it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimized {
    pub value: f64,
    pub argmin: usize,
}

impl Minimized {
    fn start() -> Self {
        Self { value: f64::INFINITY, argmin: usize::MAX }
    }

    #[inline]
    fn offer(&mut self, value: f64, index: usize) {
        if self.argmin == usize::MAX || value < self.value - TIE_TOL {
            self.value = value;
            self.argmin = index;
        }
    }
}

fn check_dims(p: &JointState, channel: &Channel) -> Result<()> {
    if p.size() != channel.order() {
        return Err(Error::Dimension(format!(
            "state of size {} and channel of order {}",
            p.size(),
            channel.order()
        )));
    }
    Ok(())
}

fn check_table(p: &JointState, table: &PermutationTable) -> Result<()> {
    if p.size() != table.order() {
        return Err(Error::Dimension(format!(
            "state of size {} and permutation table of order {}",
            p.size(),
            table.order()
        )));
    }
    Ok(())
}

/// `Δ_E(p) = I(p) − J(p·E)`, with `J = H(A) − H(A|B)`.
pub fn state_discord(p: &JointState, channel: &Channel) -> Result<f64> {
    check_dims(p, channel)?;
    let noisy = apply_channel(p, channel)?;
    Ok(mutual_information(p) - alternative_mutual_information(&noisy))
}

/// `TV(p·E, p)`.
pub fn state_distortion(p: &JointState, channel: &Channel) -> Result<f64> {
    check_dims(p, channel)?;
    tv_distance(&apply_channel(p, channel)?, p)
}

/// Minimized discord and distortion from a single sweep over the table.
pub fn minimize_over_permutations(
    p: &JointState,
    channel: &Channel,
    table: &PermutationTable,
    convention: PermutationConvention,
) -> Result<(Minimized, Minimized)> {
    check_dims(p, channel)?;
    check_table(p, table)?;
    let n = p.size();
    let ps = p.as_slice();
    let es = channel.matrix_slice();
    let info = mutual_information_slice(ps, n);
    let mut discord = Minimized::start();
    let mut distortion = Minimized::start();
    let mut q = [0.0f64; 64];
    let q = &mut q[..n * n];

    match convention {
        PermutationConvention::ChannelThenPermute => {
            // q = p·E
            for r in 0..n {
                for k in 0..n {
                    let mut acc = 0.0;
                    for i in 0..n {
                        acc += ps[r * n + i] * es[i * n + k];
                    }
                    q[r * n + k] = acc;
                }
            }
            let d = info - mutual_information_slice(q, n);
            for (index, sigma) in table.iter().enumerate() {
                discord.offer(d, index);
                // (qΠ_σ)[r][σ(i)] = q[r][i]
                let img = sigma.image();
                let mut tv = 0.0;
                for r in 0..n {
                    for (i, &j) in img.iter().enumerate() {
                        tv += (q[r * n + i] - ps[r * n + j]).abs();
                    }
                }
                distortion.offer(0.5 * tv, index);
            }
        }
        PermutationConvention::PermuteThenChannel => {
            for (index, sigma) in table.iter().enumerate() {
                let img = sigma.image();
                // q[r][k] = Σ_i p[r][i] E[σ(i)][k]
                for r in 0..n {
                    for k in 0..n {
                        let mut acc = 0.0;
                        for (i, &si) in img.iter().enumerate() {
                            acc += ps[r * n + i] * es[si * n + k];
                        }
                        q[r * n + k] = acc;
                    }
                }
                discord.offer(info - mutual_information_slice(q, n), index);
                // (pΠ_σ)[r][σ(i)] = p[r][i]
                let mut tv = 0.0;
                for r in 0..n {
                    for (i, &j) in img.iter().enumerate() {
                        tv += (q[r * n + j] - ps[r * n + i]).abs();
                    }
                }
                distortion.offer(0.5 * tv, index);
            }
        }
    }
    Ok((discord, distortion))
}

pub fn min_discord_over_permutations(
    p: &JointState,
    channel: &Channel,
    table: &PermutationTable,
    convention: PermutationConvention,
) -> Result<Minimized> {
    minimize_over_permutations(p, channel, table, convention).map(|(d, _)| d)
}

pub fn min_distortion_over_permutations(
    p: &JointState,
    channel: &Channel,
    table: &PermutationTable,
    convention: PermutationConvention,
) -> Result<Minimized> {
    minimize_over_permutations(p, channel, table, convention).map(|(_, d)| d)
}

/// Batch averages of the minimized quantities for one channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelEstimate {
    pub avg_discord: f64,
    pub avg_distortion: f64,
    pub n_states: usize,
    /// Minimizing table indices, one per state.
    pub discord_argmins: Vec<usize>,
    pub distortion_argmins: Vec<usize>,
}

impl ChannelEstimate {
    /// Most frequent distortion-minimizing index; smallest index on ties.
    pub fn distortion_argmin_mode(&self) -> usize {
        mode(&self.distortion_argmins)
    }

    pub fn discord_argmin_mode(&self) -> usize {
        mode(&self.discord_argmins)
    }
}

fn mode(xs: &[usize]) -> usize {
    let mut counts = std::collections::BTreeMap::new();
    for &x in xs {
        *counts.entry(x).or_insert(0usize) += 1;
    }
    let mut best = (0usize, 0usize);
    for (x, c) in counts {
        if c > best.1 {
            best = (x, c);
        }
    }
    best.0
}

/// Sample means of minimized discord and distortion over `batch`.
pub fn estimate_channel(
    channel: &Channel,
    batch: &[JointState],
    table: &PermutationTable,
    convention: PermutationConvention,
) -> Result<ChannelEstimate> {
    if batch.is_empty() {
        return Err(Error::Contract("state batch is empty".into()));
    }
    let mut discord_sum = 0.0;
    let mut distortion_sum = 0.0;
    let mut discord_argmins = Vec::with_capacity(batch.len());
    let mut distortion_argmins = Vec::with_capacity(batch.len());
    for p in batch {
        let (d, t) = minimize_over_permutations(p, channel, table, convention)?;
        discord_sum += d.value;
        distortion_sum += t.value;
        discord_argmins.push(d.argmin);
        distortion_argmins.push(t.argmin);
    }
    let n = batch.len() as f64;
    Ok(ChannelEstimate {
        avg_discord: discord_sum / n,
        avg_distortion: distortion_sum / n,
        n_states: batch.len(),
        discord_argmins,
        distortion_argmins,
    })
}

/// Estimated channel discord: the batch mean of minimized state discord.
pub fn channel_discord(
    channel: &Channel,
    batch: &[JointState],
    table: &PermutationTable,
    convention: PermutationConvention,
) -> Result<f64> {
    estimate_channel(channel, batch, table, convention).map(|e| e.avg_discord)
}

/// Estimated channel distortion: the batch mean of minimized state distortion.
pub fn channel_distortion(
    channel: &Channel,
    batch: &[JointState],
    table: &PermutationTable,
    convention: PermutationConvention,
) -> Result<f64> {
    estimate_channel(channel, batch, table, convention).map(|e| e.avg_distortion)
}
