//! Birkhoff weight vectors, doubly stochastic channels, and their action on Bob's share.
//!
//! A channel is the convex combination `E = Σ_σ ℘_σ Π_σ` over the reverse
//! lexicographic [`PermutationTable`]. Its entropy is the entropy of the
//! generating weights, which is kept alongside the matrix because Birkhoff
//! decompositions are not unique.

use ndarray::Array2;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hadamard::{JointState, ProbVector, NORMALIZATION_TOL};
use crate::permutations::{check_order, factorial, PermutationTable};

/// Convex coefficients over the reverse-lex permutation table.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(ProbVector);

impl WeightVector {
    pub fn new(weights: ProbVector) -> Self {
        Self(weights)
    }

    pub fn from_vec(weights: Vec<f64>) -> Result<Self> {
        ProbVector::new(weights).map(Self)
    }

    /// All mass on a single permutation index.
    pub fn versor(index: usize, len: usize) -> Result<Self> {
        if index >= len {
            return Err(Error::Dimension(format!("weight index {index} out of range for length {len}")));
        }
        let mut w = vec![0.0; len];
        w[index] = 1.0;
        Self::from_vec(w)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn entropy(&self) -> f64 {
        self.0.entropy()
    }
}

/// How the low-entropy prior draws entries after the first.
///
/// Both rules start from `℘¹ ~ U[0,1] / M!` and end by normalizing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LowEntropyRule {
    /// `℘ˡ ~ U[0, max(0, 1 − Σ_{j<ℓ} ℘ʲ)]`: each entry takes a share of the mass still unassigned.
    #[default]
    StickBreaking,
    /// `℘ˡ ~ U[max(0, 1 − Σ_{j<ℓ} ℘ʲ), 1]`. From the third entry on this is `U[0,1]`,
    /// so the result is close to uniform for large `M!`.
    ClampedInterval,
}

impl std::str::FromStr for LowEntropyRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stick-breaking" => Ok(Self::StickBreaking),
            "clamped-interval" => Ok(Self::ClampedInterval),
            other => Err(Error::Contract(format!("unknown low-entropy rule '{other}'"))),
        }
    }
}

impl std::fmt::Display for LowEntropyRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::StickBreaking => "stick-breaking",
            Self::ClampedInterval => "clamped-interval",
        })
    }
}

/// The maximum-entropy weights `1/M!`.
pub fn uniform_weights(m: usize) -> Result<WeightVector> {
    check_order(m)?;
    ProbVector::uniform(factorial(m)).map(WeightVector)
}

/// Low-entropy weights, with `draw` supplying `U[0,1)` variates.
pub fn low_entropy_weights_from_draws<F>(m: usize, rule: LowEntropyRule, mut draw: F) -> Result<WeightVector>
where
    F: FnMut() -> f64,
{
    check_order(m)?;
    let len = factorial(m);
    let mut w = Vec::with_capacity(len);
    let first = draw() / len as f64;
    w.push(first);
    let mut assigned = first;
    for _ in 1..len {
        let remaining = (1.0 - assigned).max(0.0);
        let u = draw();
        let x = match rule {
            LowEntropyRule::StickBreaking => remaining * u,
            LowEntropyRule::ClampedInterval => remaining + (1.0 - remaining) * u,
        };
        w.push(x);
        assigned += x;
    }
    ProbVector::normalized(w).map(WeightVector)
}

pub fn low_entropy_weights<R: Rng + ?Sized>(m: usize, rule: LowEntropyRule, rng: &mut R) -> Result<WeightVector> {
    low_entropy_weights_from_draws(m, rule, || rng.random::<f64>())
}

/// `(a·down + (1−a)·up) / ‖·‖₁`.
pub fn interpolate_weights(down: &WeightVector, up: &WeightVector, a: f64) -> Result<WeightVector> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::Contract(format!("interpolation weight a = {a} outside [0, 1]")));
    }
    if down.len() != up.len() {
        return Err(Error::Dimension(format!(
            "weight vectors of lengths {} and {}",
            down.len(),
            up.len()
        )));
    }
    if a == 0.0 {
        return Ok(up.clone());
    }
    if a == 1.0 {
        return Ok(down.clone());
    }
    let mixed = down.as_slice().iter().zip(up.as_slice()).map(|(d, u)| a * d + (1.0 - a) * u).collect();
    ProbVector::normalized(mixed).map(WeightVector)
}

/// A doubly stochastic noise channel on Bob's messages.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    matrix: Array2<f64>,
    weights: WeightVector,
    entropy: f64,
}

impl Channel {
    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }

    pub fn weights(&self) -> &WeightVector {
        &self.weights
    }

    /// Entropy of the generating weight vector, in bits.
    pub fn entropy(&self) -> f64 {
        self.entropy
    }

    pub fn order(&self) -> usize {
        self.matrix.nrows()
    }

    pub(crate) fn matrix_slice(&self) -> &[f64] {
        self.matrix.as_slice().expect("standard layout")
    }
}

/// `E = Σ_σ ℘_σ Π_σ`, scattering each weight onto its permutation's ones.
pub fn assemble_channel(w: &WeightVector, table: &PermutationTable) -> Result<Channel> {
    if w.len() != table.len() {
        return Err(Error::Dimension(format!(
            "{} weights for a table of {} permutations",
            w.len(),
            table.len()
        )));
    }
    let m = table.order();
    let mut matrix = Array2::zeros((m, m));
    for (weight, sigma) in w.as_slice().iter().zip(table.iter()) {
        if *weight == 0.0 {
            continue;
        }
        for (i, &j) in sigma.image().iter().enumerate() {
            matrix[[i, j]] += weight;
        }
    }
    Ok(Channel { matrix, entropy: w.entropy(), weights: w.clone() })
}

/// The noiseless channel `𝟙`.
pub fn identity_channel(table: &PermutationTable) -> Channel {
    let w = WeightVector::versor(table.identity_index(), table.len()).expect("index in range");
    assemble_channel(&w, table).expect("lengths agree")
}

/// Bob's noisy readout `p ↦ p·E`; Alice's side is the identity.
pub fn apply_channel(p: &JointState, channel: &Channel) -> Result<JointState> {
    if p.size() != channel.order() {
        return Err(Error::Dimension(format!(
            "state of size {} and channel of order {}",
            p.size(),
            channel.order()
        )));
    }
    JointState::new(p.as_array().dot(&channel.matrix))
}

/// Nonnegative with every row and column sum within `tol` of one.
pub fn is_doubly_stochastic(matrix: &Array2<f64>, tol: f64) -> bool {
    let (r, c) = matrix.dim();
    r == c
        && matrix.iter().all(|x| (0.0..=1.0 + tol).contains(x))
        && matrix.rows().into_iter().all(|row| (row.sum() - 1.0).abs() <= tol)
        && matrix.columns().into_iter().all(|col| (col.sum() - 1.0).abs() <= tol)
}

/// Default tolerance for [`is_doubly_stochastic`].
pub const STOCHASTIC_TOL: f64 = NORMALIZATION_TOL;
