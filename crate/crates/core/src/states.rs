//! Random joint states from the two priors, pulled toward the identity.

use ndarray::Array2;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hadamard::JointState;
use crate::permutations::check_order;

/// Interpolation cap `B` used by the reference experiments.
pub const DEFAULT_CAP: f64 = 99.0;
/// States per channel in the reference experiments.
pub const DEFAULT_GRID_SIZE: usize = 100;
/// Step of the quadratic grid: `a_k = (k · 0.0101)²` for `k = 0..100`.
pub const REFERENCE_STEP: f64 = 0.0101;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PriorKind {
    /// Every entry drawn from `U[0,1]`, then normalized.
    RandomJoint,
    /// Diagonal drawn from `U[0,1]`, then normalized.
    ConditionallyPure,
}

impl std::str::FromStr for PriorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" | "random-joint" => Ok(Self::RandomJoint),
            "cp" | "conditionally-pure" => Ok(Self::ConditionallyPure),
            other => Err(Error::Contract(format!("unknown prior kind '{other}'"))),
        }
    }
}

impl std::fmt::Display for PriorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::RandomJoint => "random-joint",
            Self::ConditionallyPure => "conditionally-pure",
        })
    }
}

/// A state prior together with its interpolation grid.
///
/// Grid point `a` is paired with identity weight `b = (1 − a) · cap`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatePrior {
    pub kind: PriorKind,
    pub cap: f64,
    pub grid: Vec<f64>,
}

impl StatePrior {
    /// The reference grid of 100 quadratically spaced values with `B = 99`.
    pub fn reference(kind: PriorKind) -> Self {
        Self::with_grid_size(kind, DEFAULT_GRID_SIZE)
    }

    /// `n` quadratically spaced points ending at `0.9999`; equals the reference grid for `n = 100`.
    pub fn with_grid_size(kind: PriorKind, n: usize) -> Self {
        let step = if n > 1 { REFERENCE_STEP * 99.0 / (n - 1) as f64 } else { 0.0 };
        let grid = (0..n).map(|k| (k as f64 * step).powi(2)).collect();
        Self { kind, cap: DEFAULT_CAP, grid }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cap >= 1.0) {
            return Err(Error::Contract(format!("interpolation cap {} must be at least 1", self.cap)));
        }
        if self.grid.is_empty() {
            return Err(Error::Contract("state grid is empty".into()));
        }
        if let Some(a) = self.grid.iter().find(|a| !(0.0..=1.0).contains(*a)) {
            return Err(Error::Contract(format!("grid value {a} outside [0, 1]")));
        }
        Ok(())
    }

    pub fn companion(&self, a: f64) -> f64 {
        (1.0 - a) * self.cap
    }
}

/// An `m × m` matrix of `U[0,1]` draws normalized by its sum.
pub fn sample_random_joint<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<JointState> {
    check_order(m)?;
    loop {
        let raw = Array2::from_shape_fn((m, m), |_| rng.random::<f64>());
        if raw.sum() > 0.0 {
            return JointState::normalized(raw);
        }
    }
}

/// A diagonal matrix of `U[0,1]` draws normalized by its sum.
pub fn sample_conditionally_pure<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<JointState> {
    check_order(m)?;
    loop {
        let diag: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
        if diag.iter().sum::<f64>() > 0.0 {
            return JointState::normalized(Array2::from_diag(&ndarray::Array1::from(diag)));
        }
    }
}

/// `(a·p + b·𝟙) / ‖a·p + b·𝟙‖₁`.
pub fn interpolate_with_identity(p: &JointState, a: f64, b: f64) -> Result<JointState> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::Contract(format!("interpolation weight a = {a} outside [0, 1]")));
    }
    if !(b >= 0.0) {
        return Err(Error::Contract(format!("identity weight b = {b} must be nonnegative")));
    }
    if a == 0.0 && b == 0.0 {
        return Err(Error::Degenerate("a = b = 0 leaves nothing to normalize".into()));
    }
    let m = p.size();
    let mixed = p.as_array() * a + Array2::<f64>::eye(m) * b;
    JointState::normalized(mixed)
}

pub fn sample_state<R: Rng + ?Sized>(kind: PriorKind, m: usize, rng: &mut R) -> Result<JointState> {
    match kind {
        PriorKind::RandomJoint => sample_random_joint(m, rng),
        PriorKind::ConditionallyPure => sample_conditionally_pure(m, rng),
    }
}

/// One fresh draw from the prior per grid point, each pulled toward the identity.
pub fn state_batch<R: Rng + ?Sized>(prior: &StatePrior, m: usize, rng: &mut R) -> Result<Vec<JointState>> {
    prior.validate()?;
    prior
        .grid
        .iter()
        .map(|&a| {
            let p = sample_state(prior.kind, m, rng)?;
            interpolate_with_identity(&p, a, prior.companion(a))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hadamard::{
        conditional_entropy_a_given_b, conditional_entropy_b_given_a, is_conditionally_pure,
        marginal_a, mutual_information, NORMALIZATION_TOL, PURITY_TOL,
    };
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn reference_grid_endpoints() {
        let prior = StatePrior::reference(PriorKind::RandomJoint);
        assert_eq!(prior.grid.len(), 100);
        assert_eq!(prior.grid[0], 0.0);
        assert_abs_diff_eq!(prior.grid[1], 0.0101f64.powi(2), epsilon = 1e-18);
        assert_abs_diff_eq!(prior.grid[99], (99.0f64 * 0.0101).powi(2), epsilon = 1e-15);
        assert_abs_diff_eq!(prior.grid[99], 0.999_800_01, epsilon = 1e-12);
        assert_eq!(prior.companion(0.0), 99.0);
    }

    #[test]
    fn random_joint_entropy_is_high() {
        let bound = 0.9 * 36f64.log2();
        let mean: f64 = (0..1000u64)
            .map(|s| {
                let mut rng = ChaCha8Rng::seed_from_u64(s);
                sample_random_joint(6, &mut rng).unwrap().entropy()
            })
            .sum::<f64>()
            / 1000.0;
        assert!(mean > bound, "mean entropy {mean} <= {bound}");
    }

    #[test]
    fn seeded_sampling_is_deterministic() {
        let a = sample_random_joint(4, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let b = sample_random_joint(4, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let c = sample_random_joint(4, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.as_array().iter().all(|x| *x >= 0.0));
        assert!((a.as_array().sum() - 1.0).abs() <= NORMALIZATION_TOL);
    }

    #[test]
    fn conditionally_pure_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let p = sample_conditionally_pure(5, &mut rng).unwrap();
            assert!(is_conditionally_pure(&p));
            assert!(conditional_entropy_a_given_b(&p) <= PURITY_TOL);
            assert!(conditional_entropy_b_given_a(&p) <= PURITY_TOL);
            // For a diagonal state I = H(diagonal) = H(A).
            let diag: f64 = (0..5)
                .map(|i| p.as_array()[[i, i]])
                .filter(|x| *x > 0.0)
                .map(|x| -x * x.log2())
                .sum();
            assert_abs_diff_eq!(mutual_information(&p), diag, epsilon = 1e-12);
            assert_abs_diff_eq!(marginal_a(&p).entropy(), diag, epsilon = 1e-12);
            assert!(diag <= 5f64.log2() + 1e-12);
        }
    }

    #[test]
    fn interpolation_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = sample_random_joint(3, &mut rng).unwrap();
        let same = interpolate_with_identity(&p, 1.0, 0.0).unwrap();
        for (x, y) in same.as_slice().iter().zip(p.as_slice()) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-15);
        }

        let eye = interpolate_with_identity(&p, 0.0, 99.0).unwrap();
        assert_eq!(eye.as_array(), &(Array2::<f64>::eye(3) / 3.0));

        // (0.5 · 0.25 + 49.5) / 99.5 on the diagonal, 0.5 · 0.25 / 99.5 off it.
        let u = JointState::from_rows(&[&[0.25, 0.25], &[0.25, 0.25]]).unwrap();
        let q = interpolate_with_identity(&u, 0.5, 49.5).unwrap();
        let on = 49.625 / 99.5;
        let off = 0.125 / 99.5;
        assert_abs_diff_eq!(q.as_array()[[0, 0]], on, epsilon = 1e-15);
        assert_abs_diff_eq!(q.as_array()[[1, 1]], on, epsilon = 1e-15);
        assert_abs_diff_eq!(q.as_array()[[0, 1]], off, epsilon = 1e-15);
        assert_abs_diff_eq!(q.as_array()[[1, 0]], off, epsilon = 1e-15);

        assert!(matches!(interpolate_with_identity(&p, 0.0, 0.0), Err(Error::Degenerate(_))));
        assert!(matches!(interpolate_with_identity(&p, 1.5, 1.0), Err(Error::Contract(_))));
    }

    #[test]
    fn batches() {
        let prior = StatePrior::reference(PriorKind::RandomJoint);
        let batch = state_batch(&prior, 6, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(batch.len(), 100);
        for s in &batch {
            assert!((s.as_array().sum() - 1.0).abs() <= NORMALIZATION_TOL);
        }
        let hs: Vec<f64> = batch.iter().map(JointState::entropy).collect();
        let spread = hs.iter().cloned().fold(f64::MIN, f64::max) - hs.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread >= 2.0, "entropy spread {spread}");

        let again = state_batch(&prior, 6, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(batch, again);

        let cp = StatePrior::reference(PriorKind::ConditionallyPure);
        let batch = state_batch(&cp, 6, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert!(batch.iter().all(is_conditionally_pure));
    }

    #[test]
    fn guard_and_prior_parsing() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(sample_random_joint(9, &mut rng), Err(Error::Capacity(9))));
        assert_eq!("random".parse::<PriorKind>().unwrap(), PriorKind::RandomJoint);
        assert_eq!("cp".parse::<PriorKind>().unwrap(), PriorKind::ConditionallyPure);
        assert!("bogus".parse::<PriorKind>().is_err());
    }
}
