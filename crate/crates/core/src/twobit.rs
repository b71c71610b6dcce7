//! Closed forms for two-bit states under the one-parameter channel
//! `E(μ) = (1 − μ)·𝟙 + μ·X`, and a numerical scan of discord monotonicity.
//!
//! With `α = 2μ − 1`, `γ = p00 − p01 + p10 − p11`, the row biases
//! `γ_i` and row weights `w_i`, the discord derivative in bits is
//!
//! ```text
//! dΔ/dα = ½ · [ f_α(γ) − w0·f_α(γ0) − w1·f_α(γ1) ],   f_α(x) = x·log₂((1 + αx)/(1 − αx))
//! ```
//!
//! Since `f_α(x) = 2·g(αx)/(α·ln 2)` with `g(y) = y·atanh(y)` convex, Jensen's
//! inequality gives `sgn(dΔ/dα) = −sgn(α)` whenever `γ0 ≠ γ1`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{assemble_channel, Channel, WeightVector};
use crate::error::{Error, Result};
use crate::hadamard::{JointState, NORMALIZATION_TOL};
use crate::permutations::PermutationTable;

#[inline]
fn xlog2x(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoBitState {
    pub p00: f64,
    pub p01: f64,
    pub p10: f64,
    pub p11: f64,
}

impl TwoBitState {
    pub fn new(p00: f64, p01: f64, p10: f64, p11: f64) -> Result<Self> {
        let s = Self { p00, p01, p10, p11 };
        let entries = s.entries();
        if let Some(x) = entries.iter().find(|x| !(**x >= 0.0) || !x.is_finite()) {
            return Err(Error::Domain(format!("two-bit entry {x} is not a nonnegative real")));
        }
        let sum: f64 = entries.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::Contract(format!("two-bit entries sum to {sum}, not 1")));
        }
        Ok(s)
    }

    pub fn entries(&self) -> [f64; 4] {
        [self.p00, self.p01, self.p10, self.p11]
    }

    pub fn to_joint(&self) -> JointState {
        JointState::from_rows(&[&[self.p00, self.p01], &[self.p10, self.p11]]).expect("validated two-bit state")
    }

    /// Row biases and weights; a row of zero weight has bias 0.
    pub fn parts(&self) -> TwoBitDerivativeParts {
        let w0 = self.p00 + self.p01;
        let w1 = self.p10 + self.p11;
        let bias = |a: f64, b: f64, w: f64| if w > 0.0 { (a - b) / w } else { 0.0 };
        TwoBitDerivativeParts {
            gamma0: bias(self.p00, self.p01, w0),
            gamma1: bias(self.p10, self.p11, w1),
            w0,
            w1,
        }
    }
}

impl TryFrom<&JointState> for TwoBitState {
    type Error = Error;

    fn try_from(p: &JointState) -> Result<Self> {
        if p.size() != 2 {
            return Err(Error::Dimension(format!("expected a 2×2 state, got size {}", p.size())));
        }
        let a = p.as_array();
        Self::new(a[[0, 0]], a[[0, 1]], a[[1, 0]], a[[1, 1]])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoBitDerivativeParts {
    pub gamma0: f64,
    pub gamma1: f64,
    pub w0: f64,
    pub w1: f64,
}

impl TwoBitDerivativeParts {
    /// `w0·γ0 + w1·γ1 = p00 − p01 + p10 − p11`.
    pub fn gamma(&self) -> f64 {
        self.w0 * self.gamma0 + self.w1 * self.gamma1
    }
}

/// `(1 − μ)·𝟙 + μ·X`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoBitChannel {
    pub mu: f64,
}

impl TwoBitChannel {
    pub fn new(mu: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&mu) {
            return Err(Error::Domain(format!("μ = {mu} outside [0, 1]")));
        }
        Ok(Self { mu })
    }

    pub fn from_alpha(alpha: f64) -> Result<Self> {
        Self::new((1.0 + alpha) / 2.0)
    }

    pub fn alpha(&self) -> f64 {
        2.0 * self.mu - 1.0
    }

    pub fn matrix(&self) -> [[f64; 2]; 2] {
        [[1.0 - self.mu, self.mu], [self.mu, 1.0 - self.mu]]
    }

    /// Weights over the order-2 table `[swap, identity]`.
    pub fn weights(&self) -> WeightVector {
        WeightVector::from_vec(vec![self.mu, 1.0 - self.mu]).expect("μ in [0, 1]")
    }

    pub fn channel(&self) -> Channel {
        let table = PermutationTable::reverse_lex(2).expect("order 2");
        assemble_channel(&self.weights(), &table).expect("two weights")
    }

    pub fn entropy(&self) -> f64 {
        -xlog2x(1.0 - self.mu) - xlog2x(self.mu)
    }
}

/// Binary entropy of the channel weights, in bits.
pub fn twobit_channel_entropy(mu: f64) -> Result<f64> {
    Ok(TwoBitChannel::new(mu)?.entropy())
}

/// `Δ_E(μ)(p)` from the expanded entropy terms.
pub fn twobit_discord(state: &TwoBitState, mu: f64) -> Result<f64> {
    TwoBitChannel::new(mu)?;
    let TwoBitState { p00, p01, p10, p11 } = *state;
    let nu = 1.0 - mu;
    let q00 = nu * p00 + mu * p01;
    let q01 = mu * p00 + nu * p01;
    let q10 = nu * p10 + mu * p11;
    let q11 = mu * p10 + nu * p11;
    Ok(xlog2x(q00 + q10) + xlog2x(q01 + q11)
        - xlog2x(q00)
        - xlog2x(q01)
        - xlog2x(q10)
        - xlog2x(q11)
        - xlog2x(p00 + p10)
        - xlog2x(p01 + p11)
        + xlog2x(p00)
        + xlog2x(p01)
        + xlog2x(p10)
        + xlog2x(p11))
}

/// `f_α(x) = x·log₂((1 + αx)/(1 − αx))` for `|αx| < 1`.
fn f_alpha(alpha: f64, x: f64) -> f64 {
    x * 2.0 * (alpha * x).atanh() / std::f64::consts::LN_2
}

/// `dΔ/dα` at `α ∈ (−1, 1)`.
pub fn ddelta_dalpha(state: &TwoBitState, alpha: f64) -> Result<f64> {
    if !(alpha.abs() < 1.0) {
        return Err(Error::Domain(format!("α = {alpha} outside (−1, 1)")));
    }
    let parts = state.parts();
    let mut d = f_alpha(alpha, parts.gamma());
    if parts.w0 > 0.0 {
        d -= parts.w0 * f_alpha(alpha, parts.gamma0);
    }
    if parts.w1 > 0.0 {
        d -= parts.w1 * f_alpha(alpha, parts.gamma1);
    }
    Ok(0.5 * d)
}

/// `dΔ/dH = (dΔ/dμ) / (log₂(1 − μ) − log₂ μ)`, singular at `μ = ½`.
pub fn ddelta_dh(state: &TwoBitState, mu: f64) -> Result<f64> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(Error::Domain(format!("μ = {mu} outside (0, 1)")));
    }
    if mu == 0.5 {
        return Err(Error::Domain("dΔ/dH is singular at μ = 1/2".into()));
    }
    let dmu = 2.0 * ddelta_dalpha(state, 2.0 * mu - 1.0)?;
    Ok(dmu / ((1.0 - mu).log2() - mu.log2()))
}

/// `g(y) = y·atanh(y)` on `(−1, 1)`.
pub fn g_function(y: f64) -> Result<f64> {
    if !(y.abs() < 1.0) {
        return Err(Error::Domain(format!("g is defined on (−1, 1), got {y}")));
    }
    let y = y.abs();
    Ok(y * y.atanh())
}

/// `Σ_{k=0}^{terms−1} y^{2k+2}/(2k+1)`.
pub fn g_maclaurin(y: f64, terms: usize) -> f64 {
    let y2 = y * y;
    let mut power = y2;
    let mut sum = 0.0;
    for k in 0..terms {
        sum += power / (2 * k + 1) as f64;
        power *= y2;
    }
    sum
}

/// True when every interior divided second difference of `g` over the sorted `grid` is positive.
pub fn convexity_check(grid: &[f64]) -> Result<bool> {
    let mut xs = grid.to_vec();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let gs = xs.iter().map(|&x| g_function(x)).collect::<Result<Vec<_>>>()?;
    Ok(xs.windows(3).zip(gs.windows(3)).all(|(x, g)| {
        let left = (g[1] - g[0]) / (x[1] - x[0]);
        let right = (g[2] - g[1]) / (x[2] - x[1]);
        right - left > 0.0
    }))
}

/// `k/100` for `k = 1..=99`.
pub fn default_mu_grid() -> Vec<f64> {
    (1..100).map(|k| k as f64 / 100.0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    /// `Δ` decreased between consecutive grid points below `½`.
    DecreasingBelowHalf,
    /// `Δ` increased between consecutive grid points above `½`.
    IncreasingAboveHalf,
    /// `dΔ/dα` has the same sign as `α`.
    SignLaw,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub state_index: usize,
    pub state: TwoBitState,
    pub mu: f64,
    pub kind: ViolationKind,
    pub value: f64,
}

/// Per-μ averages over the scanned states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub mu: f64,
    pub entropy: f64,
    pub avg_discord: f64,
    pub avg_ddelta_dalpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub n_states: usize,
    pub n_mu: usize,
    pub violations: Vec<Violation>,
    pub curve: Vec<CurvePoint>,
}

impl MonotonicityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    /// Slack on monotone steps and on derivatives treated as zero.
    pub tolerance: f64,
    /// Negates every derivative; exercises the violation path.
    pub inject_sign_flip: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self { tolerance: 1e-12, inject_sign_flip: false }
    }
}

struct StateScan {
    discord: Vec<f64>,
    derivative: Vec<f64>,
    violations: Vec<Violation>,
}

fn scan_state(index: usize, state: &TwoBitState, grid: &[f64], opts: ScanOptions) -> Result<StateScan> {
    let tol = opts.tolerance;
    let discord = grid.iter().map(|&mu| twobit_discord(state, mu)).collect::<Result<Vec<_>>>()?;
    let derivative = grid
        .iter()
        .map(|&mu| {
            let d = ddelta_dalpha(state, 2.0 * mu - 1.0)?;
            Ok(if opts.inject_sign_flip { -d } else { d })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut violations = Vec::new();
    let mut flag = |mu: f64, kind, value| violations.push(Violation { state_index: index, state: *state, mu, kind, value });
    for k in 1..grid.len() {
        let step = discord[k] - discord[k - 1];
        if grid[k] <= 0.5 && step < -tol {
            flag(grid[k], ViolationKind::DecreasingBelowHalf, step);
        }
        if grid[k - 1] >= 0.5 && step > tol {
            flag(grid[k], ViolationKind::IncreasingAboveHalf, step);
        }
    }
    for (&mu, &d) in grid.iter().zip(&derivative) {
        let alpha = 2.0 * mu - 1.0;
        if d.abs() > tol && alpha != 0.0 && d.signum() == alpha.signum() {
            flag(mu, ViolationKind::SignLaw, d);
        }
    }
    Ok(StateScan { discord, derivative, violations })
}

/// Checks, for every state, that `Δ(μ)` rises up to `μ = ½` and falls after it,
/// and that `dΔ/dα` has sign `−sgn(α)` or vanishes.
pub fn monotonicity_scan(states: &[TwoBitState], mu_grid: &[f64], opts: ScanOptions) -> Result<MonotonicityReport> {
    if let Some(mu) = mu_grid.iter().find(|m| !(**m > 0.0 && **m < 1.0)) {
        return Err(Error::Domain(format!("μ grid value {mu} outside (0, 1)")));
    }
    if mu_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Contract("μ grid must be strictly increasing".into()));
    }
    let scans = states
        .par_iter()
        .enumerate()
        .map(|(i, s)| scan_state(i, s, mu_grid, opts))
        .collect::<Result<Vec<_>>>()?;
    let n = states.len().max(1) as f64;
    let curve = mu_grid
        .iter()
        .enumerate()
        .map(|(k, &mu)| CurvePoint {
            mu,
            entropy: TwoBitChannel { mu }.entropy(),
            avg_discord: scans.iter().map(|s| s.discord[k]).sum::<f64>() / n,
            avg_ddelta_dalpha: scans.iter().map(|s| s.derivative[k]).sum::<f64>() / n,
        })
        .collect();
    Ok(MonotonicityReport {
        n_states: states.len(),
        n_mu: mu_grid.len(),
        violations: scans.into_iter().flat_map(|s| s.violations).collect(),
        curve,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::state_discord;
    use crate::states::sample_random_joint;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn st(a: f64, b: f64, c: f64, d: f64) -> TwoBitState {
        TwoBitState::new(a, b, c, d).unwrap()
    }

    fn random_states(n: usize, seed: u64) -> Vec<TwoBitState> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| TwoBitState::try_from(&sample_random_joint(2, &mut rng).unwrap()).unwrap())
            .collect()
    }

    fn central(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
        (f(x + h) - f(x - h)) / (2.0 * h)
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(twobit_channel_entropy(0.0).unwrap(), 0.0);
        assert_eq!(twobit_channel_entropy(0.5).unwrap(), 1.0);
        let third = -(2.0 / 3.0) * (2.0f64 / 3.0).log2() - (1.0 / 3.0) * (1.0f64 / 3.0).log2();
        assert_abs_diff_eq!(twobit_channel_entropy(1.0 / 3.0).unwrap(), third, epsilon = 1e-15);
        assert_abs_diff_eq!(third, 0.9183, epsilon = 1e-4);
        assert!(twobit_channel_entropy(1.2).is_err());
    }

    #[test]
    fn channel_matrix_and_weights_agree() {
        for mu in [0.0, 0.2, 0.5, 0.9, 1.0] {
            let c = TwoBitChannel::new(mu).unwrap();
            let m = c.matrix();
            let e = c.channel();
            assert_eq!(e.matrix(), &ndarray::arr2(&m));
            assert_abs_diff_eq!(e.entropy(), c.entropy(), epsilon = 1e-15);
            assert!(crate::channels::is_doubly_stochastic(e.matrix(), 1e-12));
        }
        assert_abs_diff_eq!(TwoBitChannel::from_alpha(0.5).unwrap().mu, 0.75);
    }

    #[test]
    fn discord_examples() {
        for s in random_states(20, 1) {
            assert!(twobit_discord(&s, 0.0).unwrap().abs() <= 1e-15);
        }
        assert_abs_diff_eq!(twobit_discord(&st(0.5, 0.0, 0.0, 0.5), 0.5).unwrap(), 1.0, epsilon = 1e-15);
        let prod = st(0.2 * 0.7, 0.2 * 0.3, 0.8 * 0.7, 0.8 * 0.3);
        for mu in [0.1, 0.4, 0.77] {
            assert!(twobit_discord(&prod, mu).unwrap().abs() <= 1e-15);
        }
    }

    #[test]
    fn closed_form_matches_generic_estimator_on_simplex_grid() {
        let n = 20;
        let mut worst = 0.0f64;
        for i in 0..=n {
            for j in 0..=n - i {
                for k in 0..=n - i - j {
                    let l = n - i - j - k;
                    let s = st(i as f64 / 20.0, j as f64 / 20.0, k as f64 / 20.0, l as f64 / 20.0);
                    let p = s.to_joint();
                    for m in 0..=10 {
                        let mu = m as f64 / 10.0;
                        let generic = state_discord(&p, &TwoBitChannel::new(mu).unwrap().channel()).unwrap();
                        worst = worst.max((twobit_discord(&s, mu).unwrap() - generic).abs());
                    }
                }
            }
        }
        assert!(worst <= 1e-12, "worst gap {worst}");
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let s = st(0.4, 0.1, 0.1, 0.4);
        let h = 1e-5;
        let fd = central(|a| twobit_discord(&s, (1.0 + a) / 2.0).unwrap(), 0.5, h);
        let d = ddelta_dalpha(&s, 0.5).unwrap();
        assert!(d < 0.0);
        assert!((d - fd).abs() <= 1e-6 * fd.abs(), "{d} vs {fd}");

        for s in random_states(200, 2) {
            for alpha in [-0.95, -0.6, -0.2, 0.1, 0.45, 0.9] {
                let fd = central(|a| twobit_discord(&s, (1.0 + a) / 2.0).unwrap(), alpha, h);
                let d = ddelta_dalpha(&s, alpha).unwrap();
                assert!((d - fd).abs() <= 1e-6 * fd.abs() + 1e-9, "{s:?} α={alpha}: {d} vs {fd}");
            }
        }
    }

    #[test]
    fn derivative_examples_and_domain() {
        for s in random_states(20, 3) {
            assert_eq!(ddelta_dalpha(&s, 0.0).unwrap(), 0.0);
        }
        let equal_bias = st(0.3, 0.1, 0.45, 0.15);
        for alpha in [-0.7, 0.3, 0.9] {
            assert!(ddelta_dalpha(&equal_bias, alpha).unwrap().abs() <= 1e-15);
        }
        let s = st(0.25, 0.25, 0.25, 0.25);
        assert!(matches!(ddelta_dalpha(&s, 1.0), Err(Error::Domain(_))));
        assert!(matches!(ddelta_dalpha(&s, -1.5), Err(Error::Domain(_))));
    }

    #[test]
    fn sign_law() {
        for s in random_states(300, 4) {
            for k in 1..20 {
                let alpha = -0.95 + 0.1 * k as f64;
                let d = ddelta_dalpha(&s, alpha).unwrap();
                assert!(d.abs() <= 1e-12 || d.signum() == -alpha.signum(), "{s:?} α={alpha} d={d}");
            }
        }
    }

    #[test]
    fn ddelta_dh_examples() {
        let s = st(0.4, 0.1, 0.1, 0.4);
        let a = ddelta_dh(&s, 0.25).unwrap();
        let b = ddelta_dh(&s, 0.75).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        assert!(a > 0.0);
        let prod = st(0.2 * 0.7, 0.2 * 0.3, 0.8 * 0.7, 0.8 * 0.3);
        assert!(ddelta_dh(&prod, 0.3).unwrap().abs() <= 1e-15);
        assert!(matches!(ddelta_dh(&s, 0.5), Err(Error::Domain(_))));
        assert!(ddelta_dh(&s, 0.0).is_err());

        let h = 1e-5;
        for s in random_states(50, 5) {
            for mu in [0.1, 0.3, 0.45, 0.6, 0.85] {
                let num = central(|m| twobit_discord(&s, m).unwrap(), mu, h);
                let den = central(|m| twobit_channel_entropy(m).unwrap(), mu, h);
                let d = ddelta_dh(&s, mu).unwrap();
                assert!(d >= -1e-12);
                assert!((d - num / den).abs() <= 1e-5 * d.abs() + 1e-9, "{d} vs {}", num / den);
            }
        }
    }

    #[test]
    fn discord_is_symmetric_in_mu() {
        for s in random_states(100, 6) {
            for mu in [0.0, 0.13, 0.3, 0.49] {
                assert_abs_diff_eq!(twobit_discord(&s, mu).unwrap(), twobit_discord(&s, 1.0 - mu).unwrap(), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn g_examples() {
        assert_eq!(g_function(0.0).unwrap(), 0.0);
        for y in [0.1, 0.5, 0.93] {
            assert_eq!(g_function(y).unwrap(), g_function(-y).unwrap());
        }
        let direct = g_function(0.5).unwrap();
        assert!((g_maclaurin(0.5, 31) - direct).abs() <= 1e-10);
        assert!((g_maclaurin(0.5, 5) - direct).abs() > 1e-10);
        let g = |y| g_function(y).unwrap();
        assert!(g(0.1) - 2.0 * g(0.2) + g(0.3) > 0.0);
        let grid: Vec<f64> = (-99..=99).map(|k| k as f64 / 100.0).collect();
        assert!(convexity_check(&grid).unwrap());
        assert!(g_function(1.0).is_err());
        assert!(convexity_check(&[0.2, 1.0]).is_err());
    }

    #[test]
    fn scan_random_and_boundary_states() {
        let grid = default_mu_grid();
        assert_eq!(grid.len(), 99);
        let report = monotonicity_scan(&random_states(1000, 7), &grid, ScanOptions::default()).unwrap();
        assert!(report.passed(), "{:?}", &report.violations[..report.violations.len().min(3)]);
        assert_eq!(report.curve.len(), 99);

        let boundary = [
            st(0.5, 0.0, 0.2, 0.3),
            st(0.0, 0.6, 0.4, 0.0),
            st(1.0, 0.0, 0.0, 0.0),
            st(0.5, 0.5, 0.0, 0.0),
            st(0.5, 0.0, 0.0, 0.5),
        ];
        let report = monotonicity_scan(&boundary, &grid, ScanOptions::default()).unwrap();
        assert!(report.passed(), "{:?}", report.violations);
    }

    #[test]
    fn symmetric_state_curve() {
        // I(p·E) = 1 − H(μ), so Δ = H(μ): zero at μ ∈ {0, 1}, one bit at μ = ½.
        let s = st(0.5, 0.0, 0.0, 0.5);
        for mu in [0.0, 0.1, 0.5, 0.8, 1.0] {
            assert_abs_diff_eq!(twobit_discord(&s, mu).unwrap(), twobit_channel_entropy(mu).unwrap(), epsilon = 1e-15);
        }
        assert_eq!(twobit_discord(&s, 0.0).unwrap(), 0.0);
        assert_eq!(twobit_discord(&s, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn injected_sign_flip_is_reported() {
        let opts = ScanOptions { inject_sign_flip: true, ..ScanOptions::default() };
        let report = monotonicity_scan(&random_states(5, 8), &default_mu_grid(), opts).unwrap();
        assert!(!report.passed());
        assert!(report.violations.iter().all(|v| v.kind == ViolationKind::SignLaw));
        assert!(monotonicity_scan(&[], &[0.5, 0.2], ScanOptions::default()).is_err());
        assert!(monotonicity_scan(&[], &[0.0, 0.2], ScanOptions::default()).is_err());
    }
}
