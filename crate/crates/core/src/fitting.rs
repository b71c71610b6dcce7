//! Quadratic least squares `y = t1·x² + t2·x + t3` and rank correlation.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticFit {
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    /// Root mean squared residual, denominator `n`.
    pub rmse: f64,
    pub n_points: usize,
}

impl QuadraticFit {
    pub fn eval(&self, x: f64) -> f64 {
        (self.t1 * x + self.t2) * x + self.t3
    }
}

/// Relative pivot size below which the design is treated as rank deficient.
const RANK_TOL: f64 = 1e-12;

/// Ordinary least squares on the design `(x², x, 1)`, solved by Householder QR.
pub fn fit_quadratic(points: &[(f64, f64)]) -> Result<QuadraticFit> {
    if points.len() < 3 {
        return Err(Error::Degenerate(format!("{} points cannot determine a quadratic", points.len())));
    }
    if let Some((x, y)) = points.iter().find(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::Domain(format!("non-finite point ({x}, {y})")));
    }
    let n = points.len();
    let design = DMatrix::from_fn(n, 3, |r, c| {
        let x = points[r].0;
        match c {
            0 => x * x,
            1 => x,
            _ => 1.0,
        }
    });
    let rhs = DVector::from_iterator(n, points.iter().map(|p| p.1));
    let qr = design.qr();
    let r = qr.r();
    let scale = (0..3).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    if (0..3).any(|i| r[(i, i)].abs() <= RANK_TOL * scale.max(f64::MIN_POSITIVE)) {
        return Err(Error::Degenerate("design (x², x, 1) is rank deficient; need three distinct x".into()));
    }
    let qty = qr.q().transpose() * rhs;
    let t = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::Degenerate("singular triangular factor".into()))?;
    let mut fit = QuadraticFit { t1: t[0], t2: t[1], t3: t[2], rmse: 0.0, n_points: n };
    fit.rmse = rmse(points, &fit)?;
    Ok(fit)
}

/// `sqrt(Σ residual² / n)`.
pub fn rmse(points: &[(f64, f64)], fit: &QuadraticFit) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::Contract("no points to score".into()));
    }
    let ss: f64 = points.iter().map(|&(x, y)| (y - fit.eval(x)).powi(2)).sum();
    Ok((ss / points.len() as f64).sqrt())
}

/// 1-based ranks with ties sharing their average rank.
fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma).powi(2);
        sbb += (y - mb).powi(2);
    }
    (saa > 0.0 && sbb > 0.0).then(|| sab / (saa * sbb).sqrt())
}

/// Spearman rank correlation, average ranks for ties.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::Dimension(format!("{} x values and {} y values", xs.len(), ys.len())));
    }
    if xs.len() < 2 {
        return Err(Error::Degenerate("rank correlation needs at least two points".into()));
    }
    pearson(&average_ranks(xs), &average_ranks(ys))
        .ok_or_else(|| Error::Degenerate("a constant sample has no rank correlation".into()))
}
