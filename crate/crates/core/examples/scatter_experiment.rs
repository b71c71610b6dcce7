//! A reduced channel sweep with its quadratic fit and rank correlation.
//!
//! `cargo run --release --example scatter_experiment -- 6 42`

use discordlab::experiment::{run_experiment, ExperimentConfig};
use discordlab::fitting::{fit_quadratic, spearman};
use discordlab::states::PriorKind;

fn main() -> discordlab::Result<()> {
    let mut args = std::env::args().skip(1);
    let m: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(5);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(42);
    let config = ExperimentConfig {
        a_grid: 50,
        wdown_per_a: 4,
        states: 20,
        ..ExperimentConfig::reference(m, PriorKind::RandomJoint, seed)
    };
    let start = std::time::Instant::now();
    let points = run_experiment(&config)?;
    println!("{} channels at M = {m} in {:.2?}", points.len(), start.elapsed());

    let xy: Vec<(f64, f64)> = points.iter().map(|p| (p.avg_distortion, p.avg_discord)).collect();
    let fit = fit_quadratic(&xy)?;
    let (xs, ys): (Vec<f64>, Vec<f64>) = xy.iter().copied().unzip();
    println!("discord ≈ {:.3}·D² + {:.3}·D + {:.4}   (rmse {:.4})", fit.t1, fit.t2, fit.t3, fit.rmse);
    println!("spearman(discord, distortion) = {:.4}", spearman(&xs, &ys)?);

    println!("\n  a      H(℘)    discord  distortion");
    for p in points.iter().step_by(points.len() / 10) {
        let a = p.a.map_or("  id ".to_string(), |a| format!("{a:.3}"));
        println!("  {a}  {:6.3}  {:7.4}  {:7.4}", p.weight_entropy, p.avg_discord, p.avg_distortion);
    }
    Ok(())
}
