//! Writes a scatter CSV and SVG, then reads the CSV back and refits it.
//!
//! `cargo run --example fit_and_plot -- /tmp/discordlab-demo`

use std::path::PathBuf;

use discordlab::cli::{read_scatter_csv, scatter_to_csv};
use discordlab::experiment::{run_experiment, ExperimentConfig};
use discordlab::fitting::fit_quadratic;
use discordlab::plot::render_scatter_svg;
use discordlab::states::PriorKind;

fn main() -> discordlab::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "discordlab-demo".into()));
    std::fs::create_dir_all(&dir)?;
    let config = ExperimentConfig {
        a_grid: 20,
        wdown_per_a: 5,
        states: 15,
        ..ExperimentConfig::reference(4, PriorKind::RandomJoint, 3)
    };
    let points = run_experiment(&config)?;
    let csv = dir.join("scatter.csv");
    std::fs::write(&csv, scatter_to_csv(&points)?)?;

    let back = read_scatter_csv(&csv)?;
    assert_eq!(back, points);
    let fit = fit_quadratic(&back.iter().map(|p| (p.avg_distortion, p.avg_discord)).collect::<Vec<_>>())?;
    let svg = dir.join("scatter.svg");
    std::fs::write(&svg, render_scatter_svg(&back, config.m, Some(&fit)))?;
    println!("wrote {} and {}", csv.display(), svg.display());
    println!("t1 = {:.4}, t2 = {:.4}, t3 = {:.4}, rmse = {:.4}", fit.t1, fit.t2, fit.t3, fit.rmse);
    Ok(())
}
