//! Two-bit closed forms: discord along the channel parameter and the sign law.
//!
//! `cargo run --example twobit_monotonicity`

use discordlab::twobit::{
    ddelta_dalpha, ddelta_dh, default_mu_grid, g_function, g_maclaurin, monotonicity_scan, twobit_channel_entropy,
    twobit_discord, ScanOptions, TwoBitState,
};

fn main() -> discordlab::Result<()> {
    let s = TwoBitState::new(0.4, 0.1, 0.1, 0.4)?;
    println!("  μ     H(μ)    Δ(μ)     dΔ/dα     dΔ/dH");
    for mu in [0.05, 0.15, 0.25, 0.35, 0.45, 0.55, 0.65, 0.75, 0.85, 0.95] {
        println!(
            "  {mu:.2}  {:.4}  {:.5}  {:+.5}  {:+.5}",
            twobit_channel_entropy(mu)?,
            twobit_discord(&s, mu)?,
            ddelta_dalpha(&s, 2.0 * mu - 1.0)?,
            ddelta_dh(&s, mu)?
        );
    }

    println!("\ng(0.5) = {:.12}, Maclaurin (31 terms) = {:.12}", g_function(0.5)?, g_maclaurin(0.5, 31));

    let mut states = Vec::new();
    for i in 0..=10 {
        for j in 0..=10 - i {
            for k in 0..=10 - i - j {
                let l = 10 - i - j - k;
                states.push(TwoBitState::new(i as f64 / 10.0, j as f64 / 10.0, k as f64 / 10.0, l as f64 / 10.0)?);
            }
        }
    }
    let report = monotonicity_scan(&states, &default_mu_grid(), ScanOptions::default())?;
    println!(
        "scan of {} simplex states × {} μ values: {} violations",
        report.n_states,
        report.n_mu,
        report.violations.len()
    );
    Ok(())
}
