//! Command-line front end: `run`, `fit`, `twobit` and `plot`.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 property violation.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::channels::LowEntropyRule;
use crate::error::{Error, Result};
use crate::estimators::PermutationConvention;
use crate::experiment::{run_channels, ExperimentConfig, ScatterPoint};
use crate::fitting::{fit_quadratic, spearman, QuadraticFit};
use crate::plot::render_scatter_svg;
use crate::states::{sample_random_joint, PriorKind};
use crate::twobit::{ddelta_dalpha, monotonicity_scan, twobit_discord, ScanOptions, TwoBitState};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

pub const SCATTER_HEADER: [&str; 7] =
    ["channel_id", "a", "weight_entropy_bits", "avg_discord_bits", "avg_distortion", "n_states", "argmin_mode"];

pub const SCATTER_FILE: &str = "scatter.csv";
pub const PARTIAL_FILE: &str = "scatter.partial.csv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const SVG_FILE: &str = "scatter.svg";

#[derive(Debug, Parser)]
#[command(name = "discordlab", version, about = "Classical discord and distortion of doubly stochastic channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score a sweep of random channels and write scatter.csv, manifest.json and scatter.svg.
    Run(RunArgs),
    /// Fit discord = t1·distortion² + t2·distortion + t3 to a scatter CSV.
    Fit(FitArgs),
    /// Scan two-bit discord for monotonicity in the channel parameter.
    Twobit(TwobitArgs),
    /// Render a scatter CSV as SVG.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Message size M (2 to 8).
    #[arg(long)]
    pub m: usize,
    /// State prior: random | cp.
    #[arg(long, default_value = "random")]
    pub prior: PriorKind,
    /// Number of interpolation weights a, equally spaced on [0, 1].
    #[arg(long, default_value_t = 100)]
    pub a_grid: usize,
    /// Low-entropy weight draws per value of a.
    #[arg(long, default_value_t = 60)]
    pub wdown_per_a: usize,
    /// States averaged per channel.
    #[arg(long, default_value_t = 100)]
    pub states: usize,
    /// Master seed; channel c uses ChaCha8 stream c
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Leave out the noiseless channel.
    #[arg(long)]
    pub no_identity: bool,
    /// channel-then-permute | permute-then-channel.
    #[arg(long, default_value = "channel-then-permute")]
    pub convention: PermutationConvention,
    /// stick-breaking | clamped-interval.
    #[arg(long, default_value = "stick-breaking")]
    pub low_entropy_rule: LowEntropyRule,
    /// Output directory
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Continue from scatter.partial.csv in the output directory.
    #[arg(long)]
    pub resume: bool,
}

impl RunArgs {
    pub fn config(&self) -> ExperimentConfig {
        ExperimentConfig {
            m: self.m,
            prior: self.prior,
            a_grid: self.a_grid,
            wdown_per_a: self.wdown_per_a,
            states: self.states,
            seed: self.seed,
            include_identity: !self.no_identity,
            convention: self.convention,
            low_entropy_rule: self.low_entropy_rule,
        }
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Scatter CSV written by `run`
    pub input: PathBuf,
    /// Manifest to append the fit to; defaults to manifest.json beside the input, if present.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TwobitArgs {
    /// Random two-bit states in the scan, plus a fixed set of boundary states.
    #[arg(long, default_value_t = 1000)]
    pub states: usize,
    /// Points of the μ grid k/(n+1); points within one spacing of 1/2 are dropped.
    #[arg(long, default_value_t = 99)]
    pub mu_points: usize,
    /// Explicit comma-separated μ values, replacing the generated grid.
    #[arg(long, value_delimiter = ',')]
    pub mu: Option<Vec<f64>>,
    /// Master seed; channel c uses ChaCha8 stream c
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory
    #[arg(long, default_value = "out-twobit")]
    pub out: PathBuf,
    #[arg(long, hide = true)]
    pub inject_sign_flip: bool,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Scatter CSV written by `run`
    pub input: PathBuf,
    /// SVG path; defaults to the input path with an .svg extension
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Message size for the color scale; read from manifest.json beside the input when omitted.
    #[arg(long)]
    pub m: Option<usize>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(&a, out).map(|_| EXIT_OK),
        Command::Fit(a) => cmd_fit(&a, out).map(|_| EXIT_OK),
        Command::Twobit(a) => cmd_twobit(&a, out, err),
        Command::Plot(a) => cmd_plot(&a, out).map(|_| EXIT_OK),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

// ---------- scatter CSV ----------

/// 17 significant digits: enough to round-trip every `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn scatter_row(p: &ScatterPoint) -> [String; 7] {
    [
        p.channel_id.to_string(),
        p.a.map(fmt_f64).unwrap_or_default(),
        fmt_f64(p.weight_entropy),
        fmt_f64(p.avg_discord),
        fmt_f64(p.avg_distortion),
        p.n_states.to_string(),
        p.argmin_mode.to_string(),
    ]
}

/// Serializes points under [`SCATTER_HEADER`].
pub fn scatter_to_csv(points: &[ScatterPoint]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SCATTER_HEADER).map_err(csv_io)?;
    for p in points {
        w.write_record(scatter_row(p)).map_err(csv_io)?;
    }
    String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.to_string()))?).map_err(|e| Error::Io(e.to_string()))
}

fn csv_io(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Parses a scatter CSV. Only `avg_discord_bits` and `avg_distortion` are required.
pub fn parse_scatter_csv(text: &str) -> Result<Vec<ScatterPoint>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = rdr
        .headers()
        .map_err(|e| Error::Parse { line: 1, message: e.to_string() })?
        .clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let (Some(yi), Some(xi)) = (col("avg_discord_bits"), col("avg_distortion")) else {
        return Err(Error::Parse {
            line: 1,
            message: "header must name avg_discord_bits and avg_distortion".into(),
        });
    };
    let (id_i, a_i, h_i, n_i, mode_i) =
        (col("channel_id"), col("a"), col("weight_entropy_bits"), col("n_states"), col("argmin_mode"));
    let mut points = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse {
            line: e.position().map_or(row + 2, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(row + 2, |p| p.line() as usize);
        let field = |i: usize| rec.get(i).unwrap_or("");
        let num = |i: usize, name: &str| -> Result<f64> {
            field(i).parse::<f64>().map_err(|_| Error::Parse {
                line,
                message: format!("{name} = '{}' is not a number", field(i)),
            })
        };
        let int = |i: usize, name: &str| -> Result<usize> {
            field(i).parse::<usize>().map_err(|_| Error::Parse {
                line,
                message: format!("{name} = '{}' is not a nonnegative integer", field(i)),
            })
        };
        points.push(ScatterPoint {
            channel_id: id_i.map(|i| int(i, "channel_id")).transpose()?.unwrap_or(row),
            a: match a_i {
                Some(i) if !field(i).is_empty() => Some(num(i, "a")?),
                _ => None,
            },
            weight_entropy: h_i.map(|i| num(i, "weight_entropy_bits")).transpose()?.unwrap_or(0.0),
            avg_discord: num(yi, "avg_discord_bits")?,
            avg_distortion: num(xi, "avg_distortion")?,
            n_states: n_i.map(|i| int(i, "n_states")).transpose()?.unwrap_or(0),
            argmin_mode: mode_i.map(|i| int(i, "argmin_mode")).transpose()?.unwrap_or(0),
        });
    }
    if points.is_empty() {
        return Err(Error::Parse { line: 1, message: "no data rows".into() });
    }
    Ok(points)
}

pub fn read_scatter_csv(path: &Path) -> Result<Vec<ScatterPoint>> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_scatter_csv(&text)
}

fn fit_points(points: &[ScatterPoint]) -> Vec<(f64, f64)> {
    points.iter().map(|p| (p.avg_distortion, p.avg_discord)).collect()
}

fn fit_json(fit: &QuadraticFit) -> Value {
    json!({
        "t1": fit.t1, "t2": fit.t2, "t3": fit.t3,
        "rmse": fit.rmse, "rmse_denominator": "n", "n_points": fit.n_points,
    })
}

fn unix_seconds() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

// ---------- run ----------

#[derive(Debug, Serialize, Deserialize)]
struct CheckpointHeader {
    config: ExperimentConfig,
}

fn checkpoint_config_path(dir: &Path) -> PathBuf {
    dir.join("scatter.partial.config.json")
}

/// Channels finished by an earlier run with the same configuration.
fn load_checkpoint(dir: &Path, config: &ExperimentConfig) -> Result<Vec<ScatterPoint>> {
    let partial = dir.join(PARTIAL_FILE);
    if !partial.exists() {
        return Ok(Vec::new());
    }
    let saved: CheckpointHeader = serde_json::from_str(
        &fs::read_to_string(checkpoint_config_path(dir)).map_err(|e| Error::Io(format!("checkpoint config: {e}")))?,
    )
    .map_err(|e| Error::Io(format!("checkpoint config: {e}")))?;
    if &saved.config != config {
        return Err(Error::Contract("checkpoint was written with a different configuration".into()));
    }
    let text = fs::read_to_string(&partial)?;
    if text.lines().count() <= 1 {
        return Ok(Vec::new());
    }
    let done = parse_scatter_csv(&text)?;
    if done.iter().enumerate().any(|(i, p)| p.channel_id != i) {
        return Err(Error::Contract("checkpoint rows are not a prefix of the channel ids".into()));
    }
    Ok(done)
}

/// Runs the sweep, checkpointing after each block of channels in id order.
pub fn cmd_run(args: &RunArgs, out: &mut dyn Write) -> Result<Vec<ScatterPoint>> {
    let config = args.config();
    config.validate()?;
    fs::create_dir_all(&args.out).map_err(|e| Error::Io(format!("{}: {e}", args.out.display())))?;
    let dir = args.out.as_path();

    let mut points = if args.resume { load_checkpoint(dir, &config)? } else { Vec::new() };
    write_file(&checkpoint_config_path(dir), &serde_json::to_string_pretty(&CheckpointHeader { config: config.clone() }).expect("serializable"))?;
    {
        let mut partial = csv::Writer::from_path(dir.join(PARTIAL_FILE)).map_err(csv_io)?;
        partial.write_record(SCATTER_HEADER).map_err(csv_io)?;
        for p in &points {
            partial.write_record(scatter_row(p)).map_err(csv_io)?;
        }
        partial.flush()?;
        let total = config.total_channels();
        let block = 8 * rayon::current_num_threads().max(1);
        let mut next = points.len();
        while next < total {
            let ids: Vec<usize> = (next..(next + block).min(total)).collect();
            let chunk = run_channels(&config, &ids, |_| {})?;
            for p in &chunk {
                partial.write_record(scatter_row(p)).map_err(csv_io)?;
            }
            partial.flush()?;
            next += ids.len();
            points.extend(chunk);
        }
    }

    write_file(&dir.join(SCATTER_FILE), &scatter_to_csv(&points)?)?;
    let fit = fit_quadratic(&fit_points(&points)).ok();
    let xs: Vec<f64> = points.iter().map(|p| p.avg_distortion).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.avg_discord).collect();
    let rho = spearman(&xs, &ys).ok();
    let manifest = json!({
        "tool": "discordlab",
        "version": env!("CARGO_PKG_VERSION"),
        "config": config,
        "files": { "scatter": SCATTER_FILE, "plot": SVG_FILE },
        "n_channels": points.len(),
        "fit": fit.as_ref().map(fit_json),
        "spearman_discord_distortion": rho,
        "fits": [],
        "created_unix_seconds": unix_seconds(),
    });
    write_file(&dir.join(MANIFEST_FILE), &serde_json::to_string_pretty(&manifest).expect("serializable"))?;
    write_file(&dir.join(SVG_FILE), &render_scatter_svg(&points, config.m, fit.as_ref()))?;
    let _ = fs::remove_file(dir.join(PARTIAL_FILE));
    let _ = fs::remove_file(checkpoint_config_path(dir));

    let _ = writeln!(out, "wrote {} channels to {}", points.len(), dir.display());
    if let Some(f) = &fit {
        let _ = writeln!(out, "fit t1={} t2={} t3={} rmse={}", f.t1, f.t2, f.t3, f.rmse);
    }
    if let Some(r) = rho {
        let _ = writeln!(out, "spearman={r}");
    }
    Ok(points)
}

// ---------- fit ----------

pub fn cmd_fit(args: &FitArgs, out: &mut dyn Write) -> Result<QuadraticFit> {
    let points = read_scatter_csv(&args.input)?;
    let fit = fit_quadratic(&fit_points(&points))?;
    let _ = writeln!(out, "t1={}\nt2={}\nt3={}\nrmse={}\nn_points={}", fit.t1, fit.t2, fit.t3, fit.rmse, fit.n_points);

    let manifest = args.manifest.clone().or_else(|| {
        let sibling = args.input.parent().unwrap_or(Path::new(".")).join(MANIFEST_FILE);
        sibling.exists().then_some(sibling)
    });
    if let Some(path) = manifest {
        let mut doc: Value = match fs::read_to_string(&path) {
            Ok(text) => serde_json::from_str(&text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?,
            Err(_) => json!({}),
        };
        let entry = json!({
            "input": args.input.display().to_string(),
            "fit": fit_json(&fit),
            "created_unix_seconds": unix_seconds(),
        });
        match doc.get_mut("fits").and_then(Value::as_array_mut) {
            Some(fits) => fits.push(entry),
            None => doc["fits"] = json!([entry]),
        }
        write_file(&path, &serde_json::to_string_pretty(&doc).expect("serializable"))?;
    }
    Ok(fit)
}

// ---------- plot ----------

fn manifest_m(input: &Path) -> Option<usize> {
    let path = input.parent().unwrap_or(Path::new(".")).join(MANIFEST_FILE);
    let doc: Value = serde_json::from_str(&fs::read_to_string(path).ok()?).ok()?;
    doc["config"]["m"].as_u64().map(|m| m as usize)
}

pub fn cmd_plot(args: &PlotArgs, out: &mut dyn Write) -> Result<PathBuf> {
    let points = read_scatter_csv(&args.input)?;
    let m = args
        .m
        .or_else(|| manifest_m(&args.input))
        .ok_or_else(|| Error::Contract("message size unknown: pass --m or keep manifest.json beside the CSV".into()))?;
    crate::permutations::check_order(m)?;
    let fit = fit_quadratic(&fit_points(&points)).ok();
    let output = args.output.clone().unwrap_or_else(|| args.input.with_extension("svg"));
    write_file(&output, &render_scatter_svg(&points, m, fit.as_ref()))?;
    let _ = writeln!(out, "wrote {}", output.display());
    Ok(output)
}

// ---------- twobit ----------

/// `k/(n+1)` for `k = 1..=n`, dropping points closer to ½ than the spacing.
pub fn mu_grid_avoiding_half(n: usize) -> Vec<f64> {
    let step = 1.0 / (n + 1) as f64;
    (1..=n)
        .map(|k| k as f64 * step)
        .filter(|mu| (mu - 0.5).abs() >= step - 1e-15)
        .collect()
}

/// States with zero entries, where the derivative uses limiting values.
pub fn boundary_states() -> Vec<TwoBitState> {
    [
        [0.5, 0.0, 0.2, 0.3],
        [0.0, 0.6, 0.4, 0.0],
        [0.3, 0.3, 0.4, 0.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.5, 0.5, 0.0, 0.0],
        [0.5, 0.0, 0.0, 0.5],
        [0.25, 0.25, 0.25, 0.25],
    ]
    .iter()
    .map(|e| TwoBitState::new(e[0], e[1], e[2], e[3]).expect("normalized"))
    .collect()
}

fn derivative_mismatches(states: &[TwoBitState], grid: &[f64]) -> Result<Vec<(TwoBitState, f64, f64, f64)>> {
    const H: f64 = 1e-5;
    let mut bad = Vec::new();
    for s in states {
        for &mu in grid {
            let alpha = 2.0 * mu - 1.0;
            if alpha.abs() > 0.95 {
                continue;
            }
            let up = twobit_discord(s, (1.0 + alpha + H) / 2.0)?;
            let down = twobit_discord(s, (1.0 + alpha - H) / 2.0)?;
            let fd = (up - down) / (2.0 * H);
            let d = ddelta_dalpha(s, alpha)?;
            if (d - fd).abs() > 1e-6 * fd.abs() + 1e-9 {
                bad.push((*s, alpha, d, fd));
            }
        }
    }
    Ok(bad)
}

pub fn cmd_twobit(args: &TwobitArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let grid = match &args.mu {
        Some(list) => {
            if let Some(mu) = list.iter().find(|m| !(**m > 0.0 && **m < 1.0) || **m == 0.5) {
                return Err(Error::Domain(format!("μ = {mu} rejected: grid must lie in (0, 1) and avoid the singular point 1/2")));
            }
            let mut g = list.clone();
            g.sort_by(f64::total_cmp);
            g.dedup();
            g
        }
        None => mu_grid_avoiding_half(args.mu_points),
    };
    if grid.len() < 3 {
        return Err(Error::Contract(format!("μ grid has {} points; need at least 3", grid.len())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut states = boundary_states();
    for _ in 0..args.states {
        states.push(TwoBitState::try_from(&sample_random_joint(2, &mut rng)?)?);
    }
    let opts = ScanOptions { inject_sign_flip: args.inject_sign_flip, ..ScanOptions::default() };
    let report = monotonicity_scan(&states, &grid, opts)?;
    let mismatches = derivative_mismatches(&states, &grid)?;

    fs::create_dir_all(&args.out).map_err(|e| Error::Io(format!("{}: {e}", args.out.display())))?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["mu", "alpha", "entropy_bits", "avg_discord_bits", "avg_ddelta_dalpha", "avg_ddelta_dH"])
        .map_err(csv_io)?;
    for c in &report.curve {
        let dh = 2.0 * c.avg_ddelta_dalpha / ((1.0 - c.mu).log2() - c.mu.log2());
        w.write_record([
            fmt_f64(c.mu),
            fmt_f64(2.0 * c.mu - 1.0),
            fmt_f64(c.entropy),
            fmt_f64(c.avg_discord),
            fmt_f64(c.avg_ddelta_dalpha),
            fmt_f64(dh),
        ])
        .map_err(csv_io)?;
    }
    let csv_text = String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.to_string()))?).expect("ascii");
    write_file(&args.out.join("twobit_curves.csv"), &csv_text)?;
    let summary = json!({
        "tool": "discordlab",
        "version": env!("CARGO_PKG_VERSION"),
        "n_states": report.n_states,
        "n_mu": report.n_mu,
        "seed": args.seed,
        "violations": report.violations.len(),
        "derivative_mismatches": mismatches.len(),
        "first_violations": &report.violations[..report.violations.len().min(20)],
    });
    write_file(&args.out.join("twobit_report.json"), &serde_json::to_string_pretty(&summary).expect("serializable"))?;

    let _ = writeln!(
        out,
        "scanned {} states × {} μ values: {} violations, {} derivative mismatches",
        report.n_states,
        report.n_mu,
        report.violations.len(),
        mismatches.len()
    );
    if report.passed() && mismatches.is_empty() {
        return Ok(EXIT_OK);
    }
    for v in report.violations.iter().take(10) {
        let _ = writeln!(
            err,
            "violation {:?}: state {} ({}, {}, {}, {}) at μ = {}: {}",
            v.kind, v.state_index, v.state.p00, v.state.p01, v.state.p10, v.state.p11, v.mu, v.value
        );
    }
    for (s, alpha, d, fd) in mismatches.iter().take(10) {
        let _ = writeln!(err, "derivative mismatch: state {s:?} at α = {alpha}: analytic {d}, finite difference {fd}");
    }
    Ok(EXIT_VIOLATION)
}
