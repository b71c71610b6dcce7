use std::fs;
use std::path::Path;
use std::process::Command;

use discordlab::cli::{parse_scatter_csv, run_cli, EXIT_OK, EXIT_USAGE, EXIT_VIOLATION};
use serde_json::Value;

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["discordlab"];
    argv.extend_from_slice(args);
    let code = run_cli(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn smoke_run(dir: &Path) -> (i32, String, String) {
    cli(&[
        "run", "--m", "4", "--a-grid", "10", "--wdown-per-a", "6", "--states", "10", "--seed", "3", "--out",
        dir.to_str().unwrap(),
    ])
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn smoke_run_writes_all_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, out, err) = smoke_run(tmp.path());
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(out.contains("wrote 61 channels"));

    let csv = fs::read_to_string(tmp.path().join("scatter.csv")).unwrap();
    assert_eq!(csv.lines().count(), 62);
    assert_eq!(
        csv.lines().next().unwrap(),
        "channel_id,a,weight_entropy_bits,avg_discord_bits,avg_distortion,n_states,argmin_mode"
    );
    let points = parse_scatter_csv(&csv).unwrap();
    let identity = points.last().unwrap();
    assert_eq!(identity.channel_id, 60);
    assert_eq!(identity.a, None);
    assert!(identity.avg_discord.abs() <= 1e-12 && identity.avg_distortion.abs() <= 1e-12);

    // every float field carries at least 15 significant digits
    let row = csv.lines().nth(5).unwrap();
    for field in row.split(',').skip(1).take(4) {
        let mantissa = field.split('e').next().unwrap().replace(['-', '.'], "");
        assert!(mantissa.len() >= 15, "{field}");
    }

    let m = manifest(tmp.path());
    assert_eq!(m["config"]["m"], 4);
    assert_eq!(m["n_channels"], 61);
    assert!(m["fit"]["t2"].is_f64());
    assert_eq!(m["fit"]["rmse_denominator"], "n");
    assert!(m["version"].is_string());

    let svg = fs::read_to_string(tmp.path().join("scatter.svg")).unwrap();
    assert_eq!(svg.matches("<circle").count(), 61);
    assert_eq!(svg.matches("<path").count(), 1);
    assert!(!tmp.path().join("scatter.partial.csv").exists());
}

#[test]
fn rerun_is_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert_eq!(smoke_run(a.path()).0, EXIT_OK);
    assert_eq!(smoke_run(b.path()).0, EXIT_OK);
    for file in ["scatter.csv", "scatter.svg"] {
        assert_eq!(fs::read(a.path().join(file)).unwrap(), fs::read(b.path().join(file)).unwrap(), "{file}");
    }
    let (mut ma, mut mb) = (manifest(a.path()), manifest(b.path()));
    ma["created_unix_seconds"] = Value::Null;
    mb["created_unix_seconds"] = Value::Null;
    assert_eq!(ma, mb);
}

#[test]
fn resume_from_checkpoint_matches_uninterrupted_run() {
    let full = tempfile::tempdir().unwrap();
    assert_eq!(smoke_run(full.path()).0, EXIT_OK);
    let reference = fs::read_to_string(full.path().join("scatter.csv")).unwrap();

    // Simulate an interrupted run: a checkpoint holding the first 17 channels.
    let part = tempfile::tempdir().unwrap();
    let (code, _, err) = cli(&[
        "run", "--m", "4", "--a-grid", "10", "--wdown-per-a", "6", "--states", "10", "--seed", "3", "--out",
        part.path().to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    let prefix: Vec<&str> = reference.lines().take(18).collect();
    fs::write(part.path().join("scatter.partial.csv"), prefix.join("\n") + "\n").unwrap();
    let cfg = manifest(part.path())["config"].clone();
    fs::write(
        part.path().join("scatter.partial.config.json"),
        serde_json::to_string(&serde_json::json!({ "config": cfg })).unwrap(),
    )
    .unwrap();
    fs::remove_file(part.path().join("scatter.csv")).unwrap();

    let (code, out, err) = cli(&[
        "run", "--m", "4", "--a-grid", "10", "--wdown-per-a", "6", "--states", "10", "--seed", "3", "--out",
        part.path().to_str().unwrap(), "--resume",
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(out.contains("wrote 61 channels"));
    assert_eq!(fs::read_to_string(part.path().join("scatter.csv")).unwrap(), reference);

    // A checkpoint from another configuration is refused.
    fs::write(part.path().join("scatter.partial.csv"), prefix.join("\n") + "\n").unwrap();
    fs::write(
        part.path().join("scatter.partial.config.json"),
        serde_json::to_string(&serde_json::json!({ "config": cfg })).unwrap(),
    )
    .unwrap();
    let (code, _, err) = cli(&[
        "run", "--m", "4", "--a-grid", "10", "--wdown-per-a", "6", "--states", "10", "--seed", "4", "--out",
        part.path().to_str().unwrap(), "--resume",
    ]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("different configuration"));
}

#[test]
fn fit_reads_run_output_and_appends_to_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(smoke_run(tmp.path()).0, EXIT_OK);
    let csv = tmp.path().join("scatter.csv");
    let (code, out, _) = cli(&["fit", csv.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let t2: f64 = out.lines().find_map(|l| l.strip_prefix("t2=")).unwrap().parse().unwrap();
    let m = manifest(tmp.path());
    assert_eq!(m["fit"]["t2"].as_f64().unwrap(), t2);
    assert_eq!(m["fits"].as_array().unwrap().len(), 1);
    assert_eq!(m["fits"][0]["fit"]["t2"].as_f64().unwrap(), t2);
}

#[test]
fn fit_exact_parabola_and_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("parabola.csv");
    let mut text = String::from("avg_distortion,avg_discord_bits\n");
    for k in 0..20 {
        let x = k as f64 / 19.0;
        text += &format!("{x},{}\n", 2.0 * x * x + 3.0 * x + 1.0);
    }
    fs::write(&path, text).unwrap();
    let (code, out, _) = cli(&["fit", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let get = |k: &str| -> f64 { out.lines().find_map(|l| l.strip_prefix(k)).unwrap().parse().unwrap() };
    assert!((get("t1=") - 2.0).abs() < 1e-10);
    assert!((get("t2=") - 3.0).abs() < 1e-10);
    assert!((get("t3=") - 1.0).abs() < 1e-10);
    assert!(get("rmse=") < 1e-10);

    let empty = tmp.path().join("empty.csv");
    fs::write(&empty, "").unwrap();
    assert_eq!(cli(&["fit", empty.to_str().unwrap()]).0, EXIT_USAGE);

    let bad = tmp.path().join("bad.csv");
    fs::write(&bad, "avg_distortion,avg_discord_bits\n0.1,0.2\n0.3,0.4\nnope,0.5\n").unwrap();
    let (code, _, err) = cli(&["fit", bad.to_str().unwrap()]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("line 4"), "{err}");
}

#[test]
fn plot_counts_and_identity_only() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(smoke_run(tmp.path()).0, EXIT_OK);
    let csv = tmp.path().join("scatter.csv");
    let svg = tmp.path().join("again.svg");
    let (code, _, err) = cli(&["plot", csv.to_str().unwrap(), "--output", svg.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{err}");
    let text = fs::read_to_string(&svg).unwrap();
    assert_eq!(text.matches("<circle").count(), 61);
    assert_eq!(text.matches("<path").count(), 1);
    assert_eq!(text, fs::read_to_string(tmp.path().join("scatter.svg")).unwrap());

    let lone = tmp.path().join("lone").join("identity.csv");
    fs::create_dir_all(lone.parent().unwrap()).unwrap();
    fs::write(
        &lone,
        "channel_id,a,weight_entropy_bits,avg_discord_bits,avg_distortion,n_states,argmin_mode\n0,,0,0,0,10,0\n",
    )
    .unwrap();
    assert_eq!(cli(&["plot", lone.to_str().unwrap()]).0, EXIT_USAGE, "no --m and no manifest");
    let (code, _, _) = cli(&["plot", lone.to_str().unwrap(), "--m", "6"]);
    assert_eq!(code, EXIT_OK);
    let text = fs::read_to_string(lone.with_extension("svg")).unwrap();
    assert_eq!(text.matches("<circle").count(), 1);
    assert_eq!(text.matches("<path").count(), 0);
}

#[test]
fn twobit_pass_violation_and_singular_point() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().to_str().unwrap();
    let (code, out, err) = cli(&["twobit", "--states", "200", "--out", dir]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(out.contains("0 violations"));
    let curves = fs::read_to_string(tmp.path().join("twobit_curves.csv")).unwrap();
    assert_eq!(curves.lines().count(), 99);
    assert!(curves.starts_with("mu,alpha,entropy_bits,avg_discord_bits,avg_ddelta_dalpha,avg_ddelta_dH\n"));

    let (code, _, err) = cli(&["twobit", "--states", "20", "--out", dir, "--inject-sign-flip"]);
    assert_eq!(code, EXIT_VIOLATION);
    assert!(err.contains("SignLaw"), "{err}");

    let (code, _, err) = cli(&["twobit", "--mu", "0.2,0.5,0.7", "--out", dir]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("1/2"));
    assert_eq!(cli(&["twobit", "--mu-points", "2", "--out", dir]).0, EXIT_USAGE);
}

#[test]
fn usage_errors_and_help() {
    assert_eq!(cli(&["run"]).0, EXIT_USAGE);
    assert_eq!(cli(&["run", "--m", "9"]).0, EXIT_USAGE);
    assert_eq!(cli(&["run", "--m", "4", "--states", "0"]).0, EXIT_USAGE);
    assert_eq!(cli(&["run", "--m", "4", "--prior", "gaussian"]).0, EXIT_USAGE);
    assert_eq!(cli(&["frobnicate"]).0, EXIT_USAGE);
    let (code, out, _) = cli(&["--help"]);
    assert_eq!(code, EXIT_OK);
    for sub in ["run", "fit", "twobit", "plot"] {
        assert!(out.contains(sub));
    }
    assert!(!out.contains("inject"));
    assert_eq!(cli(&["--version"]).0, EXIT_OK);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_discordlab");
    let tmp = tempfile::tempdir().unwrap();
    let status = Command::new(bin).args(["run", "--m", "0"]).status().unwrap();
    assert_eq!(status.code(), Some(EXIT_USAGE));
    let status = Command::new(bin)
        .args(["twobit", "--states", "5", "--inject-sign-flip", "--out", tmp.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(EXIT_VIOLATION));
    let status = Command::new(bin)
        .args(["run", "--m", "3", "--a-grid", "3", "--wdown-per-a", "2", "--states", "4", "--out"])
        .arg(tmp.path())
        .env("DISCORDLAB_THREADS", "2")
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(EXIT_OK));
    assert_eq!(fs::read_to_string(tmp.path().join("scatter.csv")).unwrap().lines().count(), 8);
}
