//! End-to-end tests of the `widomlab` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use widomlab::cli::config::JobConfig;
use widomlab::cli::report::{Report, CSV_HEADER};
use widomlab::cli::{run, Subcommand};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_widomlab"))
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run_bin(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

const SQRT_ONE_PLUS: &str =
    "degrees = [1, 2, 3, 4, 5, 6, 7, 8]\n[set]\nbands = [[-1.0, 1.0]]\n[weight]\nvariant = \"sqrt_one_plus\"\n";
const PREIMAGE_3X: &str = "[set.preimage]\nvariant = \"one_plus\"\ncoeffs = [0, 3]\n";
const TWO_BANDS: &str =
    "degrees = [1, 2, 3]\n[set]\nbands = [[-1.0, -0.5], [0.5, 1.0]]\n[weight]\nvariant = \"sqrt_one_plus\"\n";

#[test]
fn interval_with_sqrt_one_plus_has_widom_factor_sqrt_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "a.toml", SQRT_ONE_PLUS);
    let out = run_bin(&["chebyshev", "--config", cfg.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 8);
    for row in rows {
        let w: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
        assert!((w - 2f64.sqrt()).abs() <= 1e-8, "{row}");
    }
}

#[test]
fn preimage_verify_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "p.toml", PREIMAGE_3X);
    let out = run_bin(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(!stdout(&out).contains("[FAIL]"));
}

#[test]
fn two_band_capacity() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", TWO_BANDS);
    let out = run_bin(&["capacity", "--config", cfg.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let cap: f64 = text.lines().find_map(|l| l.strip_prefix("capacity,")).unwrap().parse().unwrap();
    assert!((cap - 0.4330127018922193).abs() <= 1e-9, "{cap}");
}

#[test]
fn csv_has_header_and_one_line_per_degree() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", TWO_BANDS);
    let out_path = dir.path().join("out.csv");
    let out = run_bin(&["preimage", "--config", cfg.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(out.status.code(), Some(2), "preimage needs a preimage set");
    let out = run_bin(&[
        "chebyshev",
        "--config",
        cfg.to_str().unwrap(),
        "--format",
        "csv",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&out_path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0], CSV_HEADER);
    assert!(lines[1..].iter().all(|l| l.split(',').count() == 10));
}

#[test]
fn json_round_trips_through_the_report_reader() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "p.toml", PREIMAGE_3X);
    let out = run_bin(&["preimage", "--config", cfg.to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let parsed = Report::from_json(&stdout(&out)).unwrap();
    let config = JobConfig::parse(PREIMAGE_3X).unwrap();
    let direct = run(&config, &JobConfig::hash(PREIMAGE_3X), Subcommand::Preimage, false).unwrap();
    assert_eq!(parsed, direct.report);
    assert_eq!(parsed.to_json().unwrap(), stdout(&out));
}

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", TWO_BANDS);
    let svg_a = dir.path().join("a.svg");
    let svg_b = dir.path().join("b.svg");
    let a =
        run_bin(&["verify", "--config", cfg.to_str().unwrap(), "--format", "csv", "--svg", svg_a.to_str().unwrap()]);
    let b =
        run_bin(&["verify", "--config", cfg.to_str().unwrap(), "--format", "csv", "--svg", svg_b.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let (sa, sb) = (std::fs::read(&svg_a).unwrap(), std::fs::read(&svg_b).unwrap());
    assert_eq!(sa, sb);
    assert!(String::from_utf8(sa).unwrap().contains("<circle"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write_config(dir.path(), "u.toml", "[set]\nbands = [[-1.0, 1.0]]\nshape = 1\n");
    let out = run_bin(&["capacity", "--config", unknown.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("shape"));

    let out = run_bin(&["capacity", "--config", dir.path().join("missing.toml").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = run_bin(&["chebyshev"]);
    assert_eq!(out.status.code(), Some(2));

    let inadmissible =
        write_config(dir.path(), "i.toml", "[set.preimage]\nvariant = \"one_plus\"\ncoeffs = [\"1/2\", 1]\n");
    let out = run_bin(&["preimage", "--config", inadmissible.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));

    // equalities hold only to rounding, so an absurd tolerance fails verification
    let strict = write_config(dir.path(), "s.toml", &format!("{PREIMAGE_3X}[tolerances]\nverify = 1e-30\n"));
    let out = run_bin(&["verify", "--config", strict.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn exit_code_mapping() {
    use widomlab::cli::{exit_code, EXIT_CONFIG, EXIT_NUMERICAL};
    use widomlab::Error;
    assert_eq!(exit_code(&Error::Config("x".into())), EXIT_CONFIG);
    assert_eq!(exit_code(&Error::Convergence { what: "x".into(), residual: 1.0 }), EXIT_NUMERICAL);
    assert_eq!(exit_code(&Error::Quadrature("x".into())), EXIT_NUMERICAL);
}
