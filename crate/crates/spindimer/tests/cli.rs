//! End-to-end CLI runs with real files.

use std::path::PathBuf;

use spindimer::cli::{run_to, EXIT_OK, EXIT_VALIDATION};
use spindimer::config;
use spindimer::model::UnitSystem;

fn run(args: &[&str]) -> (i32, String) {
    let args: Vec<String> = args.iter().map(|s| s.to_string()).collect();
    let mut buf = Vec::new();
    let code = run_to(&args, &mut buf);
    (code, String::from_utf8(buf).unwrap())
}

fn scratch_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("spindimer-test-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn shipped_cuni_config_parses_to_reported_parameters() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/cuni.ini");
    let cfg = config::parse_config(&path).unwrap();
    let p = config::resolve_params(&cfg.model).unwrap();
    assert_eq!(p.units, UnitSystem::Physical);
    assert_eq!(p.j, 141.0);
    assert_eq!(p.g1, 2.20);
    assert_eq!(p.g2, 2.29);
    assert_eq!(p.d, 0.0);
    assert_eq!(cfg.run.command.as_deref(), Some("sweep"));
}

#[test]
fn sweep_from_config_writes_csv_and_json() {
    let dir = scratch_dir("sweep");
    let cfg_path = dir.join("small.ini");
    std::fs::write(
        &cfg_path,
        "[model]\nj = 1.0\ndelta = 1.0\nd_over_j = 0.5\nb = 0.2\n\n\
         [sweep]\nt = 0.3\naxis1 = B\naxis1_min = 0.0\naxis1_max = 1.0\naxis1_points = 5\n",
    )
    .unwrap();
    let out = dir.join("table.csv");
    let (code, stdout) = run(&[
        "sweep",
        "--config",
        cfg_path.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(code, EXIT_OK, "{stdout}");
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with(spindimer::sweep::CSV_HEADER));
    assert_eq!(csv.lines().count(), 6); // header + 5 rows

    let json = std::fs::read_to_string(out.with_extension("json")).unwrap();
    let rows: Vec<spindimer::sweep::SweepRow> = serde_json::from_str(&json).unwrap();
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r.status == "ok"));
}

#[test]
fn sweep_without_axes_is_a_validation_error() {
    let (code, _) = run(&["sweep", "--j", "1", "--t", "0.3", "--out", "/tmp/never.csv"]);
    assert_eq!(code, EXIT_VALIDATION);
}

#[test]
fn figure_writes_one_labeled_file_per_sweep() {
    let dir = scratch_dir("figure");
    let cfg_path = dir.join("quick.ini");
    // Shrink the curve lists so the test stays fast.
    std::fs::write(&cfg_path, "[sweep]\nfigure_temps_kelvin = 50, 300\n").unwrap();
    let out = dir.join("fig5.csv");
    let (code, stdout) = run(&[
        "figure",
        "fig5",
        "--config",
        cfg_path.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK, "{stdout}");
    assert!(dir.join("fig5_t50K.csv").exists());
    assert!(dir.join("fig5_t300K.csv").exists());
    assert_eq!(stdout.lines().count(), 2);
}

#[test]
fn point_json_round_trips_through_the_report_type() {
    let (code, output) = run(&[
        "point", "--j", "1", "--delta", "1", "--b", "0.3", "--t", "0.5",
    ]);
    assert_eq!(code, EXIT_OK);
    let report: spindimer::MeasureReport = serde_json::from_str(&output).unwrap();
    let round = serde_json::to_string(&report).unwrap();
    let again: spindimer::MeasureReport = serde_json::from_str(&round).unwrap();
    assert_eq!(report.hs_min, again.hs_min);
    assert_eq!(report.branch, again.branch);
}

#[test]
fn selftest_quick_passes() {
    let (code, stdout) = run(&["selftest", "--quick", "--seed", "7"]);
    assert_eq!(code, EXIT_OK, "{stdout}");
    assert!(stdout.contains("spectrum: analytic vs numeric"));
    assert!(stdout.contains("all suites passed"));
}

#[test]
fn figure_fig4_csv_has_monotone_hs_min_at_one_tesla() {
    let dir = scratch_dir("fig4");
    let out = dir.join("fig4.csv");
    let (code, stdout) = run(&["figure", "fig4", "--out", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{stdout}");
    let csv = std::fs::read_to_string(dir.join("fig4_b1T.csv")).unwrap();
    let mut prev = f64::INFINITY;
    for line in csv.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols[8], "ok");
        let hs: f64 = cols[5].parse().unwrap();
        assert!(hs <= prev + 1e-9, "hs_min rose: {prev} -> {hs}");
        prev = hs;
    }
}
