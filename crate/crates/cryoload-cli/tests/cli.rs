//! End-to-end tests of the `cryoload` binary: commands, exit codes, file
//! outputs, and output determinism.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cryoload"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

/// Report files start with one `# generated ...` line; the body below it is
/// the deterministic part.
fn body_of(path: &Path) -> String {
    let text = std::fs::read_to_string(path).expect("report exists");
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn materials_eval_builtin_resistivity() {
    let output = run(&[
        "materials",
        "eval",
        "--material",
        "inner_rho",
        "--temps",
        "2",
    ]);
    assert!(output.status.success());
    assert!(stdout(&output).contains("9.928e-9"));
}

#[test]
fn materials_eval_outer_conductivity_at_100k() {
    let output = run(&[
        "materials",
        "eval",
        "--material",
        "outer_k",
        "--temps",
        "100",
    ]);
    assert!(output.status.success());
    // 22.0777 W/(m K), printed at 4 significant figures
    assert!(stdout(&output).contains("2.208e1"), "{}", stdout(&output));
}

#[test]
fn materials_eval_zero_coefficient_test_material() {
    let dir = tempfile::tempdir().unwrap();
    let material = "\
name = \"flat\"
unit_kind = \"thermal_conductivity\"
t_min_K = 1.0
t_max_K = 300.0
low_extension = \"linear_to_origin\"
coefficients = [\"0\", \"0\", \"0\", \"0\", \"0\", \"0\", \"0\", \"0\", \"0\"]
";
    std::fs::write(dir.path().join("flat.toml"), material).unwrap();
    let mut config = cryoload::config::RunConfig::default_xld1000sl();
    config.material_files = vec!["flat.toml".to_owned()];
    let config_path = dir.path().join("run.toml");
    std::fs::write(&config_path, config.to_toml()).unwrap();

    let output = run(&[
        "materials",
        "eval",
        "--material",
        "flat",
        "--temps",
        "77",
        "--config",
        config_path.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{}", stderr(&output));
    assert!(stdout(&output).contains("1.000e0"));
}

#[test]
fn materials_eval_reports_the_offending_temperature() {
    let output = run(&[
        "materials",
        "eval",
        "--material",
        "inner_rho",
        "--temps",
        "2,400",
    ]);
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr(&output).contains("400"));

    let output = run(&["materials", "eval", "--material", "nope", "--temps", "2"]);
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr(&output).contains("nope"));
}

#[test]
fn fit_round_trips_a_synthetic_outer_conductor_csv() {
    let dir = tempfile::tempdir().unwrap();
    let generator = cryoload::materials::outer_k();
    let mut csv = String::from("temperature_K,value\n# synthetic samples\n");
    let mut samples = Vec::new();
    for i in 0..60 {
        let t = 2.0 * (297.0f64 / 2.0).powf(i as f64 / 59.0);
        let v = generator.eval(t).unwrap();
        samples.push((t, v));
        csv.push_str(&format!("{t},{v}\n"));
    }
    // two points above the cap that must be excluded
    csv.push_str("305.0,25.0\n340.0,30.0\n");
    let csv_path = dir.path().join("outer.csv");
    std::fs::write(&csv_path, csv).unwrap();

    let out_path = dir.path().join("outer_fit.toml");
    let residuals_path = dir.path().join("residuals.csv");
    let output = run(&[
        "fit",
        "--csv",
        csv_path.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
        "--residuals",
        residuals_path.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{}", stderr(&output));
    assert!(stdout(&output).contains("excluded 2 measurements above 300 K"));

    let fitted =
        cryoload::materials::from_material_file(&std::fs::read_to_string(&out_path).unwrap())
            .unwrap();
    for (t, v) in samples {
        let p = fitted.eval(t).unwrap();
        assert!(
            (p / v - 1.0).abs() < 1e-3,
            "refit prediction off by {:+.2e} at {t} K",
            p / v - 1.0
        );
    }
    let residuals = std::fs::read_to_string(&residuals_path).unwrap();
    assert!(residuals.starts_with("temperature_K,measured,fitted,log10_residual"));
    assert_eq!(residuals.lines().count(), 61);
}

#[test]
fn fit_names_the_malformed_row() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("bad.csv");
    std::fs::write(&csv_path, "temperature_K,value\n10,1.0\n20,oops\n").unwrap();
    let out_path = dir.path().join("out.toml");
    let output = run(&[
        "fit",
        "--csv",
        csv_path.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(1));
    let err = stderr(&output);
    assert!(err.contains(":3:"), "row number missing from: {err}");
}

#[test]
fn cable_static_prints_the_stage_table() {
    let output = run(&["cable", "static", "--count", "1008", "--format", "csv"]);
    assert!(output.status.success());
    let text = stdout(&output);
    assert!(text.contains("stage,count,static_W"));
    assert!(text.contains("MXC,1008,"));
}

#[test]
fn line_active_shows_the_flux_pad() {
    let output = run(&["line", "active", "--line", "qubit_flux", "--format", "csv"]);
    assert!(output.status.success());
    let text = stdout(&output);
    // attenuator load appears at the 4K stage only
    let four_k = text.lines().find(|l| l.starts_with("4K,")).unwrap();
    let fields: Vec<&str> = four_k.split(',').collect();
    let pad: f64 = fields[2].parse().unwrap();
    assert!((pad / 2.018e-4 - 1.0).abs() < 0.01);
}

#[test]
fn budget_exit_codes_follow_the_spec() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();

    let ok = run(&["budget", "--n", "12", "--out-dir", out]);
    assert_eq!(ok.status.code(), Some(0), "{}", stderr(&ok));
    let summary = std::fs::read_to_string(dir.path().join("summary.toml")).unwrap();
    assert!(summary.contains("max_fraction_stage = \"4K\""));
    let csv = std::fs::read_to_string(dir.path().join("budget.csv")).unwrap();
    assert!(csv.contains("12,4K,"));

    let over = run(&["budget", "--n", "15", "--out-dir", out]);
    assert_eq!(over.status.code(), Some(2));

    let capacity = run(&["budget", "--n", "16", "--out-dir", out]);
    assert_eq!(capacity.status.code(), Some(3));
    let err = stderr(&capacity);
    assert!(err.contains("1121") && err.contains("1008"), "{err}");
    // report still written
    let summary = std::fs::read_to_string(dir.path().join("summary.toml")).unwrap();
    assert!(summary.contains("within_capacity = false"));
}

#[test]
fn margin_tightens_the_pass_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    // n = 12 peaks at ~0.70 of the 4K budget, so a 60% margin must fail
    let strict = run(&["budget", "--n", "12", "--margin", "0.6", "--out-dir", out]);
    assert_eq!(strict.status.code(), Some(2));
}

#[test]
fn acceptance_criterion_9_cli_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out in [&out_a, &out_b] {
        let output = run(&[
            "sweep",
            "--sweep",
            "10..15",
            "--plot-data",
            "--out-dir",
            out.to_str().unwrap(),
        ]);
        // n = 15 exceeds the 4K budget, so the sweep reports exit code 2
        assert_eq!(output.status.code(), Some(2), "{}", stderr(&output));
    }
    for file in ["budget.csv", "summary.toml", "plot_data.csv"] {
        assert_eq!(
            body_of(&out_a.join(file)),
            body_of(&out_b.join(file)),
            "{file} bodies differ between identical invocations"
        );
    }
    println!("criterion 9 (CLI determinism, byte-identical bodies): PASS");
}

#[test]
fn config_round_trip_produces_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let emitted = dir.path().join("resolved.toml");
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");

    let first = run(&[
        "budget",
        "--n",
        "12",
        "--emit-config",
        emitted.to_str().unwrap(),
        "--out-dir",
        out_a.to_str().unwrap(),
    ]);
    assert!(first.status.success(), "{}", stderr(&first));

    let second = run(&[
        "budget",
        "--config",
        emitted.to_str().unwrap(),
        "--out-dir",
        out_b.to_str().unwrap(),
    ]);
    assert!(second.status.success(), "{}", stderr(&second));

    assert_eq!(
        body_of(&out_a.join("budget.csv")),
        body_of(&out_b.join("budget.csv"))
    );
}

#[test]
fn sweep_range_is_validated() {
    let output = run(&["sweep", "--sweep", "abc"]);
    assert_eq!(output.status.code(), Some(1));
}
