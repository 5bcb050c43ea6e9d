use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use xyz_sim::presets;
use xyz_sim::run::{execute, CliError, COLUMNS};
use xyz_sim::{Document, Overrides};

fn simulate(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_simulate"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn run_is_byte_identical_across_invocations() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "fig8.toml", presets::get("fig8").unwrap().text);
    let first = simulate(&["run", &cfg, "--output", "a"], dir.path());
    assert!(first.status.success(), "{}", stderr(&first));
    let second = simulate(&["run", &cfg, "--output", "b", "--threads", "2"], dir.path());
    assert!(second.status.success(), "{}", stderr(&second));
    let a = fs::read(dir.path().join("a/fig8.csv")).unwrap();
    let b = fs::read(dir.path().join("b/fig8.csv")).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn sweep_writes_points_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = simulate(&["figures", "fig9", "--output", "out"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    for name in ["fig9_10.csv", "fig9_50.csv", "fig9_100.csv", "fig9_summary.csv"] {
        assert!(dir.path().join("out").join(name).exists(), "{name}");
    }
    let summary = fs::read_to_string(dir.path().join("out/fig9_summary.csv")).unwrap();
    let values: Vec<&str> = summary.lines().skip(2).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(values, ["10", "50", "100"]);

    let serial = simulate(&["figures", "fig9", "--output", "serial", "--threads", "1"], dir.path());
    assert!(serial.status.success());
    assert_eq!(
        summary,
        fs::read_to_string(dir.path().join("serial/fig9_summary.csv")).unwrap()
    );
}

#[test]
fn trace_header_echoes_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", presets::get("fig1c").unwrap().text);
    assert!(simulate(&["run", &cfg], dir.path()).status.success());
    let csv = fs::read_to_string(dir.path().join("c.csv")).unwrap();
    assert!(csv.contains("# mode = \"ic1\""));
    assert!(csv.contains("# phase_convention = \"magnitude\""));
    let columns = csv.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(columns, COLUMNS);
    let rows: Vec<Vec<f64>> = csv
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 4001);
    assert!(rows.windows(2).all(|w| w[0][0] < w[1][0]));
    assert!(rows.iter().all(|r| (0.0..=1.0 + 1e-12).contains(&r[10])));
}

#[test]
fn config_errors_fail_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let base = presets::get("fig1c").unwrap().text;
    let cases = [
        (base.replace("samples = 4001", "samples = 4001\nstride = 2"), "stride"),
        (base.replace("samples = 4001", "samples = 1"), "samples"),
        (base.replace("\"pi/50\"", "\"pi/fifty\""), "pi/fifty"),
        (base.replace("state = \"pp\"", "state = \"up\""), "up"),
    ];
    for (i, (text, needle)) in cases.iter().enumerate() {
        let cfg = write_config(dir.path(), &format!("bad{i}.toml"), text);
        let out = simulate(&["run", &cfg], dir.path());
        assert!(!out.status.success());
        assert!(stderr(&out).contains(needle), "{needle}: {}", stderr(&out));
    }
    let out = simulate(&["figures", "fig99"], dir.path());
    assert!(!out.status.success());
    let cfg = write_config(dir.path(), "nosweep.toml", base);
    assert!(!simulate(&["sweep", &cfg], dir.path()).status.success());
}

#[test]
fn inadmissible_ic2_names_the_inequality() {
    let dir = tempfile::tempdir().unwrap();
    let text = presets::get("fig8")
        .unwrap()
        .text
        .replace("amplitude = 1,", "amplitude = 128,");
    let cfg = write_config(dir.path(), "wide.toml", &text);
    let out = simulate(&["run", &cfg], dir.path());
    assert!(!out.status.success());
    assert!(stderr(&out).contains("beta/(2 rate mu)"), "{}", stderr(&out));
    match execute(&Document::parse(&text).unwrap(), Overrides::default()) {
        Err(CliError::Admissibility(e)) => assert!(e.inequality.contains("< max(2/(1+cos 2theta0)")),
        other => panic!("expected an admissibility error, got {other:?}"),
    }
}

#[test]
fn numeric_run_matches_closed_form() {
    let signed = presets::get("fig1c")
        .unwrap()
        .text
        .replace("\"magnitude\"", "\"signed\"");
    let exact = execute(&Document::parse(&signed).unwrap(), Overrides::default()).unwrap();
    let numeric = execute(
        &Document::parse(&signed.replace("\"ic1\"", "\"numeric\"")).unwrap(),
        Overrides::default(),
    )
    .unwrap();
    assert_eq!(exact.rows.len(), numeric.rows.len());
    for (a, b) in exact.rows.iter().zip(&numeric.rows) {
        assert_eq!(a.t, b.t);
        assert!((a.concurrence - b.concurrence).abs() <= 1e-5, "t = {}", a.t);
    }
}

#[test]
fn step_override_reaches_the_integrator() {
    let dir = tempfile::tempdir().unwrap();
    let text = presets::get("fig9").unwrap().text.replace("\"ic2\"", "\"numeric\"");
    let cfg = write_config(dir.path(), "n.toml", &text);
    let out = simulate(&["run", &cfg, "--step", "0.001"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("n.csv")).unwrap();
    assert!(csv.contains("# step = 0.001"));
    assert!(!simulate(&["run", &cfg, "--step", "-1"], dir.path()).status.success());
}

#[test]
fn figures_list_names_every_preset() {
    let dir = tempfile::tempdir().unwrap();
    let out = simulate(&["figures", "list"], dir.path());
    let text = String::from_utf8(out.stdout).unwrap();
    for p in presets::PRESETS {
        assert!(text.lines().any(|l| l.starts_with(p.id)), "{}", p.id);
    }
}
