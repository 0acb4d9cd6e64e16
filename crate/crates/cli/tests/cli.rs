use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use groupsim::catalog::BUNDLED;

fn groupsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_groupsim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_into(scenario: &str, dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        "run",
        "--scenario",
        scenario,
        "--out",
        dir.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    groupsim(&args)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn bundled_text(name: &str) -> &'static str {
    BUNDLED.iter().find(|b| b.name == name).unwrap().text
}

#[test]
fn list_prints_catalog() {
    let o = groupsim(&["list"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 7);
    for name in [
        "fig1",
        "fig2",
        "fig3",
        "fig4",
        "blayer-ref",
        "plume-case1",
        "plume-case2",
    ] {
        assert!(
            lines
                .iter()
                .any(|l| l.split_whitespace().next() == Some(name)),
            "{name}"
        );
    }
    for name in ["fig3", "fig4"] {
        let line = lines.iter().find(|l| l.starts_with(name)).unwrap();
        assert!(line.contains("13306"), "{line}");
    }
}

#[test]
fn fig2_writes_temperature_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_into("fig2", dir.path(), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("temperature_vs_time.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("z,T_10,T_20,T_40,T_80,T_150"));
    assert!(!dir.path().join("fig2_residuals.csv").exists());
}

#[test]
fn fig2_matches_frozen_golden() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_into("fig2", dir.path(), &[]).status.success());
    let got = fs::read_to_string(dir.path().join("temperature_vs_time.csv")).unwrap();
    let golden = include_str!("golden/fig2_temperature_vs_time.csv");
    assert_eq!(got, golden);
}

#[test]
fn fig2_verify_writes_passing_residuals() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_into("fig2.scn", dir.path(), &["--verify", "--plot"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("fig2_residuals.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("equation,max_norm,l2_norm,samples,threshold,pass")
    );
    let rows: Vec<&str> = lines.collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.ends_with(",true")), "{csv}");
    let svg = fs::read_to_string(dir.path().join("temperature_vs_time.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 5);
}

#[test]
fn verify_subcommand_prints_reports() {
    let o = groupsim(&["verify", "--scenario", "blayer-ref"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("equation,max_norm,l2_norm,samples"));
    assert!(text.lines().count() > 2);
}

#[test]
fn negative_alpha_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = bundled_text("fig2")
        .lines()
        .map(|l| {
            if l.starts_with("alpha =") {
                "alpha = -1.0"
            } else {
                l
            }
        })
        .collect::<Vec<_>>()
        .join("\n");
    let path = dir.path().join("bad.scn");
    fs::write(&path, text).unwrap();
    let o = run_into(path.to_str().unwrap(), &dir.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("`alpha`"), "{err}");
    assert!(err.contains("bad.scn:"), "{err}");
}

#[test]
fn malformed_file_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.scn");
    fs::write(
        &path,
        "name = \"x\"\napplication = \"lake-case1\"\n[params\n",
    )
    .unwrap();
    let o = run_into(path.to_str().unwrap(), dir.path(), &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(
        groupsim(&["run", "--scenario", "no-such-scenario"])
            .status
            .code()
            == Some(1)
    );
}

#[test]
fn unreachable_shooting_target_exits_with_non_convergence() {
    let dir = tempfile::tempdir().unwrap();
    let text = bundled_text("blayer-ref")
        .lines()
        .map(|l| {
            if l.starts_with("a1 =") {
                "a1 = 1000.0"
            } else {
                l
            }
        })
        .collect::<Vec<_>>()
        .join("\n");
    let path = dir.path().join("steep.scn");
    fs::write(&path, text).unwrap();
    let o = run_into(path.to_str().unwrap(), dir.path(), &[]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn runs_are_byte_identical() {
    for name in ["fig2", "blayer-ref", "plume-case2"] {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        assert!(run_into(name, a.path(), &[]).status.success());
        assert!(run_into(name, b.path(), &[]).status.success());
        let mut files: Vec<_> = fs::read_dir(a.path())
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        files.sort();
        assert!(!files.is_empty());
        for f in files {
            assert_eq!(
                fs::read(a.path().join(&f)).unwrap(),
                fs::read(b.path().join(&f)).unwrap(),
                "{name} {f:?}"
            );
        }
    }
}

#[test]
fn every_catalog_entry_runs() {
    for b in BUNDLED {
        let dir = tempfile::tempdir().unwrap();
        let o = run_into(b.name, dir.path(), &["--verify"]);
        assert_eq!(o.status.code(), Some(0), "{}: {}", b.name, stderr(&o));
        let csvs = fs::read_dir(dir.path()).unwrap().count();
        assert!(csvs >= 2, "{}", b.name);
    }
}
