use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn opcalc(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opcalc")).current_dir(dir).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn writes_three_outputs_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = opcalc(dir.path(), &["doi-verify", "--trials", "6", "--dims", "2,3", "--out", "run"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("PASS difference_identity"));
    let csv = fs::read_to_string(dir.path().join("run.csv")).unwrap();
    assert_eq!(csv.lines().count(), 7);
    assert!(csv.starts_with("trial,dim,residual,scale,relative_residual\n"));
    let json = fs::read_to_string(dir.path().join("run.json")).unwrap();
    assert!(json.starts_with('{') && json.contains("\"rows\""));
    assert!(fs::read_to_string(dir.path().join("run.svg")).unwrap().starts_with("<svg"));
}

#[test]
fn default_prefix_is_the_experiment_id() {
    let dir = tempfile::tempdir().unwrap();
    let o = opcalc(dir.path(), &["fuglede-ratio", "--trials", "3", "--p", "1,2,inf"]);
    assert_eq!(o.status.code(), Some(0));
    for ext in ["csv", "json", "svg"] {
        assert!(dir.path().join(format!("fuglede-ratio.{ext}")).exists());
    }
    let csv = fs::read_to_string(dir.path().join("fuglede-ratio.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 3 * 3);
    assert!(csv.contains("\ninf,"));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("c.json"),
        r#"{"experiment":"qc-verify","seed":5,"dims":[3],"sigma":2,"trials":8,"out":"from_file"}"#,
    )
    .unwrap();
    let o = opcalc(dir.path(), &["--config", "c.json", "--trials", "2", "--out", "from_flag"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!dir.path().join("from_file.csv").exists());
    let csv = fs::read_to_string(dir.path().join("from_flag.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    let json = fs::read_to_string(dir.path().join("from_flag.json")).unwrap();
    assert!(json.contains("\"seed\": 5"));
}

#[test]
fn same_config_gives_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    for out in ["a", "b"] {
        let o = opcalc(dir.path(), &["lip-bound", "--seed", "9", "--trials", "10", "--out", out]);
        assert_eq!(o.status.code(), Some(0));
    }
    for ext in ["csv", "json", "svg"] {
        let a = fs::read(dir.path().join(format!("a.{ext}"))).unwrap();
        let b = fs::read(dir.path().join(format!("b.{ext}"))).unwrap();
        assert_eq!(a, b, "{ext} differs");
    }
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["no-such-experiment"][..],
        &[][..],
        &["doi-verify", "--dims", "0"][..],
        &["holder-sweep", "--alpha", "1.5"][..],
        &["doi-verify", "--config", "missing.json"][..],
        &["doi-verify", "--experiment", "lip-bound"][..],
    ] {
        let o = opcalc(dir.path(), args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.json"), r#"{"experiment":"doi-verify","trails":3}"#).unwrap();
    let o = opcalc(dir.path(), &["--config", "c.json"]);
    assert_eq!(o.status.code(), Some(2));
}
