use std::fs;
use std::path::Path;
use std::process::Command;

use qsw_cli::MoralReport;

fn qsw(args: &[&str], out: &Path) -> (i32, String, String) {
    let output = Command::new(env!("CARGO_BIN_EXE_qsw"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs");
    (
        output.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&output.stdout).into_owned(),
        String::from_utf8_lossy(&output.stderr).into_owned(),
    )
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn global_walk_reaches_the_moralized_limit() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = qsw(
        &[
            "simulate",
            "--graph",
            "figure1",
            "--model",
            "global",
            "--times",
            "0,50",
            "--initial",
            "0",
        ],
        dir.path(),
    );
    assert_eq!(code, 0, "{err}");
    let (header, rows) = read_csv(&dir.path().join("profiles.csv"));
    assert_eq!(header, ["t", "v0", "v1", "v2"]);
    assert_eq!(rows[0], vec![0.0, 1.0, 0.0, 0.0]);
    let last = &rows[1];
    for (got, want) in last[1..].iter().zip([0.25, 0.25, 0.5]) {
        assert!((got - want).abs() < 1e-6, "{last:?}");
    }
    for row in &rows {
        assert!((row[1..].iter().sum::<f64>() - 1.0).abs() < 1e-8);
    }
}

#[test]
fn corrected_walk_never_visits_the_other_parent() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = qsw(
        &[
            "simulate",
            "--graph",
            "figure1",
            "--model",
            "corrected",
            "--times",
            "0:5:11",
            "--snapshots",
        ],
        dir.path(),
    );
    assert_eq!(code, 0, "{err}");
    let (_, rows) = read_csv(&dir.path().join("profiles.csv"));
    assert_eq!(rows.len(), 11);
    assert!(rows.iter().all(|r| r[2].abs() < 1e-15), "{rows:?}");
    let snaps: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("snapshots.json")).unwrap())
            .unwrap();
    let rho = &snaps[0]["rho"];
    assert_eq!(rho.as_array().unwrap().len(), 4);
    assert_eq!(rho[0][0], serde_json::json!([1.0, 0.0]));
}

#[test]
fn moral_check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stdout, _) = qsw(
        &["moral-check", "--graph", "figure1", "--model", "global"],
        dir.path(),
    );
    assert_eq!(code, 2);
    let report: MoralReport = serde_json::from_str(stdout.trim()).unwrap();
    assert_eq!(report.detected_pairs, vec![[0, 1]]);
    assert_eq!(report.moral_extra_edges, vec![[0, 1]]);
    assert!(!report.topology_preserved);

    let (code, _, _) = qsw(
        &["moral-check", "--graph", "figure1", "--model", "corrected"],
        dir.path(),
    );
    assert_eq!(code, 0);
    let report: MoralReport =
        serde_json::from_str(&fs::read_to_string(dir.path().join("moral_check.json")).unwrap())
            .unwrap();
    assert!(report.detected_pairs.is_empty());
    assert!(report.topology_preserved);

    let (code, _, _) = qsw(
        &["moral-check", "--graph", "figure3", "--model", "local"],
        dir.path(),
    );
    assert_eq!(code, 0);
}

#[test]
fn errors_exit_with_one_and_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = qsw(
        &["simulate", "--graph", "figure1", "--times", "1"],
        dir.path(),
    );
    assert_eq!(code, 1);
    assert!(err.contains("'model'"), "{err}");
    let (code, _, err) = qsw(
        &[
            "simulate", "--graph", "figure1", "--model", "global", "--omega", "2", "--times", "1",
        ],
        dir.path(),
    );
    assert_eq!(code, 1);
    assert!(err.contains("'omega'"), "{err}");
    let (code, _, _) = qsw(
        &[
            "simulate", "--graph", "nope", "--model", "global", "--times", "1",
        ],
        dir.path(),
    );
    assert_eq!(code, 1);
    let (code, _, _) = qsw(
        &[
            "scaling",
            "--graph",
            "figure1",
            "--omegas",
            "0.5",
            "--times",
            "1:2:10:log",
        ],
        dir.path(),
    );
    assert_eq!(code, 1);
}

#[test]
fn config_file_with_flag_override_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"model":"local","graph":"line:9","times":{"start":1,"stop":3,"count":5,"spacing":"log"},"initial":4}"#,
    )
    .unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let cfg_s = cfg.to_str().unwrap();
    assert_eq!(
        qsw(&["simulate", "--config", cfg_s, "--model", "global"], &a).0,
        0
    );
    assert_eq!(
        qsw(&["simulate", "--config", cfg_s, "--model", "global"], &b).0,
        0
    );
    let fa = fs::read(a.join("profiles.csv")).unwrap();
    assert_eq!(fa, fs::read(b.join("profiles.csv")).unwrap());
    let (_, rows) = read_csv(&a.join("profiles.csv"));
    assert_eq!(rows.len(), 5);
    assert!((rows[4][0] - 3.0).abs() < 1e-15);
}

#[test]
fn scaling_and_symmetry_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = qsw(
        &[
            "scaling",
            "--graph",
            "line:21",
            "--omegas",
            "0.5,1",
            "--times",
            "0.5:3:12:log",
            "--window",
            "5",
        ],
        dir.path(),
    );
    assert_eq!(code, 0, "{err}");
    let text = fs::read_to_string(dir.path().join("scaling_omega_0.5.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,mu2,slope");
    assert_eq!(lines.len(), 13);
    assert!(lines[4].ends_with(','));
    assert!(!lines[5].ends_with(','));
    assert!(dir.path().join("scaling_omega_1.csv").exists());
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("scaling_summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary.as_array().unwrap().len(), 2);

    let (code, _, err) = qsw(
        &["symmetry", "--graph", "segment:11", "--times", "0,2"],
        dir.path(),
    );
    assert_eq!(code, 0, "{err}");
    let (header, rows) = read_csv(&dir.path().join("symmetry.csv"));
    assert_eq!(&header[..3], ["t", "deviation", "v0"]);
    assert!(rows.iter().all(|r| r[1] < 1e-8));
}

#[test]
fn initial_state_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("rho.json");
    fs::write(
        &state,
        "[[[0.5,0],[0,0],[0,0]],[[0,0],[0.5,0],[0,0]],[[0,0],[0,0],[0,0]]]",
    )
    .unwrap();
    let (code, _, err) = qsw(
        &[
            "simulate",
            "--graph",
            "figure1",
            "--model",
            "local",
            "--times",
            "0",
            "--initial-file",
            state.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(code, 0, "{err}");
    let (_, rows) = read_csv(&dir.path().join("profiles.csv"));
    assert_eq!(rows[0], vec![0.0, 0.5, 0.5, 0.0]);
}
