use std::path::Path;
use std::process::{Command, Output};

use bb84z::codes::CodePair;
use bb84z::Transcript;

fn bb84z(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bb84z"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn run_identity_transcript() {
    let out = bb84z(&[
        "run", "--n", "8", "--nz", "8", "--nx", "8", "--attack", "identity", "--seed", "1",
    ]);
    assert_eq!(code(&out), 0);
    let t: Transcript = serde_json::from_slice(&out.stdout).unwrap();
    assert!(!t.aborted);
    assert_eq!(t.key_alice, t.key_bob);
    assert!(t.key_alice.is_some());
    assert_eq!(t.i_sent.len(), 24);
}

#[test]
fn run_flip_z_batch_aborts() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("stats.csv");
    let out = bb84z(&[
        "run",
        "--attack",
        "flip-z",
        "--paz",
        "0.05",
        "--pax",
        "0.05",
        "--trials",
        "1000",
        "--seed",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let (header, rows) = csv_rows(&path);
    assert_eq!(
        header,
        [
            "trial",
            "aborted",
            "info_errors",
            "test_z_errors",
            "test_x_errors",
            "keys_equal"
        ]
    );
    assert_eq!(rows.len(), 1000);
    let aborted = rows.iter().filter(|r| r[1] == "true").count();
    // 8 TEST-X bits at error rate 1/2 must all be clean to pass: 1/256.
    assert!(aborted > 980, "{aborted}");
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r[0], i.to_string());
        let tz: usize = r[3].parse().unwrap();
        assert_eq!(tz, 0, "flip-z leaves the z basis untouched");
        let tx: usize = r[4].parse().unwrap();
        assert_eq!(r[1] == "true", tx > 0);
    }
}

#[test]
fn run_echoes_generated_seed() {
    let out = bb84z(&["run"]);
    assert_eq!(code(&out), 0);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("seed="), "{stderr}");
}

#[test]
fn run_validation_and_io_errors() {
    assert_eq!(code(&bb84z(&["run", "--n", "0"])), 2);
    assert_eq!(code(&bb84z(&["run", "--paz", "0.7", "--seed", "1"])), 2);
    assert_eq!(code(&bb84z(&["run", "--attack", "rates:0.1", "--seed", "1"])), 2);
    assert_eq!(
        code(&bb84z(&["run", "--attack", "/nonexistent/attack.json", "--seed", "1"])),
        3
    );
    assert_eq!(
        code(&bb84z(&["run", "--seed", "1", "--out", "/nonexistent/dir/t.json"])),
        3
    );
    assert_eq!(code(&bb84z(&["run", "--config", "/nonexistent/config.json"])), 3);
    assert_eq!(code(&bb84z(&["no-such-command"])), 2);
}

#[test]
fn run_with_code_file_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let code_path = dir.path().join("hamming.txt");
    std::fs::write(&code_path, CodePair::hamming74().to_text()).unwrap();
    let config = dir.path().join("run.json");
    std::fs::write(
        &config,
        format!(
            r#"{{"nz": 5, "nx": 6, "attack": "rates:0.1,0.1", "seed": 11, "code": "{}"}}"#,
            code_path.display()
        ),
    )
    .unwrap();
    let out = bb84z(&["run", "--config", config.to_str().unwrap(), "--nx", "4"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let t: Transcript = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(
        (t.partition.s.weight(), t.partition.z.weight(), t.partition.b.weight()),
        (7, 5, 4)
    );
    // code length disagrees with --n
    let bad = bb84z(&["run", "--config", config.to_str().unwrap(), "--n", "5"]);
    assert_eq!(code(&bad), 2);
}

#[test]
fn bounds_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bounds.csv");
    let out = bb84z(&["bounds", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let (header, rows) = csv_rows(&path);
    assert_eq!(header, ["quantity", "value"]);
    let get = |name: &str| -> f64 { rows.iter().find(|r| r[0] == name).unwrap()[1].parse().unwrap() };
    // n = n_x = n_z = 1000, eps = 0.05, R = 0.1
    assert!((get("security_bound") - 200.0 * (-0.625f64).exp()).abs() < 1e-9);
    assert_eq!(get("security_bound_clamped"), 1.0);
    assert!((get("reliability_bound") - (-1.25f64).exp()).abs() < 1e-9);
    assert!((get("delta") - 0.2).abs() < 1e-12);
    assert!(get("asymptotic_key_rate") > get("key_rate"));
    assert_eq!(code(&bb84z(&["bounds", "--pax", "0.3", "--eps-sec", "0.3"])), 2);
}

#[test]
fn threshold_curve_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curve.csv");
    assert_eq!(code(&bb84z(&["threshold-curve", "--out", path.to_str().unwrap()])), 0);
    let (header, rows) = csv_rows(&path);
    assert_eq!(header, ["p_az", "p_ax_max"]);
    assert_eq!(rows.len(), 102);
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap()))
        .collect();
    assert_eq!(pts[0], (0.0, 0.25));
    assert_eq!(pts.last().unwrap().1, 0.0);
    assert!(pts.windows(2).all(|w| w[0].0 <= w[1].0 && w[1].1 <= w[0].1));
    assert!(pts
        .iter()
        .any(|&(a, x)| (a - 0.0756).abs() < 2e-4 && (x - 0.0756).abs() < 2e-4));
    assert!(rows.iter().all(|r| r[0].split('.').nth(1).unwrap().len() == 9));
    assert_eq!(code(&bb84z(&["threshold-curve", "--points", "1"])), 2);
}

#[test]
fn verify_report_and_exit_codes() {
    assert_eq!(code(&bb84z(&["verify"])), 2, "seed is mandatory");
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.csv");
    let out = bb84z(&[
        "verify",
        "--seed",
        "5",
        "--trials",
        "500",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = csv_rows(&path);
    assert_eq!(header, ["suite", "instance", "lhs", "rhs", "satisfied"]);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains(&format!("{} instances", rows.len())), "{stderr}");
    for r in &rows {
        assert_eq!(r.len(), 5);
        let lhs: f64 = r[2].parse().unwrap();
        let rhs: f64 = r[3].parse().unwrap();
        assert_eq!(r[4], "true");
        assert!(lhs <= rhs + 1e-9);
    }
    let count = |s: &str| rows.iter().filter(|r| r[0] == s).count();
    assert_eq!(count("key_distance"), count("expected_difference"));
    assert_eq!(count("key_distance") % 9, 0);
    assert_eq!(count("hoeffding"), 96);
    assert_eq!(count("decoder"), 113);
    assert_eq!(count("joint_event"), 9);

    let broken = dir.path().join("broken.csv");
    let out = bb84z(&[
        "verify",
        "--seed",
        "5",
        "--trials",
        "100",
        "--rhs-scale",
        "0",
        "--out",
        broken.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("violated: key_distance"), "violations are listed");
    let (_, rows) = csv_rows(&broken);
    assert!(rows.iter().any(|r| r[4] == "false"));
}

#[test]
fn code_search_found_and_not_found() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("code.txt");
    let out = bb84z(&[
        "code-search",
        "--n",
        "7",
        "--r",
        "3",
        "--m",
        "1",
        "--delta",
        "0.14",
        "--t",
        "1",
        "--seed",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let found = CodePair::from_text(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!((found.n(), found.r(), found.m()), (7, 3, 1));
    assert!(found.d_rm() as f64 / 7.0 > 0.14);
    assert!(found.t_corr() >= 1);

    let none = bb84z(&[
        "code-search",
        "--n",
        "3",
        "--r",
        "2",
        "--m",
        "1",
        "--t",
        "5",
        "--seed",
        "2",
    ]);
    assert_eq!(code(&none), 4);
    assert_eq!(code(&bb84z(&["code-search", "--n", "3", "--r", "3", "--m", "1"])), 2);
}

#[test]
fn identical_seeds_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for i in 0..2 {
        let path = dir.path().join(format!("{i}.csv"));
        let out = bb84z(&[
            "run",
            "--attack",
            "rotation:0.7",
            "--trials",
            "300",
            "--seed",
            "99",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
        outputs.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let other = bb84z(&["run", "--attack", "rotation:0.7", "--trials", "300", "--seed", "100"]);
    assert_ne!(other.stdout, outputs[0]);
}
