//! CLI behavior tests: file round-trips, exit codes, and the determinism
//! criterion (byte-identical output across runs and worker counts).

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_rcc")
}

struct Workdir {
    dir: PathBuf,
}

impl Workdir {
    fn new(tag: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("rcc-cli-test-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        Self { dir }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn write(&self, name: &str, text: &str) -> PathBuf {
        let p = self.path(name);
        std::fs::write(&p, text).unwrap();
        p
    }
}

impl Drop for Workdir {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.dir);
    }
}

/// Y = X noiseless, Z = X through a 0.25 flip, |S| = 2 mute.
fn fixture_channel_json() -> String {
    let mut gamma = vec![vec![vec![vec![0.0f64; 2]; 2]; 2]; 2];
    for x in 0..2 {
        for s in 0..2 {
            for z in 0..2 {
                gamma[x][s][x][z] = if z == x { 0.75 } else { 0.25 };
            }
        }
    }
    serde_json::json!({"X": 2, "S": 2, "Y": 2, "Z": 2, "gamma": gamma}).to_string()
}

fn uniform_input_json() -> String {
    let p = vec![vec![vec![0.125f64; 2]; 2]; 2];
    serde_json::json!({"U": 2, "p": p}).to_string()
}

fn const_u_input_json() -> String {
    let p = vec![vec![vec![0.25f64; 2]; 2]];
    serde_json::json!({"U": 1, "p": p}).to_string()
}

fn run_with_threads(threads: &str, args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .env("RCC_THREADS", threads)
        .output()
        .expect("binary runs")
}

fn run(args: &[&str]) -> Output {
    run_with_threads("2", args)
}

#[test]
fn classify_prints_report_and_exits_zero() {
    let wd = Workdir::new("classify");
    let ch = wd.write("ch.json", &fixture_channel_json());
    let out = run(&["classify", ch.to_str().unwrap()]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["reversely_degraded"], true);
    assert_eq!(report["degraded"], false);
    assert_eq!(report["class_nl"], true);
}

#[test]
fn mi_evaluates_flip_information() {
    let wd = Workdir::new("mi");
    let ch = wd.write("ch.json", &fixture_channel_json());
    let input = wd.write("in.json", &const_u_input_json());
    let out = run(&[
        "mi",
        ch.to_str().unwrap(),
        input.to_str().unwrap(),
        "--expr",
        "I(X;Z|US)",
    ]);
    assert!(out.status.success());
    let value: f64 = String::from_utf8_lossy(&out.stdout).trim().parse().unwrap();
    assert!((value - 0.188722).abs() < 1e-6, "got {value}");
}

#[test]
fn region_csv_has_exact_header_and_row_count() {
    let wd = Workdir::new("region");
    let ch = wd.write("ch.json", &fixture_channel_json());
    let out_file = wd.path("pts.csv");
    let out = run(&[
        "region",
        "--bound",
        "d-in-tilde",
        "--channel",
        ch.to_str().unwrap(),
        "--r0-grid",
        "5",
        "--restarts",
        "8",
        "--seed",
        "1",
        "--out",
        out_file.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&out_file).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "bound,R0,R1,Re,slack_min");
    assert_eq!(lines.len(), 6, "header plus 5 grid rows");
}

#[test]
fn region_witness_round_trips_through_parser() {
    let wd = Workdir::new("witness");
    let ch = wd.write("ch.json", &fixture_channel_json());
    let witness = wd.path("witness.json");
    let out = run(&[
        "region",
        "--bound",
        "d-in-tilde",
        "--channel",
        ch.to_str().unwrap(),
        "--r0-grid",
        "3",
        "--restarts",
        "8",
        "--seed",
        "1",
        "--out",
        wd.path("pts.csv").to_str().unwrap(),
        "--witness-out",
        witness.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&witness).unwrap();
    rcc_core::io::parse_input(&text).expect("witness file parses through the input parser");
}

#[test]
fn gaussian_sweep_and_membership() {
    let out = run(&[
        "gaussian", "--region", "gd1e-in", "--P1", "1", "--P2", "1", "--N1", "1", "--N2", "2",
        "--rho", "0.7071067811865476", "--resolution", "11",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "region,theta,eta,R0,R1,Re");
    assert_eq!(lines.len(), 12);

    let out = run(&[
        "gaussian", "--region", "gd-in", "--P1", "1", "--P2", "1", "--N1", "1", "--N2", "2",
        "--rho", "0.0", "--resolution", "501", "--triple", "0,0.5,0",
    ]);
    assert!(out.status.success());
    let verdict: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(verdict["member"], true, "{verdict}");
}

#[test]
fn secrecy_reports_wiretap_value() {
    let wd = Workdir::new("secrecy");
    let ch = wd.write("ch.json", &fixture_channel_json());
    let out = run(&[
        "secrecy",
        "--channel",
        ch.to_str().unwrap(),
        "--mode",
        "det",
        "--restarts",
        "24",
        "--seed",
        "2",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let verdict: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let lower = verdict["lower"].as_f64().unwrap();
    let upper = verdict["upper"].as_f64().unwrap();
    assert!((lower - 0.8112781244591328).abs() < 1e-4);
    assert!(lower <= upper + 1e-9);
}

#[test]
fn simulate_report_file_matches_stdout() {
    let wd = Workdir::new("simulate");
    let ch = wd.write("ch.json", &fixture_channel_json());
    let input = wd.write("in.json", &uniform_input_json());
    let report_file = wd.path("report.json");
    let out = run(&[
        "simulate",
        "--channel",
        ch.to_str().unwrap(),
        "--input",
        input.to_str().unwrap(),
        "--n",
        "8",
        "--blocks",
        "3",
        "--trials",
        "20",
        "--eps",
        "0.05",
        "--seed",
        "7",
        "--preset-rates",
        "--out",
        report_file.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    let file = std::fs::read_to_string(&report_file).unwrap();
    assert_eq!(stdout, file);
    let report: serde_json::Value = serde_json::from_str(&file).unwrap();
    assert_eq!(report["n"], 8);
    assert_eq!(report["B"], 3);
    assert_eq!(report["trials"], 20);
}

#[test]
fn exit_codes_follow_the_contract() {
    let wd = Workdir::new("codes");
    // usage error
    let out = run(&["region", "--bound"]);
    assert_eq!(out.status.code(), Some(1));
    // parse/validation error
    let bad = wd.write("bad.json", "{\"X\": 2}");
    let out = run(&["classify", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    // unknown bound id
    let ch = wd.write("ch.json", &fixture_channel_json());
    let out = run(&["region", "--bound", "nope", "--channel", ch.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    // budget exceeded
    let out = run(&[
        "region",
        "--bound",
        "d-in-tilde",
        "--channel",
        ch.to_str().unwrap(),
        "--restarts",
        "4000",
        "--budget-ms",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    // invariant suites pass
    let out = run(&["check", "--suite", "all"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("[pass]"));
    // unknown suite
    let out = run(&["check", "--suite", "nope"]);
    assert_eq!(out.status.code(), Some(2));
}

fn assert_identical_runs(label: &str, args: &[&str], out_files: &[&Path]) {
    let mut reference: Option<(Vec<u8>, Vec<Vec<u8>>)> = None;
    for threads in ["1", "4", "1", "4"] {
        let out = run_with_threads(threads, args);
        assert!(out.status.success(), "{label}: {}", String::from_utf8_lossy(&out.stderr));
        let files: Vec<Vec<u8>> =
            out_files.iter().map(|p| std::fs::read(p).unwrap_or_default()).collect();
        match &reference {
            None => reference = Some((out.stdout.clone(), files)),
            Some((stdout, ref_files)) => {
                assert_eq!(stdout, &out.stdout, "{label}: stdout differs (threads {threads})");
                assert_eq!(ref_files, &files, "{label}: output files differ (threads {threads})");
            }
        }
    }
}

#[test]
fn criterion_9_byte_identical_across_runs_and_thread_counts() {
    let wd = Workdir::new("det");
    let ch = wd.write("ch.json", &fixture_channel_json());
    let input = wd.write("in.json", &uniform_input_json());
    let report = wd.path("report.json");
    assert_identical_runs(
        "simulate",
        &[
            "simulate",
            "--channel",
            ch.to_str().unwrap(),
            "--input",
            input.to_str().unwrap(),
            "--n",
            "10",
            "--blocks",
            "4",
            "--trials",
            "60",
            "--eps",
            "0.05",
            "--seed",
            "99",
            "--preset-rates",
            "--out",
            report.to_str().unwrap(),
        ],
        &[&report],
    );
    let pts = wd.path("pts.csv");
    assert_identical_runs(
        "region",
        &[
            "region",
            "--bound",
            "s-in-tilde",
            "--channel",
            ch.to_str().unwrap(),
            "--r0-grid",
            "4",
            "--restarts",
            "12",
            "--seed",
            "5",
            "--out",
            pts.to_str().unwrap(),
        ],
        &[&pts],
    );
    println!("criterion 9: PASS — simulate and region byte-identical across 2 runs x RCC_THREADS in {{1,4}}");
}
