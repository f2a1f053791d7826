use std::process::{Command, Output};

use ecplan_cli::commands::{CurveRow, DecodeOutput, FragmentEntry, PlanOutput, SimulationOutput};
use ecplan_cli::compare::ComparisonRow;
use ecplan_cli::output::format_significant;
use ecplan_core::codec::RecoverabilityRow;
use serde::de::DeserializeOwned;
use serde::Serialize;

fn ecplan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ecplan"))
        .args(args)
        .output()
        .expect("spawn ecplan")
}

fn stdout(args: &[&str]) -> String {
    let out = ecplan(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json<T: DeserializeOwned + Serialize + PartialEq + std::fmt::Debug>(args: &[&str]) -> T {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let text = stdout(&full);
    let parsed: T = serde_json::from_str(&text).unwrap();
    // emitting the parsed value again gives the same document
    assert_eq!(serde_json::to_string_pretty(&parsed).unwrap() + "\n", text);
    parsed
}

fn code(args: &[&str]) -> Option<i32> {
    ecplan(args).status.code()
}

#[test]
fn plan_outputs() {
    let ec: PlanOutput = json(&["plan", "--mode", "ec", "--epsilon", "1e-6", "--p", "0.005", "--m", "8"]);
    assert_eq!((ec.m, ec.n, ec.redundancy_factor), (Some(8), Some(3), 1.375));
    assert!((ec.loss - 1.99e-7).abs() / 1.99e-7 < 0.01);
    let rep: PlanOutput = json(&["plan", "--mode", "replication", "--epsilon", "1e-6", "--p", "0.005"]);
    assert_eq!(rep.k, Some(3));
    assert_eq!(
        code(&[
            "plan",
            "--mode",
            "ec",
            "--epsilon",
            "1e-30",
            "--p",
            "0.5",
            "--m",
            "8",
            "--cap",
            "4"
        ]),
        Some(3)
    );
    assert_eq!(
        code(&["plan", "--mode", "ec", "--epsilon", "1e-6", "--p", "0.005"]),
        Some(2)
    );
    assert_eq!(
        code(&["plan", "--mode", "replication", "--epsilon", "1.5", "--p", "0.005"]),
        Some(2)
    );
}

#[test]
fn formats_carry_the_same_numbers() {
    let args = [
        "compare",
        "--schemes",
        "rep:3,ec:8+3,lrc:6+2+2,hybrid:2x4+1",
        "--q",
        "0.001",
        "--latency",
        "1,100",
    ];
    let rows: Vec<ComparisonRow> = json(&args);

    let mut csv_args = args.to_vec();
    csv_args.extend(["--format", "csv"]);
    let csv_text = stdout(&csv_args);
    let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
    let from_csv: Vec<ComparisonRow> = reader.deserialize().collect::<Result<_, _>>().unwrap();
    assert_eq!(from_csv, rows);

    let table = stdout(&[&args[..], &["--precision", "4"]].concat());
    let lines: Vec<&str> = table.lines().collect();
    for (row, line) in rows.iter().zip(&lines[1..]) {
        let cells: Vec<&str> = line.split_whitespace().collect();
        assert_eq!(cells[0], row.scheme);
        assert_eq!(cells[3], format_significant(row.loss, 4));
        assert_eq!(cells[6], format_significant(row.any_failure, 4));
    }
}

#[test]
fn identical_schemes_give_identical_rows() {
    let rows: Vec<ComparisonRow> = json(&["compare", "--schemes", "ec:6+3,ec:6+3", "--q", "0.01"]);
    assert_eq!(rows[0], rows[1]);
    assert_eq!(rows[1].relative_space, 1.0);
}

#[test]
fn compare_storage_and_failure_ratio() {
    let rows: Vec<ComparisonRow> = json(&["compare", "--p", "0.005", "--schemes", "rep:3,ec:8+3"]);
    assert_eq!((rows[0].redundancy_factor, rows[1].redundancy_factor), (3.0, 1.375));
    assert_eq!(rows[0].loss, 0.005f64.powi(3));
    assert!((rows[1].relative_space - 0.458).abs() < 1e-3);
    let ratio = rows[1].any_failure / rows[0].any_failure;
    assert!((ratio - 3.594).abs() < 1e-3, "{ratio}");
    let table = stdout(&["compare", "--p", "0.005", "--schemes", "rep:3,ec:8+3"]);
    assert!(
        table.contains("ec:8+3 uses 45.8% of the disk space of rep:3"),
        "{table}"
    );
}

#[test]
fn simulation_is_reproducible() {
    let args = [
        "simulate", "loss", "--p", "0.1", "--m", "2", "--n", "1", "--seed", "42", "--format", "json",
    ];
    let first = stdout(&args);
    assert_eq!(first, stdout(&args));
    assert_eq!(first, stdout(&[&args[..], &["--threads", "1"]].concat()));
    assert_eq!(first, stdout(&[&args[..], &["--threads", "3"]].concat()));
    let parsed: SimulationOutput = serde_json::from_str(&first).unwrap();
    assert_eq!(parsed.result.trials, 1_000_000);
    assert!((parsed.result.point_estimate - 0.028).abs() < 5e-4);
    assert!(parsed.result.z_score.unwrap().abs() < 4.0);
    let _: SimulationOutput = json(&[
        "simulate",
        "latency",
        "--mode",
        "replication",
        "--p",
        "0.1",
        "--trials",
        "1000",
    ]);

    assert_eq!(
        code(&["simulate", "--trials", "1000", "loss", "--p", "0.001", "--m", "2", "--n", "1"]),
        Some(3)
    );
    assert_eq!(
        code(&["simulate", "--trials", "1000", "loss", "--p", "0.1", "--m", "2", "--n", "1", "--check"]),
        Some(0)
    );
}

#[test]
fn codec_round_trip_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("object.bin");
    let data: Vec<u8> = (0..100_003u32)
        .map(|i| (i.wrapping_mul(2_654_435_761) >> 13) as u8)
        .collect();
    std::fs::write(&input, &data).unwrap();
    let frags = dir.path().join("frags");
    let entries: Vec<FragmentEntry> = json(&[
        "codec",
        "encode",
        "--input",
        input.to_str().unwrap(),
        "--out-dir",
        frags.to_str().unwrap(),
        "--scheme",
        "lrc-6-2-2",
    ]);
    assert_eq!(entries.len(), 10);
    for gone in [0, 4, 9] {
        std::fs::remove_file(&entries[gone].path).unwrap();
    }
    let output = dir.path().join("back.bin");
    let decoded: DecodeOutput = json(&[
        "codec",
        "decode",
        frags.to_str().unwrap(),
        "--output",
        output.to_str().unwrap(),
    ]);
    assert_eq!(decoded.bytes, data.len());
    assert_eq!(std::fs::read(&output).unwrap(), data);

    std::fs::write(dir.path().join("junk"), b"ECFR nonsense").unwrap();
    assert_eq!(
        code(&[
            "codec",
            "decode",
            dir.path().join("junk").to_str().unwrap(),
            "--output",
            "/dev/null"
        ]),
        Some(6)
    );
    assert_eq!(
        code(&[
            "codec",
            "encode",
            "--input",
            "/nonexistent/file",
            "--out-dir",
            "x",
            "--scheme",
            "rs:2+1"
        ]),
        Some(1)
    );
}

#[test]
fn lrc_report() {
    let rows: Vec<RecoverabilityRow> = json(&["codec", "report", "--scheme", "lrc-6-2-2", "--max-t", "4"]);
    assert_eq!((rows[3].total_patterns, rows[3].recoverable), (120, 120));
    assert_eq!((rows[4].total_patterns, rows[4].recoverable), (210, 180));
}

#[test]
fn curves() {
    let rows: Vec<CurveRow> = json(&["curve", "--x", "p", "--range", "0.001:0.1:7"]);
    assert_eq!(rows.len(), 14);
    for scheme in ["rep:3", "ec:8+3"] {
        let losses: Vec<f64> = rows
            .iter()
            .filter(|r| r.row.scheme == scheme)
            .map(|r| r.row.loss)
            .collect();
        assert!(losses.windows(2).all(|w| w[0] <= w[1]), "{scheme}: {losses:?}");
    }

    let rows: Vec<CurveRow> = json(&[
        "curve",
        "--x",
        "n",
        "--range",
        "0:6",
        "--schemes",
        "ec:8+0",
        "--epsilon",
        "1e-6",
    ]);
    let first = rows.iter().find(|r| r.row.meets_target == Some(true)).unwrap();
    assert_eq!(first.x, 3.0);

    let rows: Vec<CurveRow> = json(&[
        "curve",
        "--x",
        "scale",
        "--range",
        "1:8",
        "--schemes",
        "ec:2+1",
        "--p",
        "0.01",
    ]);
    assert!(rows.windows(2).all(|w| w[1].row.loss <= w[0].row.loss));

    let csv = stdout(&[
        "curve",
        "--x",
        "m",
        "--values",
        "4,8",
        "--schemes",
        "ec:4+2",
        "--format",
        "csv",
    ]);
    assert!(csv.starts_with("x,scheme,redundancy_factor,relative_space,loss,meets_target,unavailability,"));
    assert_eq!(
        code(&["curve", "--x", "m", "--values", "4", "--schemes", "rep:3"]),
        Some(2)
    );
    assert_eq!(code(&["curve", "--x", "n", "--values", "1.5"]), Some(2));
}
