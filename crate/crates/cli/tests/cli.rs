use std::process::{Command, Output};

use serde_json::Value;

fn pittlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pittlab"))
        .args(args)
        .env_remove("SOURCE_DATE_EPOCH")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn records(o: &Output) -> Vec<Value> {
    stdout(o).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn region_sweep_gives_one_record_per_point() {
    let o = pittlab(&[
        "region",
        "--p",
        "1.2:1.8:5",
        "--q",
        "2:4:5",
        "--gamma",
        "0.35,0.4,0.45,0.5",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let recs = records(&o);
    assert_eq!(recs.len(), 100);
    for r in &recs {
        assert!(r["outputs"]["verdict"].is_string());
    }
}

#[test]
fn sharpness_ex411_single_record() {
    let o = pittlab(&["sharpness", "--family", "EX411"]);
    assert!(o.status.success());
    let recs = records(&o);
    assert_eq!(recs.len(), 1);
    let out = &recs[0]["outputs"];
    assert_eq!(out["series"].as_array().unwrap().len(), 6);
    assert_eq!(out["verdict"], "sharp");
    assert!(out["fit"]["exponent"].is_number());
}

#[test]
fn empty_grid_is_success_with_no_records() {
    let o = pittlab(&["region", "--p", "", "--q", "2", "--gamma", "0.1"]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
}

#[test]
fn csv_header_written_once_on_append() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    let p = path.to_str().unwrap();
    for _ in 0..2 {
        let o = pittlab(&[
            "region", "--p", "1.5", "--q", "3", "--gamma", "0.2", "--format", "csv", "--out", p,
        ]);
        assert!(o.status.success());
    }
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("timestamp,command,version,seed,param.d"));
    assert!(!lines[1].starts_with("timestamp"));
}

#[test]
fn plotdata_has_one_row_per_schedule_point() {
    let o = pittlab(&["sharpness", "--family", "T61", "--format", "plotdata"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#') && !l.is_empty()).collect();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r.split('\t').count() == 3));
}

#[test]
fn report_round_trips_jsonl() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.jsonl");
    let p = path.to_str().unwrap();
    let o = pittlab(&[
        "ratio", "--p", "1.5,1.8", "--q", "3", "--gamma", "0.2", "--seed", "7", "--out", p,
    ]);
    assert!(o.status.success());
    let original = std::fs::read_to_string(&path).unwrap();
    let o = pittlab(&["report", "--input", p]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), original);
}

#[test]
fn exit_codes() {
    assert_eq!(pittlab(&["region", "--nonsense", "1"]).status.code(), Some(1));
    assert_eq!(
        pittlab(&["ratio", "--p", "1.5", "--q", "3", "--gamma", "0.2"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        pittlab(&["region", "--p", "0.5", "--q", "3", "--gamma", "0.2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        pittlab(&["sharpness", "--family", "EX411", "--eps", "0.9"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(pittlab(&["region", "--help"]).status.code(), Some(0));
}

#[test]
fn mixed_commands_in_report_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mix.jsonl");
    let p = path.to_str().unwrap();
    assert!(
        pittlab(&["region", "--p", "1.5", "--q", "3", "--gamma", "0.2", "--out", p])
            .status
            .success()
    );
    assert!(pittlab(&["interp", "--theta", "0.5", "--q", "2", "--out", p])
        .status
        .success());
    assert_eq!(
        pittlab(&["report", "--input", p, "--format", "csv"]).status.code(),
        Some(1)
    );
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("exp.toml");
    std::fs::write(
        &path,
        "command = \"region\"\n\n[params]\np = [1.5, 2]\nq = \"2:3:3\"\ngamma = 0.1\n",
    )
    .unwrap();
    let o = pittlab(&["region", "--config", path.to_str().unwrap(), "--gamma", "0.2"]);
    assert!(o.status.success());
    let recs = records(&o);
    assert_eq!(recs.len(), 6);
    assert!(recs.iter().all(|r| r["params"]["gamma"] == 0.2));
}

#[test]
fn config_errors_carry_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "command = \"region\"\n[params]\np = 1.5\nzeta = 3\n").unwrap();
    let o = pittlab(&["region", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 4") && err.contains("zeta"), "{err}");
}

#[test]
fn jsonl_is_byte_identical_across_runs_and_jobs() {
    let args = [
        "ratio", "--p", "1.5:2:4", "--q", "2.5,3", "--gamma", "0.2", "--seed", "11", "--sample", "0,1",
    ];
    let run = |jobs: &str| {
        let mut a = args.to_vec();
        a.extend(["--jobs", jobs]);
        let o = pittlab(&a);
        assert!(o.status.success());
        o.stdout
    };
    let one = run("1");
    assert_eq!(one, run("1"));
    assert_eq!(one, run("8"));
    assert_eq!(one.split(|b| *b == b'\n').filter(|l| !l.is_empty()).count(), 16);
}

#[test]
fn every_subcommand_help_names_its_inequality() {
    let expect = [
        ("region", "Pitt"),
        ("ratio", "Pitt"),
        ("type-test", "Hausdorff-Young"),
        ("sharpness", "sharpness"),
        ("zygmund", "Zygmund"),
        ("bochkarev", "Bochkarev"),
        ("rademacher", "Rademacher"),
        ("interp", "interpolation"),
        ("hardy", "Hardy"),
        ("stein-weiss", "Stein-Weiss"),
        ("report", "inequality"),
    ];
    for (cmd, word) in expect {
        let o = pittlab(&[cmd, "--help"]);
        assert!(o.status.success());
        assert!(stdout(&o).contains(word), "{cmd} help lacks {word}");
    }
}
