use std::path::Path;
use std::process::{Command, Output};

fn mgw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mgw")).args(args).output().expect("mgw runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

#[test]
fn modcod_prints_the_table_efficiency() {
    for (sinr, eff) in [("7.80", "2.370"), ("-2.85", "0.434"), ("-2.86", "0.000"), ("17.73", "5.163")] {
        let o = mgw(&["modcod", "--sinr-db", sinr]);
        assert!(o.status.success());
        assert_eq!(stdout(&o), eff, "{sinr}");
    }
}

#[test]
fn overhead_matches_the_closed_forms() {
    let base = ["overhead", "--ng", "11", "--k", "100", "--kg", "7", "--g", "14", "--scheme"];
    for (scheme, value) in [("gcm", "200508"), ("7gc", "100254"), ("4gc", "57288"), ("icm", "0")] {
        let mut args = base.to_vec();
        args.push(scheme);
        let o = mgw(&args);
        assert!(o.status.success(), "{scheme}");
        assert_eq!(stdout(&o), value, "{scheme}");
    }
    let mut args = base.to_vec();
    args.extend(["lmc", "--per-gateway"]);
    assert_eq!(stdout(&mgw(&args)), "143");
}

#[test]
fn exit_codes_separate_failure_kinds() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(mgw(&["no-such-command"]).status.code(), Some(2));

    let bad_cfg = dir.path().join("bad.toml");
    std::fs::write(&bad_cfg, "[run]\ndrops = 0\n").unwrap();
    let o = mgw(&["run", "-c", bad_cfg.to_str().unwrap(), "-o", dir.path().join("x").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));

    let bad_table = dir.path().join("t.csv");
    std::fs::write(&bad_table, "mode,efficiency_bps\nQPSK,1\n").unwrap();
    let o = mgw(&["modcod", "--sinr-db", "3", "--table", bad_table.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
}

fn run_into(dir: &Path) -> Vec<u8> {
    let o = mgw(&["run", "--drops", "4", "--seed", "11", "-o", dir.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    std::fs::read(dir.join("results.csv")).unwrap()
}

#[test]
fn runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = run_into(&dir.path().join("a"));
    let b = run_into(&dir.path().join("b"));
    assert!(!a.is_empty());
    assert_eq!(a, b);
    let header = String::from_utf8_lossy(&a).lines().next().unwrap().to_string();
    assert_eq!(header, "drop,seed,scenario,user,beam,cluster,sinr_db,efficiency_bps");
    assert!(dir.path().join("a/summary.json").exists());
}

#[test]
fn channel_snapshots_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let o = mgw(&["gen-channel", "--drops", "2", "-o", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let f = mgw_precoding::harness::io::MatrixFile::read(&dir.path().join("channel_0001.json")).unwrap();
    assert_eq!((f.rows, f.cols), (21, f.matrix().unwrap().ncols()));
}
