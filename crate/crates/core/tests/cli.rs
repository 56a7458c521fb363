use std::fs;
use std::io::BufReader;
use std::process::Command;

use polyform::cli::{run_with, EXIT_DIFFERS, EXIT_OK, EXIT_USAGE};
use polyform::report::{read_records, Format, RunManifest, TruantRecord};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("polyform").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

#[test]
fn truant_summary_and_manifest_on_stderr() {
    let (code, out, err) = run(&["truant", "--m", "35", "--coeffs", "1,2,4,8,16", "--bound", "100"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("33"), "{out}");
    let man: RunManifest = serde_json::from_str(err.trim()).unwrap();
    assert_eq!(man.command, "truant");
    assert_eq!(man.exit_code, 0);
    assert_eq!(man.payload_hash.len(), 64);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["eval", "--m", "2", "--x", "1"]).0, EXIT_USAGE);
    assert_eq!(run(&["no-such-command"]).0, EXIT_USAGE);
    assert_eq!(run(&["truant", "--m", "5", "--coeffs", "3,1", "--bound", "10"]).0, EXIT_USAGE);
    assert_eq!(run(&["eval", "--m", "5"]).0, EXIT_USAGE);
}

#[test]
fn failed_claim_exits_one() {
    // one of the short power-of-two forms misses its stated value
    let (code, _, _) = run(&["lab", "pow2", "--ms", "32", "--bound", "2000"]);
    assert_eq!(code, EXIT_DIFFERS);
    let (code, _, _) = run(&["lab", "ell", "--ms", "3..12", "--bound", "2000"]);
    assert_eq!(code, EXIT_OK);
}

#[test]
fn out_file_round_trips_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut payloads = Vec::new();
    for i in 0..2 {
        let p = dir.path().join(format!("t{i}.csv"));
        let ps = p.to_str().unwrap();
        let (code, _, _) = run(&[
            "--out", ps, "--format", "csv", "truant", "--m", "8", "--coeffs", "1,1,2", "--bound", "300",
        ]);
        assert_eq!(code, EXIT_OK);
        let recs: Vec<TruantRecord> =
            read_records(BufReader::new(fs::File::open(&p).unwrap()), Format::Csv).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].m, 8);
        assert_eq!(recs[0].coeffs, "1,1,2");
        let man: RunManifest =
            serde_json::from_str(&fs::read_to_string(format!("{ps}.manifest.json")).unwrap()).unwrap();
        assert_eq!(man.outputs, vec![ps.to_string()]);
        payloads.push((fs::read(&p).unwrap(), man.payload_hash, man.input_hash));
    }
    assert_eq!(payloads[0], payloads[1]);
}

#[test]
fn tree_and_census_write_sibling_streams() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("tree.jsonl");
    let (code, out, _) = run(&["--out", t.to_str().unwrap(), "tree", "--m", "4", "--bound", "256"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("gamma_B=15"), "{out}");
    let nodes = fs::read_to_string(dir.path().join("tree.nodes.jsonl")).unwrap();
    assert_eq!(nodes.lines().count(), 77);

    let c = dir.path().join("c.csv");
    let (code, _, _) = run(&[
        "--out", c.to_str().unwrap(), "--format", "csv", "census", "--m", "4", "--bound", "256",
    ]);
    assert_eq!(code, EXIT_OK);
    let counts = fs::read_to_string(dir.path().join("c.counts.csv")).unwrap();
    assert_eq!(counts, "m,rank,count\n4,4,54\n4,5,11\n");
}

#[test]
fn recompute_s_writes_diff() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("s.jsonl");
    let (code, _, _) = run(&["--out", p.to_str().unwrap(), "recompute-s"]);
    assert_eq!(code, EXIT_OK);
    let diff = fs::read_to_string(dir.path().join("s.diff.jsonl")).unwrap();
    assert_eq!(diff.lines().count(), 17);
    assert_eq!(fs::read_to_string(&p).unwrap().lines().count(), 161 * 8);
}

#[test]
fn binary_entry_point() {
    let bin = env!("CARGO_BIN_EXE_polyform");
    let o = Command::new(bin).args(["eval", "--m", "7", "--x", "-3"]).output().unwrap();
    assert!(o.status.success());
    // 5*9 + 3*3 = 54, halved
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "27");
    let o = Command::new(bin).args(["verify-identities"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let o = Command::new(bin).args(["eval", "--m", "1", "--x", "0"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}
