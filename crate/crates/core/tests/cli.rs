use std::io::Write;
use std::process::{Command, Output, Stdio};

fn cutforest(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_cutforest"))
        .args(args)
        .env_remove("CUTFOREST_SEED")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

const SIX: &str = "x,y\n0,0\n1,0\n2,0\n10,0\n11,0\n12,0\n";

fn score_rows(text: &str) -> Vec<f64> {
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("point_id"))
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn weighted_scores_of_two_triples() {
    let out = stdout(&cutforest(&["score", "-", "--algorithm", "wrcf", "--iterations", "1000", "--seed", "3"], SIX));
    assert!(out.starts_with("# algorithm=wrcf\n# seed=3\n"));
    let s = score_rows(&out);
    assert_eq!(s.len(), 6);
    assert_eq!((s[1], s[4]), (1.0, 1.0));
    for end in [s[0], s[2], s[3], s[5]] {
        assert!((end - 1.5).abs() < 0.15, "{s:?}");
    }
}

#[test]
fn json_scores_carry_metadata() {
    let out = stdout(&cutforest(&["score", "-", "--algorithm", "if", "--iterations", "20", "--seed", "1", "--format", "json"], SIX));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["metadata"]["algorithm"], "if");
    assert_eq!(v["scores"].as_array().unwrap().len(), 6);
    assert_eq!(v["scores"][0]["point_id"], 1);
}

#[test]
fn density_report() {
    let out = stdout(&cutforest(&["density", "-"], SIX));
    let mut lines = out.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(lines.next(), Some("axis,epsilon,mu0,bad_set_measure"));
    assert_eq!(lines.next_back(), Some("all,,0.75,"));

    let grid: String = std::iter::once("v\n".to_string()).chain((0..50).map(|i| format!("{i}\n"))).collect();
    let out = stdout(&cutforest(&["density", "-", "--format", "json"], &grid));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["mu"], 0.02);

    let out = stdout(&cutforest(&["density", "-", "--format", "json"], "4,4\n"));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["mu"], 1.0);
}

#[test]
fn stream_scores_every_shingle() {
    let series: String = (0..40).map(|i| format!("{}\n", (i as f64 * 0.7).sin())).collect();
    let out = stdout(&cutforest(&["stream", "--shingle", "3", "--window", "10", "--forest-size", "5", "--seed", "2"], &series));
    let rows: Vec<&str> = out.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "t,codisp");
    assert_eq!(rows.len(), 1 + 38);
    assert!(rows[1].starts_with("1,"));
}

#[test]
fn bench_writes_metrics() {
    let out = stdout(&cutforest(&["bench", "ten-points", "--iterations", "5,10", "--seed", "4"], ""));
    assert!(out.lines().any(|l| l == "algorithm,seed,N,metric,value"));
}

#[test]
fn exit_codes() {
    assert_eq!(cutforest(&["score", "-", "--seed", "1"], "").status.code(), Some(2));
    assert_eq!(cutforest(&["score", "-", "--seed", "1"], "1,2\n3\n").status.code(), Some(2));
    assert_eq!(cutforest(&["score", "-", "--alpha", "1", "--algorithm", "wif", "--seed", "1"], SIX).status.code(), Some(3));
    assert_eq!(cutforest(&["score", "-", "--sample-size", "7", "--seed", "1"], SIX).status.code(), Some(3));
    assert_eq!(cutforest(&["stream", "--shingle", "5", "--seed", "1"], "1\n2\n3\n").status.code(), Some(3));
    assert_eq!(cutforest(&["stream", "--algorithm", "if", "--seed", "1"], "1\n2\n3\n").status.code(), Some(3));
    assert_eq!(cutforest(&["frobnicate"], "").status.code(), Some(3));
    assert_eq!(cutforest(&["score", "/nonexistent/file.csv"], "").status.code(), Some(2));
}

#[test]
fn seed_from_environment() {
    let run = |seed: &str| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_cutforest"));
        cmd.args(["score", "/dev/stdin", "--iterations", "5"]).env("CUTFOREST_SEED", seed);
        let mut child = cmd.stdin(Stdio::piped()).stdout(Stdio::piped()).spawn().unwrap();
        child.stdin.take().unwrap().write_all(SIX.as_bytes()).unwrap();
        String::from_utf8(child.wait_with_output().unwrap().stdout).unwrap()
    };
    let a = run("42");
    assert!(a.contains("# seed=42"));
    assert_eq!(a, run("42"));
}
