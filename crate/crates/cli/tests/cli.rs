use std::path::Path;
use std::process::{Command, Output};

fn mdl(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mdl"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn gen(dir: &Path, file: &str, family: &[&str]) {
    let mut args = vec!["gen"];
    args.extend_from_slice(family);
    args.extend_from_slice(&["-o", file]);
    assert!(mdl(dir, &args).status.success());
}

#[test]
fn tau_of_pg32() {
    let d = tempfile::tempdir().unwrap();
    gen(d.path(), "pg32.mtd", &["pg", "4", "2"]);
    let o = mdl(d.path(), &["tau", "pg32.mtd", "--a", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("tau=5\n"), "{text}");
    assert_eq!(text.matches("  set ").count(), 5);
}

#[test]
fn weighted_tau_of_u24() {
    let d = tempfile::tempdir().unwrap();
    gen(d.path(), "u24.mtd", &["uniform", "2", "4"]);
    let o = mdl(d.path(), &["tauw", "u24.mtd", "--d", "5"]);
    assert!(stdout(&o).contains("tauw=20\n"));
    let o = mdl(d.path(), &["tauw", "u24.mtd", "--d", "2"]);
    assert!(stdout(&o).contains("tauw=4\n"));
}

#[test]
fn stack_find_then_verify() {
    let d = tempfile::tempdir().unwrap();
    gen(d.path(), "pg34.mtd", &["pg", "4", "4"]);
    let o = mdl(d.path(), &["stack", "find", "pg34.mtd", "--q", "3", "--h", "2", "--t", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("height=2"));
    let cert: String = text
        .lines()
        .skip_while(|l| !l.starts_with("certificate:"))
        .skip(1)
        .map(|l| format!("{}\n", l.trim()))
        .collect();
    std::fs::write(d.path().join("c.stack"), cert).unwrap();
    let o = mdl(
        d.path(),
        &["stack", "verify", "pg34.mtd", "--q", "3", "--t", "2", "--h", "2", "--parts", "@c.stack"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("valid=true"));
}

#[test]
fn stack_verify_rejects_binary_layers() {
    let d = tempfile::tempdir().unwrap();
    gen(d.path(), "fano.mtd", &["fano"]);
    let o = mdl(d.path(), &["stack", "verify", "fano.mtd", "--q", "2", "--t", "3", "--parts", "0,1,2,3,4,5,6"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("valid=false"));
    let o = mdl(d.path(), &["stack", "find", "fano.mtd", "--q", "2", "--h", "1", "--t", "3"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_suite_all_pass() {
    let d = tempfile::tempdir().unwrap();
    let o = mdl(d.path(), &["verify", "lem10", "--trials", "50", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("summary=\"50/50 pass\""), "{text}");
    assert_eq!(text.matches("verdict=pass").count(), 50);
    let idx: Vec<usize> = text
        .lines()
        .filter_map(|l| l.strip_prefix("trial index="))
        .map(|l| l.split_whitespace().next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(idx, (0..50).collect::<Vec<_>>());
}

#[test]
fn verify_is_deterministic() {
    let d = tempfile::tempdir().unwrap();
    let a = stdout(&mdl(d.path(), &["verify", "thm4", "--trials", "10", "--seed", "4"]));
    let b = stdout(&mdl(d.path(), &["verify", "cover-bound", "--trials", "10", "--seed", "4"]));
    assert_eq!(a, b);
}

#[test]
fn json_mirror() {
    let d = tempfile::tempdir().unwrap();
    gen(d.path(), "fano.mtd", &["fano"]);
    let o = mdl(d.path(), &["--json", "rep", "fano.mtd", "--q", "2"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["representable"], true);
    assert_eq!(v["matrix"].as_array().unwrap().len(), 3);
    let text = stdout(&mdl(d.path(), &["rep", "fano.mtd", "--q", "2"]));
    assert!(text.starts_with("q=2\nrepresentable=true\nmatrix:\n"));
}

#[test]
fn exit_codes() {
    let d = tempfile::tempdir().unwrap();
    gen(d.path(), "u24.mtd", &["uniform", "2", "4"]);
    assert_eq!(mdl(d.path(), &["rep", "u24.mtd", "--q", "2"]).status.code(), Some(1));
    assert_eq!(mdl(d.path(), &["rep", "u24.mtd", "--q", "3"]).status.code(), Some(0));
    assert_eq!(mdl(d.path(), &["rep", "missing.mtd", "--q", "3"]).status.code(), Some(2));
    assert_eq!(mdl(d.path(), &["verify", "nosuch"]).status.code(), Some(2));
    assert_eq!(mdl(d.path(), &["tau"]).status.code(), Some(2));
    std::fs::write(d.path().join("bad.mtd"), "matroid x\nkind linear\nfield 6\nrank 1\ncol 1\nend\n").unwrap();
    let o = mdl(d.path(), &["tau", "bad.mtd", "--a", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));
}

#[test]
fn connectivity_and_roundness() {
    let d = tempfile::tempdir().unwrap();
    gen(d.path(), "s.mtd", &["direct_sum", "uniform:2:3", "uniform:2:3"]);
    let text = stdout(&mdl(d.path(), &["conn", "s.mtd", "--x", "0,1", "--y", "3,4"]));
    assert!(text.contains("conn=0\nskew=true"));
    let o = mdl(d.path(), &["round", "s.mtd"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("weakly_round=false"));
    let o = mdl(d.path(), &["round", "s.mtd", "--extract", "--a", "1", "--q", "2", "--alpha", "3/8"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("weakly_round=true"));
}

#[test]
fn constructive_cover_bound() {
    let d = tempfile::tempdir().unwrap();
    gen(d.path(), "pg.mtd", &["pg", "3", "3"]);
    let o = mdl(d.path(), &["cover", "thm4", "pg.mtd", "--a", "1", "--b", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("size=13\n") && text.contains("bound=16\n"), "{text}");
}

#[test]
fn pg_recognition_and_corpus() {
    let d = tempfile::tempdir().unwrap();
    assert!(mdl(d.path(), &["corpus", "corp", "--seed", "2", "--random", "3"]).status.success());
    let manifest = std::fs::read_to_string(d.path().join("corp/manifest.tsv")).unwrap();
    assert_eq!(manifest.lines().count(), 14);
    assert_eq!(mdl(d.path(), &["pg", "corp/pg23.mtd", "--n", "3", "--q", "3"]).status.code(), Some(0));
    assert_eq!(mdl(d.path(), &["pg", "corp/fano.mtd", "--n", "3", "--q", "3"]).status.code(), Some(1));
}
