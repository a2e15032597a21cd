use std::path::Path;
use std::process::{Command, Output};

use fatrange::harness::bench::CSV_HEADER;
use fatrange::harness::Dataset;

fn fatrange(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fatrange")).args(args).output().unwrap()
}

fn gen(dir: &Path, name: &str, extra: &[&str]) -> String {
    let path = dir.join(name).to_str().unwrap().to_owned();
    let mut args = vec!["gen", "--out", &path];
    args.extend_from_slice(extra);
    let out = fatrange(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    path
}

#[test]
fn gen_is_deterministic_and_loadable() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--kind", "boxes3", "--n", "50", "--u", "1024", "--seed", "7", "--alpha", "3/2"];
    let a = gen(dir.path(), "a.txt", &args);
    let b = gen(dir.path(), "b.txt", &args);
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert!(text.starts_with("fatrange-v1 boxes3 50 1024\n"));
    assert_eq!(Dataset::load(&a).unwrap().len(), 50);
}

#[test]
fn verify_passes_on_each_structure() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let cases = [
        (["--kind", "points2", "--n", "2000"], ["--kind", "rects2", "--n", "300"]),
        (["--kind", "points3", "--n", "2000"], ["--kind", "boxes3", "--n", "300"]),
        (["--kind", "boxes3", "--n", "300"], ["--kind", "points3", "--n", "300"]),
    ];
    for (i, (data, queries)) in cases.iter().enumerate() {
        let common = ["--u", "4096", "--alpha", "2", "--max-side", "400", "--seed"];
        let seed = i.to_string();
        let data_args: Vec<&str> = data.iter().chain(&common).copied().chain([seed.as_str()]).collect();
        let query_args: Vec<&str> = queries.iter().chain(&common).copied().chain(["99"]).collect();
        let p = gen(d, &format!("d{i}.txt"), &data_args);
        let q = gen(d, &format!("q{i}.txt"), &query_args);
        let out = fatrange(&["verify", &p, "--queries", &q]);
        let stdout = String::from_utf8_lossy(&out.stdout);
        assert_eq!(out.status.code(), Some(0), "{stdout}");
        assert!(stdout.contains("PASS: 300 queries"));
        assert!(fatrange(&["build", &p]).status.success());
    }
}

#[test]
fn bench_writes_header_rows_and_median() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let p = gen(d, "p.txt", &["--kind", "points3", "--n", "500", "--u", "512"]);
    let q = gen(d, "q.txt", &["--kind", "boxes3", "--n", "20", "--u", "512", "--alpha", "2"]);
    let csv = d.join("out.csv");
    let out = fatrange(&["bench", &p, "--queries", &q, "--out", csv.to_str().unwrap(), "--reps", "2"]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 22);
    assert!(lines[21].starts_with("median,"));

    let empty = gen(d, "e.txt", &["--kind", "boxes3", "--n", "0", "--u", "512"]);
    let out = fatrange(&["bench", &p, "--queries", &empty]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout), format!("{CSV_HEADER}\n"));
}

#[test]
fn usage_and_input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(fatrange(&[]).status.code(), Some(2));
    assert_eq!(fatrange(&["gen", "--kind", "points5", "--n", "1", "--u", "8", "--out", "x"]).status.code(), Some(2));
    assert_eq!(
        fatrange(&["gen", "--kind", "points2", "--n", "1", "--u", "10", "--out", d.join("x").to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    let bad = d.join("bad.txt");
    std::fs::write(&bad, "fatrange-v1 points2 2 8\n1 2\n9 9\n").unwrap();
    let p = gen(d, "p.txt", &["--kind", "points2", "--n", "10", "--u", "8"]);
    let out = fatrange(&["verify", bad.to_str().unwrap(), "--queries", &p]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
    // Boxes thinner than the requested bound are an input error.
    let thin = d.join("thin.txt");
    std::fs::write(&thin, "fatrange-v1 boxes3 1 64\n0 63 0 0 0 0\n").unwrap();
    let probes = gen(d, "pr.txt", &["--kind", "points3", "--n", "5", "--u", "64"]);
    assert_eq!(fatrange(&["verify", thin.to_str().unwrap(), "--queries", &probes]).status.code(), Some(2));
}

#[test]
fn selftest_passes() {
    let out = fatrange(&["selftest"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(String::from_utf8_lossy(&out.stdout).matches("PASS").count(), 3);
}

#[test]
fn bound_breach_exits_1_and_names_query_and_rectangles() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let p = gen(d, "p.txt", &["--kind", "points2", "--n", "3000", "--u", "4096"]);
    let q = gen(d, "q.txt", &["--kind", "rects2", "--n", "100", "--u", "4096", "--seed", "5"]);
    let out = fatrange(&["verify", &p, "--queries", &q, "--c-dec", "0"]);
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.lines().any(|l| l.starts_with("bound: query ") && l.contains("rects [")), "{stdout}");
    assert!(stdout.contains(", 0 mismatches,"));
}
