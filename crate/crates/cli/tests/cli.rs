use std::path::Path;
use std::process::{Command, Output};

fn qpar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpar")).args(args).env_remove("QPAR_CACHE_DIR").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn build(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(format!("{name}.fn"));
    let path_s = path.to_str().unwrap().to_string();
    let mut full = vec!["fn", "build"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", &path_s]);
    let o = qpar(&full);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    path_s
}

#[test]
fn fn_build_writes_descriptors() {
    let o = qpar(&["fn", "build", "and-or", "--blocks", "2", "--block-size", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("arity 4\nkind and-or\n"));

    let dir = tempfile::tempdir().unwrap();
    let ptr = build(dir.path(), "ptr", &["pointer", "--n", "4", "--k", "2"]);
    let show = stdout(&qpar(&["fn", "show", &ptr]));
    assert!(show.contains("arity 8\n") && show.contains("blocks 4 x 2 bits"), "{show}");

    // The table form describes the same function.
    let tab = build(dir.path(), "ptr-table", &["pointer", "--n", "4", "--k", "2", "--table"]);
    let text = std::fs::read_to_string(&tab).unwrap();
    assert!(text.starts_with("arity 8\nkind table\n"));
    let a = qpar::boolfn::Descriptor::parse(&std::fs::read_to_string(&ptr).unwrap()).unwrap().build().unwrap();
    let b = qpar::boolfn::Descriptor::parse(&text).unwrap().build().unwrap();
    assert!(a.same_as(&b).unwrap());
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(qpar(&["fn", "build", "no-such-generator"]).status.code(), Some(2));
    assert_eq!(qpar(&["fn", "build", "and", "--n", "x"]).status.code(), Some(2));
    assert_eq!(qpar(&["verify", "no-such-suite"]).status.code(), Some(2));
    assert_eq!(qpar(&["verify", "grover", "--nope", "1"]).status.code(), Some(2));
    assert_eq!(qpar(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn measure_rows() {
    let dir = tempfile::tempdir().unwrap();
    let and4 = build(dir.path(), "and4", &["and", "--n", "4"]);
    let constant = build(dir.path(), "zero", &["const", "--n", "3", "--value", "0"]);
    let par3 = build(dir.path(), "parity3", &["parity", "--n", "3"]);
    let big = build(dir.path(), "or20", &["or", "--n", "20"]);
    let o = qpar(&["measure", &and4, &constant, &par3, &big]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let rows: Vec<Vec<&str>> = text.lines().map(|l| l.split(',').collect()).collect();
    assert_eq!(rows[0], ["name", "arity", "C0", "C1", "C", "bs", "lambda"]);
    let num = |s: &str| s.parse::<f64>().unwrap();
    assert_eq!(&rows[1][..6], ["and4", "4", "1", "4", "4", "4"]);
    assert!((num(rows[1][6]) - 2.0).abs() < 1e-9);
    assert_eq!(&rows[2][..6], ["zero", "3", "0", "0", "0", "0"]);
    assert_eq!(num(rows[2][6]), 0.0);
    assert_eq!(&rows[3][4..6], ["3", "3"]);
    assert!((num(rows[3][6]) - 3.0).abs() < 1e-9);
    // Beyond the exhaustive caps the cell is flagged rather than failing.
    assert_eq!(rows[4][1], "20");
    assert!(rows[4][2..].contains(&"TooLarge"), "{text}");
}

#[test]
fn dtree_and_adversary_commands() {
    let dir = tempfile::tempdir().unwrap();
    let ptr = build(dir.path(), "ptr", &["pointer", "--n", "4", "--k", "2"]);
    let o = qpar(&["dtree", "solve", "--fn", &ptr, "--p", "2", "--granularity", "block"]);
    assert_eq!(stdout(&o), "p,granularity,rounds\n2,block,2\n");

    let and4 = build(dir.path(), "and4", &["and", "--n", "4"]);
    let dump = dir.path().join("gamma.csv");
    let o = qpar(&["adv", "ratio", "--fn", &and4, "--p", "1", "--dump", dump.to_str().unwrap()]);
    let first = stdout(&o).lines().next().unwrap().to_string();
    let ratio: f64 = first.strip_prefix("witness lower bound ").unwrap().parse().unwrap();
    assert!((ratio - 2.0).abs() < 1e-9);
    let csv = std::fs::read_to_string(&dump).unwrap();
    assert_eq!(csv.lines().count(), 1 + 4);

    let o = qpar(&["adv", "barrier", "--fn", &and4, "--p", "2"]);
    assert!(stdout(&o).contains(&format!("barrier {}", 2f64.sqrt())));
}

#[test]
fn sim_quantum_distribution_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.jsonl");
    let o = qpar(&[
        "sim", "quantum", "--program", "grover", "--n", "8", "--p", "2", "--rounds", "1", "--input", "00000100", "--trace",
        trace.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    // Block 1 holds positions 4..8 and finds the marked position 5 (its
    // candidate 1, register bits "10") with certainty; block 0 stays uniform.
    let mass = |reg1: &str| -> f64 {
        text.lines().skip(1).map(|l| l.split(',').collect::<Vec<_>>()).filter(|r| &r[1][2..] == reg1).map(|r| r[2].parse::<f64>().unwrap()).sum()
    };
    assert!((mass("10") - 1.0).abs() < 1e-9, "{text}");
    assert!(std::fs::read_to_string(&trace).unwrap().lines().count() > 0);

    assert_eq!(qpar(&["sim", "quantum", "--program", "dj", "--n", "4", "--input", "01"]).status.code(), Some(2));
}

#[test]
fn verify_reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let o = qpar(&["verify", "grover", "--N", "16", "--p", "4"]);
    assert!(o.status.success());
    let lines = stdout(&o);
    assert!(lines.lines().all(|l| l.contains("\"pass\":true")));
    assert!(String::from_utf8_lossy(&o.stderr).contains("grover"));
    assert_eq!(qpar(&["verify", "grover", "--N", "16", "--p", "4"]).stdout, o.stdout);

    let o = qpar(&["verify", "pointer-bounds", "--N", "4", "--k", "2", "--p", "2"]);
    assert!(o.status.success());
    let rec: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(rec["measured"], 2.0);

    // Seeds enter through the global flag, before or after the grid.
    let a = qpar(&["--seed", "7", "verify", "forrelation", "--n", "2", "--instances", "3"]);
    let b = qpar(&["verify", "forrelation", "--n", "2", "--instances", "3", "--seed", "7"]);
    let c = qpar(&["verify", "forrelation", "--n", "2", "--instances", "3"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);

    // Cached runs replay the same bytes.
    let cache = dir.path().join("cache");
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_qpar"))
            .args(["verify", "grover", "--N", "8", "--p", "2"])
            .env("QPAR_CACHE_DIR", &cache)
            .output()
            .unwrap()
    };
    let (first, second) = (run(), run());
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(std::fs::read_dir(&cache).unwrap().count(), 1);

    let plot = dir.path().join("plot.csv");
    let out = dir.path().join("out.jsonl");
    let o = qpar(&["verify", "grover", "--N", "8", "--p", "2", "--out", out.to_str().unwrap(), "--csv-for-plot", plot.to_str().unwrap()]);
    assert!(o.status.success() && o.stdout.is_empty());
    assert!(std::fs::read_to_string(&plot).unwrap().starts_with("suite,case,quantity,value\n"));

    let merged = qpar(&["report", "merge", out.to_str().unwrap(), out.to_str().unwrap()]);
    assert!(merged.status.success());
    assert_eq!(merged.stdout, std::fs::read(&out).unwrap());
}

#[test]
fn failing_records_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.jsonl");
    std::fs::write(
        &bad,
        "{\"suite\":\"grover\",\"case\":{\"N\":1},\"bound\":1.0,\"measured\":0.0,\"lower\":1.0,\"upper\":1.0,\"tolerance\":0.0,\"pass\":false}\n",
    )
    .unwrap();
    let o = qpar(&["report", "merge", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("FAIL"));
}
