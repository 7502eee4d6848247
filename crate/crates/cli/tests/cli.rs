use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use lkt_cli::doc::{normalize_whitespace, parse, parse_located, Document};
use lkt_core::random::{random_proof, RandomConfig};
use lkt_core::Family;
use proptest::prelude::*;

fn lkt(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_lkt"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("run lkt");
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn ok(args: &[&str], stdin: &str) -> String {
    let out = lkt(args, stdin);
    assert!(
        out.status.success(),
        "lkt {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn fixtures() -> Vec<(String, String)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let mut out: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "lkt"))
        .map(|p| (p.display().to_string(), std::fs::read_to_string(&p).unwrap()))
        .collect();
    out.sort();
    out
}

#[test]
fn fixtures_round_trip_and_check() {
    let all = fixtures();
    assert!(all.len() >= 5);
    for (name, src) in all {
        let parsed = parse_located(&src).unwrap_or_else(|e| panic!("{name}: {e}"));
        parsed.check().unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(
            normalize_whitespace(&parsed.doc.to_string()),
            normalize_whitespace(&src),
            "{name}"
        );
    }
}

#[test]
fn gen_output_round_trips() {
    for fam in Family::ALL {
        for n in 0..=6 {
            let text = ok(&["gen", fam.name(), &n.to_string()], "");
            let doc = parse(&text).unwrap();
            assert_eq!(doc, Document::from_generated(&fam.generate(n)));
            assert_eq!(doc.to_string(), text);
        }
    }
}

#[test]
fn gen_then_check() {
    let text = ok(&["gen", "linear", "5"], "");
    assert!(ok(&["check"], &text).starts_with("ok"));
    for seed in ["1", "2", "3"] {
        let text = ok(&["gen", "random", "5", "--seed", seed], "");
        assert!(ok(&["check"], &text).starts_with("ok"));
    }
}

#[test]
fn qfree_normal_form_has_valid_herbrand_sequent() {
    let text = ok(&["gen", "linear_cut", "4"], "");
    let normal = ok(&["normalize", "--policy", "until-qfree"], &text);
    let report = ok(&["herbrand"], &normal);
    assert_eq!(report.lines().last(), Some("valid"));
}

#[test]
fn herbrand_rejects_quantified_cuts() {
    let text = ok(&["gen", "linear_cut", "2"], "");
    let out = lkt(&["herbrand"], &text);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error\tfailed\t"));
}

#[test]
fn induction_elimination_and_atomization_keep_typing() {
    let text = ok(&["gen", "add_defs", "3"], "");
    let unfolded = ok(&["indelim"], &text);
    assert!(!unfolded.contains("(Ind "));
    ok(&["check"], &unfolded);
    let normal = ok(&["normalize"], &unfolded);
    ok(&["check"], &normal);
    let atomized = ok(&["atomize"], &text);
    ok(&["check"], &atomized);
}

#[test]
fn tree_engine_prints_a_cut_free_tree() {
    let text = ok(&["gen", "linear_cut", "2"], "");
    let tree = ok(&["normalize", "--engine", "tree"], &text);
    assert!(tree.lines().count() > 3);
    assert!(!tree.lines().any(|l| l.trim_start().starts_with("cut ")));
}

#[test]
fn budget_exhaustion_is_an_error() {
    let text = ok(&["gen", "linear_cut", "6"], "");
    let out = lkt(&["normalize", "--budget", "3"], &text);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error\tbudget\t"));
}

#[test]
fn zero_hypothesis_is_a_located_parse_error() {
    let out = lkt(&["check"], "(const R o)\n(hyp -1 R)\n(proof (Ax -1 0))\n");
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert_eq!(err.lines().count(), 1);
    assert!(err.starts_with("error\tparse\t3:15: hypothesis 0"), "{err}");
}

#[test]
fn type_errors_are_located() {
    let out = lkt(&["check"], "(const R o)\n(const S o)\n(hyp -1 R)\n(hyp 1 S)\n(proof (Ax -1 1))\n");
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error\ttype\t5:8: "));
}

#[test]
fn bench_writes_one_row_per_cell() {
    let dir = tempdir();
    let path = dir.join("bench.csv");
    let path_s = path.to_str().unwrap();
    ok(
        &[
            "bench", "--families", "linear_cut", "--n", "0..8", "--engines", "lkt-full,tree", "--warmup", "0",
            "--runs", "1", "--out", path_s,
        ],
        "",
    );
    let csv = std::fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("family,n,engine,wall_nanos,input_size,output_size,cut_count_out,status")
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 18);
    for r in &rows {
        assert_eq!(r.len(), 8);
        assert_eq!(r[0], "linear_cut");
        assert!(["lkt-full", "tree"].contains(&r[2]));
        assert_eq!(r[7], "ok");
        assert!(r[3].parse::<u128>().unwrap() > 0);
        assert_eq!(r[6], "0");
    }
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn bench_reports_errors_and_budget_per_row() {
    let csv = ok(
        &[
            "bench", "--families", "add_defs,linear_cut", "--n", "6", "--engines", "tree,lkt-full", "--warmup", "0",
            "--runs", "1", "--budget", "4",
        ],
        "",
    );
    let statuses: Vec<&str> = csv.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
    assert_eq!(statuses, ["error", "budget", "budget", "budget"]);
}

#[test]
fn diff_agrees_on_small_inputs() {
    let report = ok(&["diff", "--n", "0..3"], "");
    assert_eq!(report.lines().count(), 20);
    assert!(report.lines().all(|l| l.ends_with(" ok")));
}

#[test]
fn unknown_family_is_a_usage_error() {
    let out = lkt(&["gen", "nope", "1"], "");
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error\tusage\t"));
}

fn tempdir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("lkt-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_documents_round_trip(seed in any::<u64>(), depth in 0usize..=6) {
        let g = random_proof(seed, RandomConfig { depth, ..RandomConfig::default() });
        let d = Document::from_generated(&g);
        let text = d.to_string();
        let back = parse(&text).unwrap();
        prop_assert_eq!(&back, &d);
        prop_assert_eq!(back.to_string(), text);
    }
}
