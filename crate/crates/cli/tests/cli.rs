use std::path::{Path, PathBuf};
use std::process::Command;

use fermenc::document::EncodingDocument;
use fermenc::encoding::validate;
use fermenc::fixtures;
use fermenc::EncodingCandidate;
use tempfile::TempDir;

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> Out {
    let (mut o, mut e) = (Vec::new(), Vec::new());
    let code = fermenc_cli::run(std::iter::once("fermenc").chain(args.iter().copied()), &mut o, &mut e);
    Out {
        code,
        stdout: String::from_utf8(o).unwrap(),
        stderr: String::from_utf8(e).unwrap(),
    }
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn write_doc(dir: &TempDir, name: &str, enc: &EncodingCandidate) -> PathBuf {
    write(dir, name, &EncodingDocument::from_encoding(enc, None, None).to_json_pretty())
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.is_empty()).collect()
}

const TOY: &str = "qubits_per_cell = 1\nscheme = two-grids\nedge_set = chain\n\
                   max_vertex_weight = 2\nmax_edge_or_hopping_weight = 2\n";

#[test]
fn toy_search_emits_valid_encodings() {
    let dir = TempDir::new().unwrap();
    let conf = write(&dir, "toy.conf", TOY);
    let out = dir.path().join("front.jsonl");
    let r = run(&["search", s(&conf), "--output", s(&out)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let text = std::fs::read_to_string(&out).unwrap();
    let docs = lines(&text);
    assert!(!docs.is_empty());
    for d in docs {
        let doc = EncodingDocument::from_json(d).unwrap();
        assert!(doc.import().is_ok());
        assert!(doc.metrics.is_some());
        assert_eq!(doc.provenance.unwrap().source.as_deref(), Some("search"));
    }
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("front.jsonl.report.json")).unwrap()).unwrap();
    assert_eq!(report["truncated"], false);
}

#[test]
fn node_budget_truncates_with_exit_2() {
    let dir = TempDir::new().unwrap();
    let conf = write(&dir, "b.conf", &format!("{TOY}node_budget = 1\n"));
    let out = dir.path().join("front.jsonl");
    let r = run(&["search", s(&conf), "--output", s(&out)]);
    assert_eq!(r.code, 2, "{}", r.stderr);
    let report = std::fs::read_to_string(dir.path().join("front.jsonl.report.json")).unwrap();
    assert!(report.contains("\"truncated\":true"), "{report}");
}

#[test]
fn bad_config_is_line_anchored() {
    let dir = TempDir::new().unwrap();
    let conf = write(&dir, "p.conf", &format!("{TOY}acceptance_probability = 1.5\n"));
    let r = run(&["search", s(&conf)]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("p.conf:6"), "{}", r.stderr);

    let conf = write(&dir, "u.conf", &format!("{TOY}max_vertex_wieght = 3\n"));
    let r = run(&["search", s(&conf)]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("u.conf:6") && r.stderr.contains("unknown key"), "{}", r.stderr);

    let r = run(&["search", "/nonexistent/x.conf"]);
    assert_eq!(r.code, 1);
    assert_eq!(run(&["frobnicate"]).code, 1);
    assert_eq!(run(&["--help"]).code, 0);
}

#[test]
fn deform_with_zero_length_returns_base() {
    let dir = TempDir::new().unwrap();
    let base = fixtures::distance_two_square();
    write_doc(&dir, "base.json", &base);
    let conf = write(&dir, "d.conf", "base = base.json\nmax_sequence_length = 0\nrng_seed = 3\n");
    let r = run(&["deform", s(&conf)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let docs = lines(&r.stdout);
    assert_eq!(docs.len(), 1);
    let enc = EncodingDocument::from_json(docs[0]).unwrap().import().unwrap();
    assert_eq!(enc.generators(), base.generators());
}

#[test]
fn deform_rejects_invalid_base_and_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let mut doc = EncodingDocument::from_encoding(&fixtures::jordan_wigner_chain(), None, None);
    doc.generators.insert("right/0".into(), vec!["cell(0,0):0:X".into()]);
    write(&dir, "bad.json", &doc.to_json_pretty());
    let conf = write(&dir, "bad.conf", "base = bad.json\n");
    let r = run(&["deform", s(&conf)]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("failed validation") && r.stderr.contains("required 1"), "{}", r.stderr);

    write_doc(&dir, "base.json", &fixtures::distance_two_square());
    let conf = write(&dir, "ok.conf", "base = base.json\nmax_sequence_length = 2\nrng_seed = 11\n");
    let a = run(&["deform", s(&conf)]);
    let b = run(&["deform", s(&conf)]);
    assert_eq!(a.code, 0, "{}", a.stderr);
    assert_eq!(a.stdout, b.stdout);
    assert!(lines(&a.stdout).len() > 1);
}

#[test]
fn distance_of_fixtures() {
    let dir = TempDir::new().unwrap();
    let jw = write_doc(&dir, "jw.json", &fixtures::jordan_wigner_chain());
    let d2 = write_doc(&dir, "d2.json", &fixtures::distance_two_square());
    assert_eq!(run(&["distance", s(&jw)]).stdout.trim(), "Exact 1");
    assert_eq!(run(&["distance", s(&d2)]).stdout.trim(), "Exact 2");
    assert_eq!(run(&["distance", s(&d2), "--w-max", "1"]).stdout.trim(), "LowerBound 2");

    let r = run(&["distance", s(&d2), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(r.stdout.trim()).unwrap();
    assert_eq!(v["distance"], 2);
    assert_eq!(v["exact"], true);

    let mut doc = EncodingDocument::from_encoding(&fixtures::jordan_wigner_chain(), None, None);
    doc.generators.insert("vertex/0".into(), vec!["cell(0,0):0:X".into()]);
    let bad = write(&dir, "bad.json", &doc.to_json_pretty());
    assert_eq!(run(&["distance", s(&bad)]).code, 1);
}

#[test]
fn metrics_of_jordan_wigner() {
    let dir = TempDir::new().unwrap();
    let jw = write_doc(&dir, "jw.json", &fixtures::jordan_wigner_chain());
    let r = run(&["metrics", s(&jw), "--format", "json"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v: serde_json::Value = serde_json::from_str(r.stdout.trim()).unwrap();
    assert_eq!(v["metrics"]["qubit_ratio"], 1.0);
    assert_eq!(v["metrics"]["max_stab_weight"], 0);

    let r = run(&["metrics", s(&jw), "--format", "csv"]);
    let rows = lines(&r.stdout);
    assert_eq!(rows[0], "distance,max_stab_weight,sigma_nn,sigma_nnn,qubit_ratio,max_degree,thickness_ub");
    assert_eq!(rows.len(), 2);

    assert_eq!(run(&["metrics", s(&jw), "--hamiltonian", "1,2"]).code, 1);
}

#[test]
fn export_three_entry_front() {
    let dir = TempDir::new().unwrap();
    let front: String = [
        fixtures::jordan_wigner_chain(),
        fixtures::edge_qubit_square(),
        fixtures::distance_two_square(),
    ]
    .iter()
    .map(|e| EncodingDocument::from_encoding(e, None, None).to_json_line() + "\n")
    .collect();
    let p = write(&dir, "front.jsonl", &front);
    let r = run(&["export", s(&p), "--csv"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rows = lines(&r.stdout);
    assert_eq!(rows.len(), 4);
    assert!(rows[0].starts_with("distance,"));
    assert!(rows[1..].iter().all(|r| r.split(',').count() == 7));
}

#[test]
fn graph_has_one_ancilla_per_cell() {
    let dir = TempDir::new().unwrap();
    let enc = fixtures::edge_qubit_square();
    assert!(validate(&enc).is_ok());
    let p = write_doc(&dir, "sq.json", &enc);
    let r = run(&["graph", s(&p), "--patch", "2"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.starts_with("graph connectivity {"));
    let copies = if enc.layout().scheme().duplicates_spin() { 2 } else { 1 };
    let ancillas = r.stdout.lines().filter(|l| l.contains("[shape=box]")).count();
    assert_eq!(ancillas, 4 * copies);
}

#[test]
fn round_trip_through_files() {
    let dir = TempDir::new().unwrap();
    let conf = write(&dir, "toy.conf", TOY);
    let out = dir.path().join("front.jsonl");
    assert_eq!(run(&["search", s(&conf), "--output", s(&out)]).code, 0);
    let text = std::fs::read_to_string(&out).unwrap();
    for line in lines(&text) {
        let doc = EncodingDocument::from_json(line).unwrap();
        let enc = doc.import().unwrap();
        let again = EncodingDocument::from_encoding(&enc, None, doc.provenance.clone());
        assert_eq!(again.generators, doc.generators);
        assert_eq!(again.layout, doc.layout);
    }
}

#[test]
fn binary_exit_codes() {
    let dir = TempDir::new().unwrap();
    let conf = write(&dir, "b.conf", &format!("{TOY}node_budget = 1\n"));
    let bin = env!("CARGO_BIN_EXE_fermenc");
    let st = Command::new(bin).args(["search", s(&conf), "--output"]).arg(dir.path().join("o.jsonl")).status().unwrap();
    assert_eq!(st.code(), Some(2));
    let st = Command::new(bin).arg("nope").output().unwrap();
    assert_eq!(st.status.code(), Some(1));
}
