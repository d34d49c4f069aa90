mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use lisf::input::DEFAULT_CHAPTER_RULE;
use lisf_core::analysis::{Analysis, AnalysisConfig};
use lisf_core::corpus::{Document, DocumentOptions};
use tempfile::TempDir;

fn lisf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lisf")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn small_novel(dir: &Path) -> String {
    write(dir, "novel.txt", &common::synthetic_novel(3, 12, 1500))
}

fn stoplist(dir: &Path) -> String {
    write(dir, "stop.txt", &common::STOP_WORDS.join("\n"))
}

#[test]
fn empty_file_gives_header_only() {
    let dir = TempDir::new().unwrap();
    let empty = write(dir.path(), "empty.txt", "");
    let out = lisf(&["topics", &empty]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "pattern\tcount\trecurrences\tdelta\tbound\tverdict\n");
}

#[test]
fn missing_file_is_an_io_error() {
    let out = lisf(&["topics", "/nonexistent/book.txt"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/book.txt"));
    assert!(out.stdout.is_empty());
}

#[test]
fn usage_and_configuration_errors() {
    let dir = TempDir::new().unwrap();
    let novel = small_novel(dir.path());
    assert_eq!(lisf(&["topics"]).status.code(), Some(2));
    assert_eq!(lisf(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(lisf(&["--alpha-star", "0.2", "topics", &novel]).status.code(), Some(4));
    assert_eq!(lisf(&["--chapter-rule", "heading:(", "topics", &novel]).status.code(), Some(4));
    let bad = write(dir.path(), "bad.conf", "top_n = 10\nthis line is wrong\n");
    let out = lisf(&["--config", &bad, "topics", &novel]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.conf:2"));
    let out = lisf(&["cliques", &novel, "notaword"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn topics_sorted_by_count_and_deterministic() {
    let dir = TempDir::new().unwrap();
    let novel = small_novel(dir.path());
    let stop = stoplist(dir.path());
    let a = lisf(&["--stoplist", &stop, "topics", &novel]);
    let b = lisf(&["--stoplist", &stop, "topics", &novel]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let counts: Vec<usize> = text.lines().skip(1).map(|l| l.split('\t').nth(1).unwrap().parse().unwrap()).collect();
    assert!(counts.windows(2).all(|w| w[0] >= w[1]));
    assert!(text.contains("\ttopical"));
    assert!(!text.lines().any(|l| l.starts_with("the\t")));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = TempDir::new().unwrap();
    let novel = small_novel(dir.path());
    let conf = write(dir.path(), "run.conf", "top_n = 5\nmin_count = 3\n");
    let out = lisf(&["--config", &conf, "--top-n", "7", "analyze", &novel]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["states"], 7);
}

#[test]
fn analyze_writes_matrix_and_spectrum() {
    let dir = TempDir::new().unwrap();
    let novel = small_novel(dir.path());
    let m = dir.path().join("m.tsv");
    let s = dir.path().join("s.tsv");
    let out = lisf(&["--top-n", "20", "analyze", &novel, "--matrix", m.to_str().unwrap(), "--spectrum", s.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let matrix = fs::read_to_string(&m).unwrap();
    assert_eq!(matrix.lines().count(), 21);
    for row in matrix.lines().skip(1) {
        let sum: f64 = row.split('\t').skip(2).map(|x| x.parse::<f64>().unwrap()).sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }
    let spectrum = fs::read_to_string(&s).unwrap();
    let top: Vec<f64> = spectrum.lines().nth(1).unwrap().split('\t').map(|x| x.parse().unwrap()).collect();
    assert!((top[2] - 1.0).abs() < 1e-10);
}

#[test]
fn self_translation_through_the_binary() {
    let dir = TempDir::new().unwrap();
    let novel = small_novel(dir.path());
    let stop = stoplist(dir.path());
    let out = lisf(&["--stoplist", &stop, "translate", &novel, &novel]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.lines().count() > 1);
    for row in text.lines().skip(1) {
        let f: Vec<&str> = row.split('\t').collect();
        assert_eq!((f[0], f[2], f[3]), (f[1], "1", "true"));
    }
}

#[test]
fn chapter_mismatch_is_reported() {
    let dir = TempDir::new().unwrap();
    let a = write(dir.path(), "a.txt", &common::synthetic_novel(3, 6, 800));
    let b = write(dir.path(), "b.txt", &common::synthetic_novel(3, 5, 800));
    let out = lisf(&["translate", &a, &b]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("chapter"));
}

#[test]
fn toy_question_set_ranks_gold_first() {
    let dir = TempDir::new().unwrap();
    let text = common::synthetic_novel(5, 12, 1500);
    let doc_path = write(dir.path(), "d1.txt", &text);
    let spec = lisf::input::ChapterSpec::parse(DEFAULT_CHAPTER_RULE).unwrap();
    let options = DocumentOptions {
        stop_set: lisf::input::english_stoplist(),
        ..DocumentOptions::default()
    };
    let doc = Document::from_text(&text, &options, &spec.rule());
    let a = Analysis::new(&doc, AnalysisConfig::default()).unwrap();
    let pool = a.candidate_pool();
    let (w1, w2) = (a.label(pool[0]), a.label(pool[1]));
    let qa = format!(
        "q1\tWhat is {w1}?\td1\tNothing here at all.\t0\n\
         q1\tWhat is {w1}?\td1\tIt is the {w1} again.\t1\n\
         q2\tHow many {w2}?\td1\tThe {w2} was seen.\t1\n\
         q2\tHow many {w2}?\td1\tNobody knows.\t0\n\
         q3\tWhy?\td1\tNo positive here.\t0\n"
    );
    let questions = write(dir.path(), "qa.tsv", &qa);
    let out = lisf(&["answer", &questions, &doc_path]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["lisf"]["map"], 1.0);
    assert_eq!(v["lisf"]["mrr"], 1.0);
    assert_eq!(v["lisf"]["evaluated"], 2);
    assert_eq!(v["skipped"], serde_json::json!(["q3"]));
    assert!(String::from_utf8_lossy(&out.stderr).contains("q3"));

    let star = lisf(&["answer", "--lisf-star", &questions, &doc_path]);
    let v: serde_json::Value = serde_json::from_slice(&star.stdout).unwrap();
    assert_eq!(v["evaluated"], 1);
}

#[test]
fn simulate_is_seeded() {
    let a = lisf(&["--seed", "5", "simulate", "--trials", "500"]);
    let b = lisf(&["--seed", "5", "simulate", "--trials", "500"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(v["hr_identity_max_defect"].as_f64().unwrap() < 1e-10);
    assert!(v["min_tail_quadratic_form"].as_f64().unwrap() >= -1e-10);
    assert_eq!(v["mgf"].as_array().unwrap().len(), 6);
    assert_eq!(lisf(&["simulate", "--trials", "1"]).status.code(), Some(4));
}
