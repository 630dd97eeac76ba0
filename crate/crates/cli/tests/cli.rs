use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn storyboard(args: &[&dyn AsRef<std::ffi::OsStr>]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_storyboard"));
    for a in args {
        cmd.arg(a);
    }
    cmd.env("RUST_LOG", "error")
        .output()
        .expect("spawn storyboard")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn extract_atg_writes_json_file() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("atg.json");
    stdout(&storyboard(&[
        &"extract-atg",
        &fixtures().join("demo"),
        &"-o",
        &path,
    ]));
    let atg: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(atg["app_id"], "org.example.bookshelf");
    assert_eq!(atg["edges"].as_array().unwrap().len(), 14);
}

#[test]
fn render_respects_screen_size() {
    let tmp = tempfile::tempdir().unwrap();
    stdout(&storyboard(&[
        &"render",
        &fixtures().join("login/static"),
        &"-o",
        &tmp.path(),
        &"--screen",
        &"320x480",
    ]));
    let svg = fs::read_to_string(tmp.path().join("pages/LoginActivity.svg")).unwrap();
    assert!(
        svg.contains(r#"width="640" height="960""#),
        "{}",
        &svg[..200.min(svg.len())]
    );
}

#[test]
fn bad_arguments_fail_cleanly() {
    let out = storyboard(&[
        &"render",
        &fixtures().join("login/static"),
        &"-o",
        &"x",
        &"--screen",
        &"0x10",
    ]);
    assert!(!out.status.success());
    let out = storyboard(&[
        &"build",
        &fixtures().join("demo"),
        &"-o",
        &"x",
        &"--dummy-rows",
        &"0",
    ]);
    assert!(!out.status.success());
    let out = storyboard(&[&"extract-atg", &fixtures().join("does-not-exist")]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("loading bundle"));
}

#[test]
fn infer_names_reports_each_activity() {
    let text = stdout(&storyboard(&[
        &"infer-names",
        &fixtures().join("demo"),
        &"--corpus",
        &fixtures().join("corpus/demo.jsonl"),
        &"--threshold",
        &"5",
    ]));
    let results: Vec<Value> = serde_json::from_str(&text).unwrap();
    assert_eq!(results.len(), 11);
    let a = results.iter().find(|r| r["original_name"] == "a").unwrap();
    assert_eq!(a["inferred_name"], "AboutActivity");
    assert_eq!(a["matched_by"], "keyword");
}

#[test]
fn build_corpus_collects_named_activities() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("corpus.jsonl");
    let gt = fixtures().join("ground_truth");
    stdout(&storyboard(&[
        &"build-corpus",
        &gt.join("app01"),
        &gt.join("app02"),
        &"-o",
        &out,
    ]));
    let lines: Vec<Value> = fs::read_to_string(&out)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert!(!lines.is_empty());
    let apps: std::collections::BTreeSet<&str> = lines
        .iter()
        .map(|l| l["app_id"].as_str().unwrap())
        .collect();
    assert_eq!(apps.len(), 2);
    assert!(lines
        .iter()
        .all(|l| l["tree"].as_str().unwrap().starts_with(char::is_alphabetic)));
}

fn write_pgm(path: &Path, w: u32, h: u32, value: u8) {
    let mut bytes = format!("P5\n{w} {h}\n255\n").into_bytes();
    bytes.extend(std::iter::repeat_n(value, (w * h) as usize));
    fs::write(path, bytes).unwrap();
}

#[test]
fn eval_similarity_files_and_directories() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    fs::create_dir_all(&a).unwrap();
    fs::create_dir_all(&b).unwrap();
    write_pgm(&a.join("x.pgm"), 2, 2, 0);
    write_pgm(&b.join("x.pgm"), 2, 2, 255);
    write_pgm(&a.join("y.pgm"), 2, 2, 10);
    write_pgm(&b.join("y.pgm"), 2, 2, 10);

    let line = stdout(&storyboard(&[
        &"eval-similarity",
        &a.join("x.pgm"),
        &b.join("x.pgm"),
    ]));
    assert_eq!(
        line.trim(),
        "mae=255.0000 mse=65025.0000 similarity=0.0000%"
    );

    let text = stdout(&storyboard(&[&"eval-similarity", &a, &b]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(
        lines[2],
        "mean mae=127.5000 mse=32512.5000 similarity=50.0000%"
    );

    write_pgm(&b.join("x.pgm"), 3, 2, 0);
    let out = storyboard(&[&"eval-similarity", &a.join("x.pgm"), &b.join("x.pgm")]);
    assert!(!out.status.success());
}
