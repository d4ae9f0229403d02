use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn objgrid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_objgrid")).args(args).output().unwrap()
}

fn objgrid_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_objgrid"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn gen_is_reproducible_and_matches_committed_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let conf = fixture("jedit-like.conf");
    for out in [&a, &b] {
        assert!(objgrid(&["gen", conf.to_str().unwrap(), out.to_str().unwrap()]).status.success());
    }
    let first = fs::read(&a).unwrap();
    assert_eq!(first, fs::read(&b).unwrap());
    assert_eq!(first, fs::read(fixture("jedit-like.csv")).unwrap());
}

#[test]
fn gen_single_event() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("one.conf");
    fs::write(&conf, "event_count = 1\nthread = main 1 0\nclass = java.util.Vector 1\n").unwrap();
    let text = stdout(&objgrid(&["gen", conf.to_str().unwrap(), "-"]));
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().nth(1).unwrap().starts_with("1,main,1970-01-01T00:00,"));
}

#[test]
fn gen_rejects_bad_config() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("bad.conf");
    fs::write(&conf, "event_count = 5\nthread = main 0 1\nclass = A 1\n").unwrap();
    let out = objgrid(&["gen", conf.to_str().unwrap(), "-"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("create weight"));
    assert_eq!(objgrid(&["gen", "/nonexistent.conf", "-"]).status.code(), Some(2));
}

#[test]
fn render_ten_objects() {
    let log = fixture("ten-objects.csv");
    let svg = stdout(&objgrid(&["render", log.to_str().unwrap(), "-", "--width", "100", "--height", "100"]));
    assert_eq!(svg.matches("<rect ").count(), 10);
    assert_eq!(svg.matches("width=\"25\" height=\"25\"").count(), 10);
    assert!(svg.contains("<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"100\" height=\"75\">"));
}

#[test]
fn render_matches_library() {
    let path = fixture("three-objects.csv");
    let svg = stdout(&objgrid(&["render", path.to_str().unwrap(), "-", "--sort", "type", "--width", "100", "--height", "100"]));
    let log = objgrid_core::parse_csv(&fs::read_to_string(&path).unwrap(), "t").unwrap();
    let viewport = objgrid_core::Viewport::new(100, 100).unwrap();
    assert_eq!(svg, objgrid_cli::render(&log, objgrid_core::SortKey::Type, viewport));
}

#[test]
fn render_empty_log() {
    let svg = stdout(&objgrid_stdin(&["render", "-", "-"], "Status,thread,datetime,objectName,Type,Class,Method,linenum\n"));
    assert!(svg.contains("width=\"1024\" height=\"0\""));
    assert!(!svg.contains("<rect"));
}

#[test]
fn render_errors_exit_2() {
    let log = fixture("ten-objects.csv");
    let out = objgrid(&["render", log.to_str().unwrap(), "-", "--sort", "colour"]);
    assert_eq!(out.status.code(), Some(2));
    let out = objgrid(&["render", log.to_str().unwrap(), "-", "--width", "0"]);
    assert_eq!(out.status.code(), Some(2));

    let out = objgrid_stdin(&["render", "-", "-"], "1,main,1970-01-01T00:00,x,A,C,,1\n9,main,1970-01-01T00:00,x,A,C,,1\n");
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2") && err.contains("unknown status 9"), "{err}");
}

#[test]
fn stats_tables() {
    let jedit = fixture("jedit-like.csv");
    let text = stdout(&objgrid(&["stats", jedit.to_str().unwrap(), "--threads"]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0].split_whitespace().collect::<Vec<_>>(), ["thread", "created", "destroyed"]);
    let t0 = lines.iter().find(|l| l.starts_with("Thread-0")).unwrap();
    assert_eq!(t0.split_whitespace().nth(1), Some("0"));

    let three = fixture("three-objects.csv");
    let text = stdout(&objgrid(&["stats", three.to_str().unwrap(), "--by", "type", "--top", "1"]));
    assert_eq!(text.lines().nth(1).unwrap().split_whitespace().collect::<Vec<_>>(), ["A", "2"]);

    let empty = stdout(&objgrid_stdin(&["stats", "-"], ""));
    assert_eq!(empty, "class  created\n");

    assert_eq!(objgrid(&["stats", three.to_str().unwrap(), "--by", "none"]).status.code(), Some(2));
    assert_eq!(objgrid(&["stats", three.to_str().unwrap(), "--top", "0"]).status.code(), Some(2));
}
