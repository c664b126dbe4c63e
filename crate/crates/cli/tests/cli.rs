use std::fs;
use std::path::Path;

use serde_json::Value;
use ztrop::puiseux::int;
use ztrop::{newton_polygon, PuiseuxScalar, ResidueField, UCoeff, UMonomial, UPoly};
use ztrop_cli::svg::newton_svg;

const THREE_VAR: &str = "# three variables\nring x1 x2 x3\npoly t*x1^2 + x1 + 1\npoly t*x1*x2^2 + x1*x2 + 1\npoly x1*x2*x3 + 1\n";
const TWO_VAR: &str = "ring x1 x2\npoly (x1 - 1 - t^2)*(x1 - 1 - t - t^2)\npoly x2 - (x1 - 1 - t)\n";

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run_stdin(input: &str, flags: &[&str]) -> Run {
    let mut args = vec!["ztrop"];
    args.extend_from_slice(flags);
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = ztrop_cli::run(args, &mut input.as_bytes(), &mut out, &mut err);
    Run { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

#[test]
fn three_variable_text_output() {
    let r = run_stdin(THREE_VAR, &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.stdout, "(0,0,0) (0,-1,1) (-1,1,0) (-1,-1,2)\n");
    assert!(r.stderr.is_empty());
}

#[test]
fn input_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("system.txt");
    fs::write(&path, THREE_VAR).unwrap();
    let r = run_stdin("", &["--input", path.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.stdout, "(0,0,0) (0,-1,1) (-1,1,0) (-1,-1,2)\n");
}

#[test]
fn two_variable_json_output() {
    let r = run_stdin(TWO_VAR, &["--pstep", "2", "--pmax", "2", "--format", "json"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.stdout, "{\"points\":[[\"0\",\"1\"],[\"0\",\"2\"]]}\n");
}

#[test]
fn rational_flags_are_exact() {
    let r = run_stdin("ring x1\npoly x1^2 - t\n", &["--pstep", "1/2", "--format", "json"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.stdout, "{\"points\":[[\"1/2\"]]}\n");
}

#[test]
fn tree_json_reports_counters_and_vertices() {
    let r = run_stdin(TWO_VAR, &["--pstep", "2", "--pmax", "2", "--format", "json", "--tree"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    let tree = &v["tree"];
    assert_eq!(tree["grow"], 3);
    assert_eq!(tree["reinforce"], 1);
    let vertices = tree["vertices"].as_array().unwrap();
    assert_eq!(vertices.len(), 5);
    assert_eq!(vertices[0]["parent"], Value::Null);
    assert_eq!(vertices[0]["root"], Value::Null);
    let roots: Vec<&str> = vertices.iter().filter_map(|v| v["root"].as_str()).collect();
    assert!(roots.contains(&"1 + t^2"));
    assert!(roots.contains(&"1 + t + t^2*u1"));
    for v in vertices {
        assert!(v["p"].is_string());
    }
}

#[test]
fn text_tree_lists_branches() {
    let r = run_stdin(TWO_VAR, &["--pstep", "2", "--pmax", "2", "--tree"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("x1 = 1 + t + t^2*u1  p=2"));
    assert!(r.stdout.ends_with("grow 3 reinforce 1\n"));
}

#[test]
fn non_splitting_exits_2_and_names_the_polynomial() {
    let r = run_stdin("ring x1\npoly x1^2 - 2\n", &[]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("f1"), "{}", r.stderr);
    assert!(r.stdout.is_empty());
}

#[test]
fn splitting_over_a_prime_field() {
    // 2 is a square mod 7
    let r = run_stdin("ring x1 residue fp:7\npoly x1^2 - 2\n", &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.stdout, "(0)\n");
}

#[test]
fn precision_limit_exits_3() {
    let r = run_stdin(TWO_VAR, &["--pstep", "1", "--pmax", "1"]);
    assert_eq!(r.code, 3, "{}", r.stderr);
    assert!(r.stderr.contains("f2"), "{}", r.stderr);
}

#[test]
fn input_errors_exit_4() {
    let cases = [
        ("ring x1\npoly x1 +\n", "line 2"),
        ("ring x1 x2\npoly x2 - 1\npoly x1\n", "triangular"),
        ("ring x1\npoly u1*x1\n", "u1"),
        ("poly x1\n", "line 1"),
    ];
    for (input, needle) in cases {
        let r = run_stdin(input, &[]);
        assert_eq!(r.code, 4, "{input:?}: {}", r.stderr);
        assert!(r.stderr.contains(needle), "{input:?}: {}", r.stderr);
    }
    let missing = run_stdin("", &["--input", "/definitely/not/here.txt"]);
    assert_eq!(missing.code, 4);
    assert_eq!(run_stdin(THREE_VAR, &["--bogus"]).code, 4);
    assert_eq!(run_stdin(THREE_VAR, &["--pstep", "x"]).code, 4);
}

#[test]
fn help_exits_0() {
    let r = run_stdin("", &["--help"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("--newton-svg"));
}

#[test]
fn other_mathematical_errors_exit_5() {
    let r = run_stdin(THREE_VAR, &["--pstep", "0"]);
    assert_eq!(r.code, 5, "{}", r.stderr);
}

#[test]
fn oracle_cross_check_agrees() {
    let r = run_stdin(TWO_VAR, &["--pstep", "2", "--pmax", "2", "--seed", "17"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.stdout, "(0,1) (0,2)\n");
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut entries: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    entries.sort();
    entries
}

#[test]
fn svg_output_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let flags = |dir: &Path| vec!["--pstep".to_string(), "2".into(), "--pmax".into(), "2".into(), "--newton-svg".into(), dir.display().to_string()];
    let fa = flags(a.path());
    let fb = flags(b.path());
    let ra = run_stdin(TWO_VAR, &fa.iter().map(String::as_str).collect::<Vec<_>>());
    let rb = run_stdin(TWO_VAR, &fb.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!((ra.code, rb.code), (0, 0));
    assert_eq!(ra.stdout, rb.stdout);
    let (da, db) = (read_dir_sorted(a.path()), read_dir_sorted(b.path()));
    assert_eq!(da, db);
    let names: Vec<&str> = da.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(
        names,
        [
            "0000_extension_v0.svg",
            "0001_extension_v1.svg",
            "0002_reinforcement_v1.svg",
            "0003_extension_v2.svg",
            "0004_extension_v3.svg",
            "polygons.json"
        ]
    );
    let index: Value = serde_json::from_slice(&da[5].1).unwrap();
    assert_eq!(index[0]["slopes"], serde_json::json!(["0"]));
    assert_eq!(index[2]["kind"], "reinforcement");
    for (name, body) in &da {
        if name.ends_with(".svg") {
            let text = std::str::from_utf8(body).unwrap();
            assert!(text.starts_with("<?xml") && text.trim_end().ends_with("</svg>"));
        }
    }
}

#[test]
fn svg_labels_of_a_shifted_polynomial() {
    // t^4 x^2 + (-2 t^4 u1 + t^2) x + t^4 u1^2 - t^2 u1
    let q = ResidueField::Rationals;
    let term = |c: i64, e: i64, a: u32| UCoeff::term(UMonomial::from_exponents(vec![a]), PuiseuxScalar::monomial(q.from_i64(c), int(e)));
    let f = UPoly::from_coeffs(
        1,
        [(2, term(1, 4, 0)), (1, &term(-2, 4, 1) + &term(1, 2, 0)), (0, &term(1, 4, 2) + &term(-1, 2, 1))],
    );
    let svg = newton_svg(&f, &newton_polygon(&f).unwrap(), "shifted").unwrap();
    let labels: Vec<&str> = svg
        .lines()
        .filter(|l| l.contains("font-size=\"13\" text-anchor=\"middle\">"))
        .map(|l| l.rsplit_once("\">").unwrap().1.trim_end_matches("</text>"))
        .collect();
    assert_eq!(labels, ["-u1", "1", "1"]);
    assert_eq!(svg.matches("stroke-width=\"3\"").count(), 2);
}
