use std::process::{Command, Output};

use serde_json::Value;

fn divres(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_divres"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("bad JSON ({e}): {}", stdout(o)))
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn tau_human() {
    let o = divres(&["tau", "12"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("tau = 6"), "{text}");
    assert!(text.contains("tau- = 3, tau_c = 0, tau+ = 3"), "{text}");
}

#[test]
fn tau_one_is_degenerate() {
    let o = divres(&["tau", "1", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["tau"], 1);
    assert_eq!(v["analytic_degenerate"], true);
}

#[test]
fn tau_json_schema_is_stable() {
    let a = json(&divres(&["tau", "16", "--format", "json"]));
    assert_eq!(a["tau"], 5);
    assert_eq!(a["components"]["tau_center"], 2);
    let b = json(&divres(&["tau", "1", "--format", "json"]));
    let keys = |v: &Value| {
        let mut k: Vec<String> = v.as_object().unwrap().keys().cloned().collect();
        k.sort();
        k
    };
    assert_eq!(keys(&a), keys(&b));
    for key in [
        "epsilon_used",
        "retries",
        "evaluations",
        "wall_time_s",
        "formulas_agreed",
    ] {
        assert!(a.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn tau_csv() {
    let o = divres(&["tau", "12", "--format", "csv"]);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("s,tau,tau_minus,tau_center,tau_plus"));
    assert!(lines[1].starts_with("12,6,3,0,3,"));
}

#[test]
fn prime_exit_codes() {
    let o = divres(&["prime", "101"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("tau+ = 1"));
    assert!(stdout(&o).contains("residual"));

    let o = divres(&["prime", "100", "--format", "json"]);
    assert_eq!(code(&o), 3);
    let v = json(&o);
    assert_eq!(v["is_prime"], false);
    // divisors 1, 2, 4, 5 below 10 plus the double zero at 10
    assert_eq!(v["tau_plus"], 6);

    assert_eq!(code(&divres(&["prime", "2"])), 0);
    assert_eq!(code(&divres(&["prime", "1"])), 1);
}

#[test]
fn scan_range_matches_oracle() {
    let o = divres(&["scan", "1", "200", "--format", "json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["rows"].as_array().unwrap().len(), 200);
    assert_eq!(v["mismatches"], 0);
    assert_eq!(v["failures"], 0);
    let s: Vec<u64> = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["s"].as_u64().unwrap())
        .collect();
    assert_eq!(s, (1..=200).collect::<Vec<_>>());
}

#[test]
fn scan_edges() {
    let o = divres(&["scan", "2", "2", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().count(), 2);
    assert_eq!(code(&divres(&["scan", "5", "3"])), 1);
}

#[test]
fn scan_with_worker_pool() {
    let o = divres(&["scan", "20", "40", "--parallel", "2"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("21 values, 0 mismatches"));
    assert_eq!(code(&divres(&["scan", "1", "2", "--parallel", "0"])), 1);
}

#[test]
fn wide_epsilon_is_flagged() {
    // ε = 1/4 encloses non-real zeros of f_10; the retry at 1/8 still does,
    // so τ comes out wrong and only the oracle comparison notices
    let o = divres(&["tau", "10", "--epsilon", "0.25"]);
    assert!(
        stderr(&o).contains("non-real zeros may be counted"),
        "{}",
        stderr(&o)
    );
    let o = divres(&["scan", "10", "10", "--epsilon", "0.25"]);
    assert_eq!(code(&o), 4, "{}", stdout(&o));
    assert!(divres(&["tau", "10"]).stderr.is_empty());
}

#[test]
fn plot_f_zeros_at_divisors() {
    let o = divres(&["plot-f", "6", "--density", "100"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,abs_f"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let (x, y) = l.split_once(',').unwrap();
            (x.parse().unwrap(), y.parse().unwrap())
        })
        .collect();
    // density × length, ±1
    assert!((rows.len() as i64 - 500).abs() <= 1, "{}", rows.len());
    let zeros: Vec<f64> = rows.iter().filter(|r| r.1 < 1e-8).map(|r| r.0).collect();
    assert_eq!(zeros, vec![1.0, 2.0, 3.0, 6.0]);
}

#[test]
fn plot_f_single_point_and_warning() {
    let o = divres(&["plot-f", "6", "--from", "2", "--to", "2"]);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 2);
    let y: f64 = text
        .lines()
        .nth(1)
        .unwrap()
        .split_once(',')
        .unwrap()
        .1
        .parse()
        .unwrap();
    assert!(y < 1e-12);

    let o = divres(&["plot-f", "30", "--density", "2"]);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("undersamples"), "{}", stderr(&o));
    assert!(!divres(&["plot-f", "6"]).stderr.iter().any(|_| true));
}

#[test]
fn plot_f_svg_and_output_file() {
    let dir = std::env::temp_dir().join(format!("divres-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let csv = dir.join("f.csv");
    let svg = dir.join("f.svg");
    let o = divres(&[
        "plot-f",
        "12",
        "--output",
        csv.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    assert!(std::fs::read_to_string(&csv)
        .unwrap()
        .starts_with("x,abs_f\n"));
    let chart = std::fs::read_to_string(&svg).unwrap();
    assert!(chart.contains("<polyline"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn contours_geometry() {
    let v = json(&divres(&["contours", "9", "--epsilon", "0.25"]));
    let c = v["contours"].as_array().unwrap();
    let range = |i: usize| {
        (
            c[i]["x_range"][0].as_f64().unwrap(),
            c[i]["x_range"][1].as_f64().unwrap(),
        )
    };
    assert_eq!(range(0), (0.75, 2.75));
    assert_eq!(range(1), (2.75, 3.25));
    assert_eq!(range(2), (0.75, 3.25));
    assert!(c.iter().all(|k| k["orientation"] == "counterclockwise"));
    assert!(c
        .iter()
        .all(|k| k["y_range"][0] == -0.25 && k["y_range"][1] == 0.25));

    let v = json(&divres(&["contours", "1"]));
    assert_eq!(v["contours"][0]["degenerate"], true);

    let v = json(&divres(&["contours", "2"]));
    let c = &v["contours"][1];
    let mid = 0.5 * (c["x_range"][0].as_f64().unwrap() + c["x_range"][1].as_f64().unwrap());
    assert!((mid - 2f64.sqrt()).abs() < 1e-12);
}

#[test]
fn bench_tables() {
    let o = divres(&["bench", "10", "10"]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        stdout(&o)
            .lines()
            .filter(|l| l.trim_start().starts_with("10 "))
            .count(),
        1
    );

    let o = divres(&["bench", "--format", "csv", "10", "1000"]);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "s,tau,evaluations,wall_time_s,error");
    let evals: Vec<u64> = lines[1..]
        .iter()
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(evals.len(), 3);
    assert!(evals.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn usage_errors() {
    assert_eq!(code(&divres(&[])), 1);
    assert_eq!(code(&divres(&["frobnicate"])), 1);
    assert_eq!(code(&divres(&["tau", "abc"])), 1);
    assert_eq!(code(&divres(&["tau", "0"])), 1);
    assert_eq!(code(&divres(&["tau", "12", "--epsilon", "0.3"])), 1);
    assert_eq!(code(&divres(&["tau", "12", "--format", "xml"])), 1);
    assert_eq!(code(&divres(&["tau", "12", "--density", "10"])), 1);
    assert_eq!(code(&divres(&["--help"])), 0);
}
