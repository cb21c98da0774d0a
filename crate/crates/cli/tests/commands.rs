use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn tspcn(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tspcn"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn generate(dir: &Path, n: usize, seed: u64, file: &str) {
    let n = n.to_string();
    let seed = seed.to_string();
    let out = tspcn(
        &[
            "generate",
            "--n",
            &n,
            "--box",
            "0,0,100,100",
            "--radius",
            "2,6",
            "--seed",
            &seed,
            "--out",
            file,
        ],
        dir,
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}

#[test]
fn generate_writes_a_valid_instance() {
    let dir = TempDir::new().unwrap();
    generate(dir.path(), 12, 1, "a.json");
    let inst = tspcn::load_instance(dir.path().join("a.json")).unwrap();
    assert_eq!(inst.len(), 12);
    for c in &inst.circles {
        assert!((0.0..=100.0).contains(&c.center_x) && (0.0..=100.0).contains(&c.center_y));
        assert!((2.0..=6.0).contains(&c.radius));
    }
}

#[test]
fn generate_is_deterministic() {
    let dir = TempDir::new().unwrap();
    generate(dir.path(), 9, 4, "a.json");
    generate(dir.path(), 9, 4, "b.json");
    assert_eq!(
        fs::read(dir.path().join("a.json")).unwrap(),
        fs::read(dir.path().join("b.json")).unwrap()
    );
}

#[test]
fn usage_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&tspcn(&["generate", "--n", "1"], dir.path())), 2);
    assert_eq!(
        code(&tspcn(
            &["generate", "--n", "5", "--box", "0,0,1"],
            dir.path()
        )),
        2
    );
    assert_eq!(code(&tspcn(&["solve"], dir.path())), 2);
    assert_eq!(
        code(&tspcn(
            &["solve", "x.json", "--method", "simplex"],
            dir.path()
        )),
        2
    );
}

#[test]
fn infeasible_generation_exits_1() {
    let dir = TempDir::new().unwrap();
    let out = tspcn(
        &[
            "generate",
            "--n",
            "50",
            "--box",
            "0,0,1,1",
            "--min-gap",
            "10",
            "--out",
            "a.json",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("error"));
}

#[test]
fn solve_then_validate() {
    let dir = TempDir::new().unwrap();
    generate(dir.path(), 8, 2, "a.json");
    let out = tspcn(
        &[
            "solve",
            "a.json",
            "--method",
            "exact-dp",
            "--k",
            "4",
            "--sector",
            "full-disk",
            "--out",
            "sol.json",
            "--plot",
            "p.svg",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let out = tspcn(&["validate", "a.json", "sol.json"], dir.path());
    assert_eq!(code(&out), 0);
    let report = String::from_utf8_lossy(&out.stdout);
    assert!(report.contains("PASS overall"));
    let svg = fs::read_to_string(dir.path().join("p.svg")).unwrap();
    assert!(svg.starts_with("<?xml") && svg.trim_end().ends_with("</svg>"));
}

#[test]
fn heuristic_solve_is_reproducible() {
    let dir = TempDir::new().unwrap();
    generate(dir.path(), 25, 3, "a.json");
    for f in ["s1.json", "s2.json"] {
        let out = tspcn(
            &[
                "solve",
                "a.json",
                "--method",
                "heuristic",
                "--seed",
                "5",
                "--out",
                f,
            ],
            dir.path(),
        );
        assert_eq!(code(&out), 0, "{}", stderr(&out));
    }
    assert_eq!(
        fs::read(dir.path().join("s1.json")).unwrap(),
        fs::read(dir.path().join("s2.json")).unwrap()
    );
}

#[test]
fn exact_limit_is_enforced() {
    let dir = TempDir::new().unwrap();
    generate(dir.path(), 20, 1, "a.json");
    let out = tspcn(
        &[
            "solve",
            "a.json",
            "--method",
            "exact-dp",
            "--exact-limit",
            "16",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("16"), "{}", stderr(&out));
}

#[test]
fn unreadable_instance_exits_1() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&tspcn(&["solve", "missing.json"], dir.path())), 1);
    fs::write(dir.path().join("bad.json"), "{\"circles\": [").unwrap();
    assert_eq!(code(&tspcn(&["solve", "bad.json"], dir.path())), 1);
}

#[test]
fn time_limited_solve_exits_3_and_still_writes() {
    let dir = TempDir::new().unwrap();
    generate(dir.path(), 30, 7, "a.json");
    let out = tspcn(
        &[
            "solve",
            "a.json",
            "--method",
            "cutting-plane",
            "--time-limit",
            "0",
            "--out",
            "sol.json",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    assert_eq!(
        code(&tspcn(&["validate", "a.json", "sol.json"], dir.path())),
        0
    );
}

fn tamper(dir: &Path, edit: impl FnOnce(&mut serde_json::Value)) {
    let path = dir.join("sol.json");
    let mut v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    edit(&mut v);
    fs::write(&path, serde_json::to_string_pretty(&v).unwrap()).unwrap();
}

fn solved(n: usize) -> TempDir {
    let dir = TempDir::new().unwrap();
    generate(dir.path(), n, 11, "a.json");
    let out = tspcn(&["solve", "a.json", "--out", "sol.json"], dir.path());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    dir
}

#[test]
fn point_outside_disk_fails_validation() {
    let dir = solved(6);
    tamper(dir.path(), |v| {
        let x = v["points"][2][0].as_f64().unwrap();
        v["points"][2][0] = serde_json::json!(x + 50.0);
    });
    let out = tspcn(&["validate", "a.json", "sol.json"], dir.path());
    assert_eq!(code(&out), 4);
    let report = String::from_utf8_lossy(&out.stdout);
    assert!(report.contains("FAIL disk-membership"), "{report}");
    assert!(report.contains("circle 2"), "{report}");
}

#[test]
fn repeated_circle_fails_validation() {
    let dir = solved(6);
    tamper(dir.path(), |v| v["order"][3] = v["order"][1].clone());
    let out = tspcn(&["validate", "a.json", "sol.json"], dir.path());
    assert_eq!(code(&out), 4);
    let report = String::from_utf8_lossy(&out.stdout);
    assert!(report.contains("FAIL visit-once"), "{report}");
    assert!(report.contains("FAIL single-cycle"), "{report}");
}

#[test]
fn mismatched_sizes_exit_1() {
    let dir = solved(6);
    generate(dir.path(), 7, 1, "b.json");
    assert_eq!(
        code(&tspcn(&["validate", "b.json", "sol.json"], dir.path())),
        1
    );
}

#[test]
fn render_command_writes_svg() {
    let dir = solved(5);
    let out = tspcn(
        &["render", "a.json", "sol.json", "--out", "t.svg"],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let svg = fs::read_to_string(dir.path().join("t.svg")).unwrap();
    assert_eq!(svg.matches("<text").count(), 5);
}

fn bench_csv(args: &[&str]) -> Vec<csv::StringRecord> {
    let dir = TempDir::new().unwrap();
    let mut full = vec!["bench", "--csv"];
    full.extend_from_slice(args);
    let out = tspcn(&full, dir.path());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    let header = rdr.headers().unwrap().clone();
    assert_eq!(
        header.iter().collect::<Vec<_>>(),
        tspcn_cli::BENCH_HEADER.to_vec()
    );
    rdr.records().map(Result::unwrap).collect()
}

#[test]
fn bench_rows_have_nonnegative_gaps() {
    let rows = bench_csv(&["--sizes", "12", "--seeds", "3"]);
    assert_eq!(rows.len(), 3);
    for r in &rows {
        let gap: f64 = r[12].parse().unwrap();
        assert!(gap >= 0.0);
        assert_eq!(&r[2], "exact-dp");
    }
}

#[test]
fn bench_two_circle_gap_is_zero() {
    for r in bench_csv(&["--sizes", "2", "--seeds", "4"]) {
        assert_eq!(r[12].parse::<f64>().unwrap(), 0.0, "{r:?}");
    }
}

#[test]
fn bench_table_is_the_default() {
    let dir = TempDir::new().unwrap();
    let out = tspcn(&["bench", "--sizes", "3", "--seeds", "2"], dir.path());
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().next().unwrap().contains("lower_bound"));
}
