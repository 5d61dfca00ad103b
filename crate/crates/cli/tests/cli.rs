use std::fs;
use std::path::{Path, PathBuf};
use std::process::Output;

use tempfile::TempDir;

mod common;
use common::{j_sequence, run, small_new_oracle, SMALL_NEW};

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

#[test]
fn find_poly_prints_a_primitive_polynomial() {
    let out = run(&["find-poly", "--p", "3", "--r", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let first = text.lines().next().unwrap();
    // Exhaustive oracle: the monic quadratics over GF(3) whose root has
    // order 8 are x^2+x+2 and x^2+2x+2; the first in lexicographic tail
    // order is x^2+x+2.
    assert_eq!(first, "x^2+x+2");
    assert!(text.contains("prime_factors = 2"));
    assert!(text.contains("witness q=2: x^4 mod f = 2"));
    assert!(text.contains("condition_g = true"));

    let out = run(&["find-poly", "--p", "11", "--r", "2"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("prime_factors = 2 3 5"));
}

#[test]
fn find_poly_rejects_composite_p() {
    let out = run(&["find-poly", "--p", "4", "--r", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("p must be prime"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["find-poly", "--p", "3"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn verify_builtin_table() {
    let out = run(&["verify-table"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 18);
    assert!(text.contains("PASS p=3 r=2 m=4..9 x^2-x-1"));
    assert!(text.contains("PASS p=7 r=2 m=8..49 x^2+6x+3"));
    assert!(text.contains("PASS p=47 r=2 m=48..2209 x^2+14x+10"));
}

#[test]
fn verify_user_table_reports_failures() {
    let dir = TempDir::new().unwrap();
    let path = write(
        &dir,
        "table.csv",
        "m_min,m_max,p,r,poly\n4,9,3,2,x^2-x-1\n4,9,3,2,x^2+1\n",
    );
    let out = run(&["verify-table", "--path", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("PASS p=3 r=2 m=4..9 x^2-x-1"));
    assert!(text.contains("FAIL p=3 r=2 m=4..9 x^2+1 (condition_g)"));
}

#[test]
fn small_new_pattern_matches_oracle_and_golden_file() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "new.conf", SMALL_NEW);
    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    for out in [&out_a, &out_b] {
        let status = run(&[
            "pattern",
            "--spec",
            spec.to_str().unwrap(),
            "--frames",
            "9",
            "--out",
            out.to_str().unwrap(),
        ])
        .status;
        assert!(status.success());
    }
    let a = fs::read_to_string(&out_a).unwrap();
    assert_eq!(a.lines().count(), 1 + 162);
    assert_eq!(a, small_new_oracle(9));
    assert_eq!(fs::read(&out_a).unwrap(), fs::read(&out_b).unwrap());
    assert_eq!(
        a,
        fs::read_to_string(golden_dir().join("new_6x3.csv")).unwrap()
    );
    // resource 3 starts at (1, 0)
    assert_eq!(j_sequence(&a, 3), vec![0, 1, 0, 1, 1, 2, 0, 2, 2]);
}

#[test]
fn pattern_zero_frames_is_header_only() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "new.conf", SMALL_NEW);
    let out = run(&["pattern", "--spec", spec.to_str().unwrap(), "--frames", "0"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "s,t,i,j\n");
}

#[test]
fn qc_pattern_sequence() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "qc.conf", "kind = qc\nm = 4\nn = 5\nk = 0\n");
    let out = run(&["pattern", "--spec", spec.to_str().unwrap(), "--frames", "5"]);
    assert!(out.status.success());
    // (i0, j0) = (2, 1) is resource 11: j = 1 + 2t mod 5
    assert_eq!(j_sequence(&stdout(&out), 11), vec![1, 3, 0, 2, 4]);
}

#[test]
fn pattern_rejects_bad_config() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "bad.conf", "kind = qc\nm = 4\nn = 5\nwidth = 3\n");
    let out = run(&["pattern", "--spec", spec.to_str().unwrap(), "--frames", "5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown key `width`"));

    let spec = write(&dir, "bad2.conf", "kind = new\nm = 6\nn = 3\nf = x^2+1\n");
    let out = run(&["pattern", "--spec", spec.to_str().unwrap(), "--frames", "5"]);
    assert_eq!(out.status.code(), Some(1));
}

fn metrics_of(spec_text: &str, extra: &[&str]) -> String {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "p.conf", spec_text);
    let report = dir.path().join("report.txt");
    let mut args = vec![
        "metrics",
        "--spec",
        spec.to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    let out = run(&args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    fs::read_to_string(report).unwrap()
}

#[test]
fn metrics_for_44x11() {
    let qc = metrics_of("kind = qc\nm = 44\nn = 11\n", &[]);
    assert!(qc.contains("column_period = 11\n"), "{qc}");

    let new = metrics_of("kind = new\nm = 44\nn = 11\nf = x^2+3x+6\n", &[]);
    assert!(new.contains("column_period = 121\n"), "{new}");
    assert!(new.contains("max_collision_ratio = 1/11\n"));
    assert!(new.contains("max_collision_ratio_mode = exact\n"));
    assert!(new.contains("max_continual_collision = 2\n"));
    assert!(new.contains("local_good = true\n"));
}

#[test]
fn metrics_for_qc_examples() {
    let r = metrics_of("kind = qc\nm = 10\nn = 3\n", &[]);
    assert!(r.contains("max_collision_ratio = 1/1\n"), "{r}");
    assert!(r.contains("max_continual_collision = inf\n"));
    assert!(r.contains("local_good = false\n"));

    let r = metrics_of(
        "kind = random\nm = 4\nn = 5\nseed = 3\n",
        &["--t-cap", "200", "--t-b", "2000"],
    );
    assert!(r.contains("column_period = cap:200\n"), "{r}");
    assert!(r.contains("max_collision_ratio_mode = empirical\n"));
    assert!(r.contains("max_collision_horizon = 2000\n"));
}

#[test]
fn metrics_rejects_zero_horizon() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "qc.conf", "kind = qc\nm = 4\nn = 5\n");
    let out = run(&["metrics", "--spec", spec.to_str().unwrap(), "--t-b", "0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn simulate_writes_both_csvs_deterministically() {
    let dir = TempDir::new().unwrap();
    let config = write(
        &dir,
        "sim.conf",
        "m = 10\nn = 5\npattern.kind = qc\ncells = 3\ngrid_cols = 3\nues_per_cell = 10\nframes = 12\nseed = 9\n",
    );
    let mut outputs = Vec::new();
    for name in ["a", "b"] {
        let out_dir = dir.path().join(name);
        let out = run(&[
            "simulate",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(stdout(&out).contains("ues = 30"));
        let curves = fs::read_to_string(out_dir.join("curves.csv")).unwrap();
        let dist = fs::read_to_string(out_dir.join("distribution.csv")).unwrap();
        outputs.push((curves, dist));
    }
    assert_eq!(outputs[0], outputs[1]);
    let (curves, dist) = &outputs[0];
    assert!(curves.starts_with("frame,new_pairs,cum_mean_discovered\n"));
    assert_eq!(curves.lines().count(), 13);
    assert!(dist.starts_with("ue,discovered\n"));
    assert_eq!(dist.lines().count(), 31);

    let rows = d2d_hopping::csv_io::read_curves(curves.as_bytes()).unwrap();
    let mut again = Vec::new();
    d2d_hopping::csv_io::write_curves(&mut again, &rows).unwrap();
    assert_eq!(curves.as_bytes(), again.as_slice());
}

#[test]
fn simulate_rejects_overfull_frame() {
    let dir = TempDir::new().unwrap();
    let config = write(&dir, "sim.conf", "m = 4\nn = 5\npattern.kind = qc\n");
    let out = run(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}
