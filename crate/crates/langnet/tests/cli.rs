//! End-to-end checks of the `langnet` binary: exit codes, file outputs,
//! and byte-level reproducibility.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn langnet(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_langnet"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("failed to spawn langnet")
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

#[test]
fn simulate_writes_artifacts_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "simulate", "--n", "100", "--k", "4", "--f", "3", "--q", "2",
        "--strategy", "local-uniform", "--seed", "7", "--out", "run",
    ];
    let out = langnet(&args, dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let read = |name: &str| fs::read_to_string(dir.path().join("run").join(name)).unwrap();
    let first: Vec<String> = ["manifest.txt", "edges.txt", "states.csv", "metrics.csv"]
        .iter()
        .map(|f| read(f))
        .collect();
    assert!(first[0].contains("seed=7"));
    assert!(first[0].contains("stop_reason="));
    assert!(first[3].starts_with("n,m,components"));

    // rerun into a second directory: byte-identical artifacts
    let mut args2 = args;
    args2[args.len() - 1] = "run2";
    assert!(langnet(&args2, dir.path()).status.success());
    for (i, name) in ["manifest.txt", "edges.txt", "states.csv", "metrics.csv"]
        .iter()
        .enumerate()
    {
        let second = fs::read_to_string(dir.path().join("run2").join(name)).unwrap();
        assert_eq!(first[i], second, "{name} differs between identical runs");
    }
}

#[test]
fn simulate_usage_errors_exit_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = langnet(
        &[
            "simulate", "--n", "100", "--q", "0", "--strategy", "local-uniform",
            "--seed", "1", "--out", "bad",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("bad").exists());

    // missing --seed is also a usage error
    let out = langnet(
        &["simulate", "--n", "100", "--q", "2", "--strategy", "local-uniform"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_static_lattice_needs_square_n() {
    let dir = tempfile::tempdir().unwrap();
    let out = langnet(
        &[
            "simulate", "--n", "99", "--q", "2", "--strategy", "static-lattice",
            "--seed", "1", "--out", "x",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let out = langnet(
        &[
            "simulate", "--n", "100", "--q", "2", "--strategy", "static-lattice",
            "--seed", "1", "--out", "x",
        ],
        dir.path(),
    );
    assert!(out.status.success());
}

#[test]
fn sweep_deterministic_row_counts() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("plan.txt"),
        "n = 20,30\nq = 2,5\nf = 3\nk = 4\nstrategy = local-uniform\nrealizations = 2\nseed_base = 9\nmax_steps = 200000\n",
    )
    .unwrap();
    let args = ["sweep", "--plan", "plan.txt", "--workers", "2", "--out", "out"];
    let out = langnet(&args, dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let reals = fs::read_to_string(dir.path().join("out/realizations.csv")).unwrap();
    // 2 n x 2 q x 1 strategy x 2 realizations + header
    assert_eq!(reals.lines().count(), 9);
    let agg = fs::read_to_string(dir.path().join("out/aggregate.csv")).unwrap();
    assert!(agg.starts_with("n,q,f,avg_degree,strategy,observable,mean,stderr,r"));

    let mut args2 = args;
    args2[args.len() - 1] = "out2";
    assert!(langnet(&args2, dir.path()).status.success());
    assert_eq!(
        reals,
        fs::read_to_string(dir.path().join("out2/realizations.csv")).unwrap()
    );
}

#[test]
fn sweep_unreadable_plan_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = langnet(&["sweep", "--plan", "missing.txt", "--out", "out"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn metrics_on_dumps() {
    let dir = tempfile::tempdir().unwrap();
    // triangle with uniform states: 1 domain, C = 1
    fs::write(dir.path().join("edges.txt"), "0 1\n0 2\n1 2\n").unwrap();
    fs::write(
        dir.path().join("states.csv"),
        "node,trait1\n0,1\n1,1\n2,1\n",
    )
    .unwrap();
    let out = langnet(
        &["metrics", "--edges", "edges.txt", "--states", "states.csv"],
        dir.path(),
    );
    assert!(out.status.success());
    let row = String::from_utf8_lossy(&out.stdout);
    assert_eq!(row.trim(), "3,3,1,3,1,3,1,1,1,none,0");
}

#[test]
fn metrics_inconsistent_dumps_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("edges.txt"), "0 5\n").unwrap();
    fs::write(dir.path().join("states.csv"), "node,trait1\n0,1\n1,1\n").unwrap();
    let out = langnet(
        &["metrics", "--edges", "edges.txt", "--states", "states.csv"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn empirical_fixture_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    let out = langnet(
        &[
            "empirical", "--input", &fixture("countries.csv"),
            "--bin-width", "10000000", "--out-prefix", "emp",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let bins = fs::read_to_string(dir.path().join("emp_bins.csv")).unwrap();
    assert_eq!(bins, fs::read_to_string(fixture("golden_bins.csv")).unwrap());
    let scatter = fs::read_to_string(dir.path().join("emp_scatter.csv")).unwrap();
    assert_eq!(
        scatter,
        fs::read_to_string(fixture("golden_scatter.csv")).unwrap()
    );
}

#[test]
fn empirical_empty_exclude_file_keeps_everything() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("none.txt"), "").unwrap();
    let out = langnet(
        &[
            "empirical", "--input", &fixture("countries.csv"),
            "--exclude-file", "none.txt", "--out-prefix", "all",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let scatter = fs::read_to_string(dir.path().join("all_scatter.csv")).unwrap();
    assert_eq!(scatter.lines().count(), 19); // header + all 18 rows
}

#[test]
fn empirical_missing_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = langnet(&["empirical", "--input", "nope.csv"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn empirical_bad_rows_exit_1_with_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("bad.csv"),
        "country,population,languages\nFiji,900000,10\nNowhere,0,5\n",
    )
    .unwrap();
    let out = langnet(&["empirical", "--input", "bad.csv"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}
