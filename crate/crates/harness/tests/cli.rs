//! End-to-end tests of the `greedy-kernel` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use greedy_kernel::oracle::fgreedy_point;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_greedy-kernel"))
}

fn run(args: &[&str], cwd: &Path) -> Output {
    bin()
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

const BB_CONFIG: &str = r#"
seed = 1

[kernel]
family = "brownian-bridge"

[target]
kind = "fp"
p = 1.0
normalized = false

[grids]
candidates = 5001
evals = 10001

[greedy]
beta = 1.0
max_points = 127
"#;

fn write_config(dir: &Path, name: &str, src: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, src).unwrap();
    path.to_string_lossy().into_owned()
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let k = header.iter().position(|h| *h == name).unwrap();
    lines
        .map(|l| l.split(',').nth(k).unwrap().to_string())
        .collect()
}

#[test]
fn run_writes_records_matching_dyadic_points() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bb.toml", BB_CONFIG);
    let out = run(&["run", &cfg, "--out", "res"], dir.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = fs::read_to_string(dir.path().join("res/records.csv")).unwrap();
    assert_eq!(
        csv.lines().next().unwrap(),
        "n,x,eta,linf_residual,max_power,native_residual,interp_norm,stop_reason"
    );
    assert_eq!(csv.lines().count(), 128);
    let xs: Vec<f64> = column(&csv, "x")
        .iter()
        .map(|v| v.parse().unwrap())
        .collect();
    for ell in 1..=7u32 {
        let (lo, hi) = (1usize << (ell - 1), (1usize << ell) - 1);
        let mut got = xs[lo - 1..hi].to_vec();
        let mut want: Vec<f64> = (lo..=hi)
            .map(|k| fgreedy_point(k as u64).unwrap())
            .collect();
        got.sort_by(f64::total_cmp);
        want.sort_by(f64::total_cmp);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() <= 2e-4);
        }
    }
    assert_eq!(column(&csv, "stop_reason").last().unwrap(), "max-points");
    let reports: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("res/reports.json")).unwrap())
            .unwrap();
    assert!(reports["inequalities"]
        .as_array()
        .unwrap()
        .iter()
        .all(|r| r["passed"] == true));
    assert!(reports["rate_fits"]
        .as_array()
        .unwrap()
        .iter()
        .any(|f| f["series"] == "native_residual"));
}

#[test]
fn outputs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bb.toml", BB_CONFIG);
    for out in ["a", "b"] {
        let o = run(
            &[
                "run",
                &cfg,
                "--out",
                out,
                "--candidates",
                "1001",
                "--evals",
                "2001",
                "--max-points",
                "60",
            ],
            dir.path(),
        );
        assert!(o.status.success());
        let o = run(
            &[
                "reproduce-fp",
                "--kernel",
                "k2",
                "--out",
                out,
                "--candidates",
                "1001",
                "--evals",
                "2001",
            ],
            dir.path(),
        );
        assert!(o.status.success());
        let o = run(
            &[
                "reproduce-bb",
                "--out",
                out,
                "--candidates",
                "1001",
                "--evals",
                "2001",
            ],
            dir.path(),
        );
        assert!(o.status.success());
    }
    for f in [
        "records.csv",
        "reports.json",
        "fig4_k2.csv",
        "fig4_k2_density.csv",
        "fig4_k2_fits.json",
        "fig2_bb.csv",
        "fig2_bb_fits.json",
    ] {
        let a = fs::read(dir.path().join("a").join(f)).unwrap();
        let b = fs::read(dir.path().join("b").join(f)).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, b, "{f} differs");
    }
}

#[test]
fn zero_points_gives_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bb.toml", BB_CONFIG);
    let out = run(
        &["run", &cfg, "--out", "res", "--max-points", "0"],
        dir.path(),
    );
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("res/records.csv")).unwrap();
    assert_eq!(
        csv,
        "n,x,eta,linf_residual,max_power,native_residual,interp_norm,stop_reason\n"
    );
}

#[test]
fn p_greedy_ignores_the_target() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_config(
        dir.path(),
        "a.toml",
        &BB_CONFIG.replace("beta = 1.0", "beta = 0"),
    );
    let b = write_config(
        dir.path(),
        "b.toml",
        &BB_CONFIG
            .replace("beta = 1.0", "beta = 0")
            .replace("p = 1.0", "p = 2.5"),
    );
    for (cfg, out) in [(&a, "a"), (&b, "b")] {
        assert!(run(
            &["run", cfg, "--out", out, "--max-points", "40"],
            dir.path()
        )
        .status
        .success());
    }
    let read = |o: &str| fs::read_to_string(dir.path().join(o).join("records.csv")).unwrap();
    assert_eq!(column(&read("a"), "x"), column(&read("b"), "x"));
    assert_ne!(
        column(&read("a"), "linf_residual"),
        column(&read("b"), "linf_residual")
    );
}

#[test]
fn config_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bad.toml",
        &BB_CONFIG.replace("beta = 1.0", "beta = -2.0"),
    );
    let out = run(&["run", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 17"), "{err}");
    let cfg = write_config(dir.path(), "bad2.toml", "[kernel\nfamily = 1\n");
    let err = String::from_utf8_lossy(&run(&["run", &cfg], dir.path()).stderr).into_owned();
    assert!(err.contains("line 1"), "{err}");
}

#[test]
fn coarse_eval_grid_warns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bb.toml", BB_CONFIG);
    let out = run(
        &[
            "run",
            &cfg,
            "--out",
            "res",
            "--candidates",
            "201",
            "--evals",
            "101",
            "--max-points",
            "5",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn fp_outside_native_space_is_a_domain_error() {
    let dir = tempfile::tempdir().unwrap();
    for (kernel, p) in [("k1", "0.5"), ("k2", "1.5")] {
        let out = run(&["reproduce-fp", "--kernel", kernel, "--p", p], dir.path());
        assert_eq!(out.status.code(), Some(2));
        assert!(String::from_utf8_lossy(&out.stderr).contains("p >"));
    }
}

#[test]
fn reproduce_bb_brackets_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["reproduce-bb", "--out", "."], dir.path());
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("fig2_bb.csv")).unwrap();
    assert_eq!(csv.lines().count(), 128);
    let get =
        |c: &str| -> Vec<f64> { column(&csv, c).iter().map(|v| v.parse().unwrap()).collect() };
    let (r, lo, hi) = (get("greedy_ratio"), get("ratio_lower"), get("ratio_upper"));
    for k in 0..127 {
        assert!(
            r[k] >= 0.95 * lo[k] && r[k] <= 1.05 * hi[k],
            "n = {}",
            k + 1
        );
    }
    // L∞ of r_n is flat until n+1 reaches a power of two, then drops by 4
    // row k holds n = k + 1: drop between n = 2 and 3, flat for n = 3..=6
    let l = get("greedy_linf_exact");
    assert_eq!(l[1] / l[2], 4.0);
    assert_eq!(l[2], l[5]);
    let fits: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("fig2_bb_fits.json")).unwrap())
            .unwrap();
    let opt = fits["fits"]
        .as_array()
        .unwrap()
        .iter()
        .find(|f| f["series"] == "optimal_linf")
        .unwrap();
    assert!(opt["fit"]["r_squared"].as_f64().unwrap() > 0.999);
}

#[test]
fn reproduce_fp_density_histogram() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "reproduce-fp",
            "--kernel",
            "k1",
            "--p",
            "0.51,3",
            "--bins",
            "10",
            "--out",
            ".",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let density = fs::read_to_string(dir.path().join("fig3_k1_density.csv")).unwrap();
    assert_eq!(
        density.lines().next().unwrap(),
        "p,bin_lower,bin_upper,count,density"
    );
    assert_eq!(density.lines().count(), 21);
    let counts: Vec<usize> = column(&density, "count")
        .iter()
        .map(|v| v.parse().unwrap())
        .collect();
    // small p concentrates points at the boundary
    assert!(counts[0] > 2 * counts[4]);
    let header = fs::read_to_string(dir.path().join("fig3_k1.csv")).unwrap();
    assert_eq!(
        header.lines().next().unwrap(),
        "p,n,x,linf_residual,native_residual,ratio,linf_residual_candidates,ratio_candidates"
    );
}

#[test]
fn verify_passes_and_catches_mutation() {
    let dir = tempfile::tempdir().unwrap();
    let start = std::time::Instant::now();
    let out = run(&["verify"], dir.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    assert!(start.elapsed().as_secs_f64() < 30.0);
    let table = String::from_utf8_lossy(&out.stdout);
    let known: Vec<&str> = table.lines().filter(|l| !l.starts_with("PASS")).collect();
    assert_eq!(known.len(), 1, "{table}");
    assert!(known[0].starts_with("KNOWN-RED") && known[0].contains("eigen-scaling"));
    assert!(table.contains("factor-bound"));

    let out = run(&["verify", "--inject-sign-flip"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let table = String::from_utf8_lossy(&out.stdout);
    let line = table
        .lines()
        .find(|l| l.contains("determinant-identity"))
        .unwrap();
    assert!(line.starts_with("FAIL"), "{line}");
}
