use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use nk_cloud::export::read_cloud_csv;
use nk_cloud::{CloudKind, NkLandscape};
use serde_json::Value;

fn nkcloud(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nkcloud"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = nkcloud(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    nkcloud(args).status.code().expect("exit code")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_writes_reloadable_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        ok(&[
            "gen",
            "--n",
            "20",
            "--k",
            "15",
            "--seed",
            "42",
            "--out",
            s(p),
        ]);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let l = NkLandscape::load(&a).unwrap();
    assert_eq!(l, NkLandscape::generate(20, 15, 42).unwrap());
    let config = json(&dir.path().join("a.config.json"));
    assert_eq!(config["landscape_seed"], 42);
}

#[test]
fn gen_enumerate_prints_max_and_refuses_large_n() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("l.json");
    let stdout = ok(&[
        "gen",
        "--n",
        "10",
        "--k",
        "3",
        "--out",
        s(&out),
        "--enumerate",
    ]);
    assert!(stdout.contains("max-fitness"), "{stdout}");
    let big = dir.path().join("big.json");
    assert_eq!(
        code(&[
            "gen",
            "--n",
            "30",
            "--k",
            "3",
            "--out",
            s(&big),
            "--enumerate"
        ]),
        3
    );
    assert!(!big.exists());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = s(dir.path());
    assert_eq!(
        code(&[
            "gen",
            "--n",
            "8",
            "--k",
            "8",
            "--out",
            &format!("{d}/x.json")
        ]),
        2
    );
    assert_eq!(
        code(&[
            "cloud",
            "--heuristic",
            "sa",
            "--n",
            "8",
            "--k",
            "2",
            "--out-dir",
            d
        ]),
        2
    );
    assert_eq!(
        code(&[
            "cloud",
            "--bin-width",
            "0",
            "--n",
            "8",
            "--k",
            "2",
            "--out-dir",
            d
        ]),
        2
    );
    assert_eq!(code(&["cloud", "--n", "26", "--k", "2", "--out-dir", d]), 3);
    let missing = dir.path().join("missing.json");
    assert_eq!(
        code(&["cloud", "--landscape", s(&missing), "--out-dir", d]),
        5
    );
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"format_version\": 1}").unwrap();
    assert_eq!(code(&["cloud", "--landscape", s(&bad), "--out-dir", d]), 4);
    assert_eq!(code(&["nonsense"]), 2);
}

#[test]
fn cloud_outputs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str, threads: &str| {
        let out = dir.path().join(sub);
        ok(&[
            "--threads",
            threads,
            "cloud",
            "--n",
            "12",
            "--k",
            "4",
            "--seed",
            "5",
            "--heuristic",
            "sa",
            "--temp",
            "0.05",
            "--rng-seed",
            "9",
            "--raw-points",
            "--analytic",
            "--out-dir",
            s(&out),
        ]);
        out
    };
    let (a, b) = (run("a", "1"), run("b", "2"));
    for file in [
        "fc.csv",
        "fcstar.csv",
        "points.csv",
        "analytic.csv",
        "beta.json",
    ] {
        assert_eq!(
            fs::read(a.join(file)).unwrap(),
            fs::read(b.join(file)).unwrap(),
            "{file}"
        );
    }
    let report = json(&a.join("beta.json"));
    assert!(report["beta"].is_number(), "{report}");
    assert!(report["beta_star"].is_number(), "{report}");
    let config = json(&a.join("config.json"));
    assert_eq!(config["heuristic"]["temperature"], 0.05);
    assert_eq!(config["samples_per_genotype"], 1);
    let points = fs::read_to_string(a.join("points.csv")).unwrap();
    assert_eq!(points.lines().count(), 1 + (1 << 12));
}

#[test]
fn hamming_cloud_slope_matches_neighborhood_correlation() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = ok(&[
        "cloud",
        "--hamming",
        "--n",
        "16",
        "--k",
        "3",
        "--seed",
        "2",
        "--out-dir",
        s(dir.path()),
    ]);
    let slope: f64 = stdout
        .split_whitespace()
        .skip_while(|w| *w != "slope")
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!((slope - 0.75).abs() < 0.03, "{stdout}");
    let fc = fs::read(dir.path().join("fc.csv")).unwrap();
    let cloud = read_cloud_csv(&fc[..], 0.002, CloudKind::Fc, "hamming").unwrap();
    assert_eq!(cloud.total_count(), 16 << 16);
    assert!(!dir.path().join("fcstar.csv").exists());
}

#[test]
fn zero_generation_limit_cloud_is_the_diagonal() {
    let dir = tempfile::tempdir().unwrap();
    ok(&[
        "limit-cloud",
        "--n",
        "12",
        "--k",
        "3",
        "--heuristic",
        "mhc",
        "--generations",
        "0",
        "--out-dir",
        s(dir.path()),
    ]);
    assert!(json(&dir.path().join("beta.json"))["beta_star"].is_null());
    let csv = fs::read(dir.path().join("fcstar.csv")).unwrap();
    let cloud = read_cloud_csv(&csv[..], 0.002, CloudKind::FcStar, "mhc").unwrap();
    for b in &cloud.bins {
        assert!(b.f_min >= b.center - 0.001 - 1e-12 && b.f_max < b.center + 0.001 + 1e-12);
    }
}

#[test]
fn cooling_snapshots_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    ok(&[
        "limit-cloud",
        "--n",
        "12",
        "--k",
        "4",
        "--heuristic",
        "sa-cooling",
        "--snapshots",
        "300,50",
        "--trace-start",
        "7",
        "--out-dir",
        s(dir.path()),
    ]);
    for g in [50, 300] {
        assert!(dir.path().join(format!("fcstar_g{g}.csv")).exists());
        assert_eq!(
            json(&dir.path().join(format!("beta_g{g}.json")))["generations"],
            g
        );
    }
    let trace = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let lines: Vec<&str> = trace.lines().collect();
    assert_eq!(lines.len(), 1 + 301);
    assert!(lines[1].starts_with("0,7,") && lines[1].ends_with(','));
    assert!(lines[2].ends_with(",0.1"));
    assert_eq!(
        code(&[
            "limit-cloud",
            "--n",
            "12",
            "--k",
            "4",
            "--heuristic",
            "sa-cooling",
            "--snapshots",
            "3000",
            "--out-dir",
            s(dir.path()),
        ]),
        2
    );
}

#[test]
fn analytic_curves() {
    let dir = tempfile::tempdir().unwrap();
    let read = |name: &str| -> Vec<(f64, f64)> {
        fs::read_to_string(dir.path().join(name).join("analytic.csv"))
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| {
                let mut it = l.split(',');
                (
                    it.next().unwrap().parse().unwrap(),
                    it.next().unwrap().parse().unwrap(),
                )
            })
            .collect()
    };
    let d = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    ok(&[
        "analytic",
        "--heuristic",
        "hamming",
        "--n",
        "25",
        "--k",
        "5",
        "--out-dir",
        &d("h"),
    ]);
    let ham = read("h");
    assert_eq!(ham.len(), 101);
    for &(f, m) in &ham {
        assert!((m - (0.76 * f + 0.12)).abs() < 1e-12);
    }
    ok(&["analytic", "--heuristic", "mhc", "--out-dir", &d("m")]);
    assert!((read("m")[0].1 - 0.516).abs() < 0.01);
    ok(&[
        "analytic",
        "--heuristic",
        "sa",
        "--temp",
        "10",
        "--out-dir",
        &d("s10"),
    ]);
    ok(&[
        "analytic",
        "--heuristic",
        "sa",
        "--temp",
        "1000",
        "--out-dir",
        &d("s1000"),
    ]);
    ok(&["analytic", "--heuristic", "hamming", "--out-dir", &d("h20")]);
    let ham = read("h20");
    // Rejected downhill moves keep SA above the line by about E[(f - X)^2; X < f] / T.
    for (s, h) in read("s10").iter().zip(&ham).filter(|(_, h)| h.0 <= 0.55) {
        assert!((s.1 - h.1).abs() < 1e-3, "{s:?} {h:?}");
    }
    for (s, h) in read("s1000").iter().zip(&ham) {
        assert!((s.1 - h.1).abs() < 1e-3, "{s:?} {h:?}");
    }
    assert_eq!(
        code(&[
            "analytic",
            "--heuristic",
            "mhc",
            "--temp",
            "1",
            "--out-dir",
            &d("x")
        ]),
        2
    );
}

#[test]
fn table_battery_on_a_small_landscape() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = ok(&[
        "reproduce-table1",
        "--n",
        "12",
        "--k",
        "4",
        "--seeds",
        "1,2",
        "--out-dir",
        s(dir.path()),
    ]);
    assert!(stdout.contains("mean over 2 seeds"), "{stdout}");
    let report = json(&dir.path().join("table1.json"));
    let seeds = report["seeds"].as_array().unwrap();
    assert_eq!(seeds.len(), 2);
    for seed in seeds {
        assert_eq!(seed["rows"].as_array().unwrap().len(), 9);
        assert!(seed["max_fitness"].as_f64().unwrap() > 0.5);
    }
    assert!(dir.path().join("seed_2/nhc_fcstar.csv").exists());
    assert!(dir
        .path()
        .join("seed_1/sa_cooling_g2450_fcstar.csv")
        .exists());
    assert!(dir.path().join("table1.txt").exists());
}
