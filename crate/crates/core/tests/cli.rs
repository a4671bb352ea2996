use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rectmaxvol::data::write_triplets;
use rectmaxvol::synthetic::planted_tastes;
use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_rectmaxvol"));
    cmd.env_remove("RECTMAXVOL_CACHE_DIR");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn dataset(dir: &Path) -> PathBuf {
    let path = dir.join("ratings.csv");
    let r = planted_tastes(120, 80, 5, 0.15, 3);
    write_triplets(&r, std::fs::File::create(&path).unwrap()).unwrap();
    path
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_reader(std::fs::File::open(path).unwrap()).unwrap()
}

#[test]
fn select_rectangular_and_square() {
    let dir = TempDir::new().unwrap();
    let data = dataset(dir.path());
    let data = data.to_str().unwrap();
    let out = dir.path().join("rect.json");
    let res = run(&[
        "select",
        "-r",
        data,
        "--selector",
        "rectangular",
        "-f",
        "5",
        "-L",
        "15",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let report = json(&out);
    let k: Vec<u64> = report["k"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .collect();
    assert_eq!(k.len(), 15);
    let mut unique = k.clone();
    unique.sort();
    unique.dedup();
    assert_eq!(unique.len(), 15);
    assert_eq!(report["schema_version"], 1);
    assert!(report["log_rectvol"].is_number());

    let out = dir.path().join("square.json");
    let res = run(&[
        "select",
        "-r",
        data,
        "--selector",
        "square",
        "-f",
        "10",
        "-L",
        "10",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert!(res.status.success());
    let report = json(&out);
    assert_eq!(report["k"].as_array().unwrap().len(), 10);
    assert_eq!(report["dominance"]["tol"], 0.01);
}

#[test]
fn select_auto_stops_inside_the_ellipsoid() {
    let dir = TempDir::new().unwrap();
    let data = dataset(dir.path());
    let out = dir.path().join("auto.json");
    let weights = dir.path().join("w.csv");
    let res = run(&[
        "select",
        "-r",
        data.to_str().unwrap(),
        "-f",
        "20",
        "-L",
        "auto",
        "-o",
        out.to_str().unwrap(),
        "--weights",
        weights.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let report = json(&out);
    assert!(report["max_w_outside"].as_f64().unwrap() <= 1.0);
    let l0 = report["seed_size"].as_u64().unwrap();
    assert!((20..=80).contains(&l0));
    let text = std::fs::read_to_string(weights).unwrap();
    assert!(text.starts_with("column,seed_position,w"));
}

#[test]
fn invalid_pairs_fail_before_reading_data() {
    let res = run(&[
        "select",
        "-r",
        "/nonexistent.csv",
        "-f",
        "5",
        "-L",
        "3",
        "-o",
        "/tmp/x.json",
    ]);
    assert_eq!(res.status.code(), Some(2));
    let res = run(&[
        "select",
        "-r",
        "/nonexistent.csv",
        "--selector",
        "square",
        "-f",
        "5",
        "-L",
        "auto",
        "-o",
        "/tmp/x.json",
    ]);
    assert_eq!(res.status.code(), Some(2));
    let res = run(&["select", "-r", "/nonexistent.csv", "-f", "5", "-o", "/tmp/x.json"]);
    assert_eq!(res.status.code(), Some(1));
}

#[test]
fn evaluate_is_byte_identical_and_item_mode_matches_transpose() {
    let dir = TempDir::new().unwrap();
    let data = dataset(dir.path());
    let cache = dir.path().join("cache");
    let eval = |input: &Path, mode: &str, tag: &str| -> (Vec<u8>, serde_json::Value) {
        let (j, c) = (
            dir.path().join(format!("{tag}.json")),
            dir.path().join(format!("{tag}.csv")),
        );
        let res = bin()
            .args([
                "--seed",
                "4",
                "evaluate",
                "-r",
                input.to_str().unwrap(),
                "--mode",
                mode,
                "-f",
                "5",
                "-L",
                "10",
                "--out-json",
                j.to_str().unwrap(),
                "--out-csv",
                c.to_str().unwrap(),
            ])
            .env("RECTMAXVOL_CACHE_DIR", &cache)
            .output()
            .unwrap();
        assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
        (std::fs::read(c).unwrap(), json(&j))
    };
    let (a, _) = eval(&data, "user", "a");
    let (b, _) = eval(&data, "user", "b");
    assert_eq!(a, b);
    assert!(std::fs::read_dir(&cache).unwrap().count() > 0);
    let header = String::from_utf8(a.clone()).unwrap();
    assert!(header.starts_with("schema_version,selector,f,L0,k,metric,mean,sigma,best"));

    let transposed = dir.path().join("transposed.csv");
    let r = rectmaxvol::data::read_ratings_file(&data, &Default::default()).unwrap();
    write_triplets(&r.transpose(), std::fs::File::create(&transposed).unwrap()).unwrap();
    let (item, item_json) = eval(&data, "item", "item");
    let (user_t, user_json) = eval(&transposed, "user", "user_t");
    assert_eq!(item, user_t);
    assert_eq!(item_json["per_fold"], user_json["per_fold"]);
}

#[test]
fn sweep_writes_grid_and_optimal_ranks() {
    let dir = TempDir::new().unwrap();
    let data = dataset(dir.path());
    let p = |n: &str| dir.path().join(n).to_str().unwrap().to_string();
    let res = run(&[
        "sweep",
        "-r",
        data.to_str().unwrap(),
        "--seed-sizes",
        "5:10:5",
        "--rank-grid",
        "2,5,8",
        "--out-json",
        &p("s.json"),
        "--out-csv",
        &p("s.csv"),
        "--out-optimal",
        &p("opt.csv"),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let table = json(Path::new(&p("s.json")));
    let cells: Vec<(u64, u64)> = table["cells"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| (c["seed_size"].as_u64().unwrap(), c["rank"].as_u64().unwrap()))
        .collect();
    assert_eq!(cells, vec![(5, 2), (5, 5), (10, 2), (10, 5), (10, 8)]);
    let opt = std::fs::read_to_string(p("opt.csv")).unwrap();
    assert_eq!(opt.lines().count(), 3);
}

#[test]
fn verify_passes_and_detects_fault() {
    let ok = run(&["--seed", "3", "verify"]);
    assert!(ok.status.success());
    let again = run(&["--seed", "3", "verify"]);
    assert_eq!(ok.stdout, again.stdout);
    let text = String::from_utf8(ok.stdout).unwrap();
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 8);

    let bad = run(&["verify", "--inject-fault", "norm-update"]);
    assert!(!bad.status.success());
    assert!(String::from_utf8(bad.stdout)
        .unwrap()
        .contains("FAIL rank-1 update equivalence"));
}
