use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn ddwave(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ddwave"))
        .args(args)
        .arg("-o")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn rows(path: PathBuf) -> (Vec<String>, Vec<Vec<String>>) {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    let header = rdr.headers().unwrap().iter().map(String::from).collect();
    let rows = rdr
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

fn files_under(dir: &Path) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let path = e.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(dir).unwrap();
                out.insert(rel.to_string_lossy().replace('\\', "/"));
            }
        }
    }
    out
}

/// Every file written is listed in the manifest and vice versa.
fn assert_manifest_complete(dir: &Path) -> Value {
    let manifest = json(dir.join("manifest.json"));
    let listed: BTreeSet<String> = manifest["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    assert_eq!(listed, files_under(dir));
    manifest
}

#[test]
fn wave_at_rest_reports_functionals() {
    let tmp = TempDir::new().unwrap();
    let out = ddwave(tmp.path(), &["wave", "-a", "1", "-b", "0", "-p", "3", "-c", "0"]);
    assert!(out.status.success());
    let f = json(tmp.path().join("functionals.json"));
    assert!(f["pohozaev_p1_rel"].as_f64().unwrap().abs() <= 1e-8);
    assert!(f["p1"].as_f64().unwrap().abs() <= 1e-8);
    assert!(f["p2"].as_f64().unwrap().abs() <= 1e-8);
    assert!((f["d_closed_form"].as_f64().unwrap() - 4.0 / 3.0).abs() < 1e-10);
    assert!((f["d_quadrature"].as_f64().unwrap() - 4.0 / 3.0).abs() < 1e-10);
    let (header, data) = rows(tmp.path().join("profile.csv"));
    assert_eq!(header, ["x", "phi"]);
    assert_eq!(data.len(), 1024);
    assert_manifest_complete(tmp.path());
}

#[test]
fn wave_moving_d_value() {
    let tmp = TempDir::new().unwrap();
    let out = ddwave(tmp.path(), &["wave", "-a", "2", "-b", "1", "-p", "3", "-c", "0.5"]);
    assert!(out.status.success());
    let f = json(tmp.path().join("functionals.json"));
    assert!((f["d_closed_form"].as_f64().unwrap() - 1.14564).abs() < 1e-5);
}

#[test]
fn wave_rejects_bad_input() {
    let tmp = TempDir::new().unwrap();
    let out = ddwave(tmp.path(), &["wave", "-a", "1", "-b", "0", "-p", "3", "-c", "1.1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("c^2 must be < 1"));

    let out = ddwave(tmp.path(), &["wave", "-a", "1", "-b", "2", "-p", "3", "-c", "0.1"]);
    assert_eq!(out.status.code(), Some(2));

    let out = ddwave(tmp.path(), &["wave", "-a", "2", "-b", "1", "-p", "3", "-c", "0.5", "-L", "10"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("L >="));
}

/// `G(1)` per curve, in the order the curves were requested.
fn endpoint_values(dir: &Path) -> Vec<f64> {
    let (header, data) = rows(dir.join("gcurve.csv"));
    assert_eq!(header, ["z", "mu", "G"]);
    data.iter().filter(|r| num(&r[0]) == 1.0).map(|r| num(&r[2])).collect()
}

#[test]
fn region_curve_orderings() {
    let tmp = TempDir::new().unwrap();
    let mus = "0.1,0.3,0.5,0.7,0.9";
    assert!(ddwave(&tmp.path().join("p2"), &["region", "-p", "2", "--mu", mus]).status.success());
    assert!(ddwave(&tmp.path().join("p6"), &["region", "-p", "6", "--mu", mus]).status.success());
    let low = endpoint_values(&tmp.path().join("p2"));
    let high = endpoint_values(&tmp.path().join("p6"));
    assert_eq!(low.len(), 5);
    // p = 2: top to bottom with increasing mu; p = 6: bottom to top
    assert!(low.windows(2).all(|w| w[0] > w[1]));
    assert!(high.windows(2).all(|w| w[0] < w[1]));
    let (_, data) = rows(tmp.path().join("p2/gcurve.csv"));
    assert_eq!(data.len(), 5 * 512);
    assert_manifest_complete(&tmp.path().join("p2"));
}

#[test]
fn region_reports() {
    let tmp = TempDir::new().unwrap();
    assert!(ddwave(tmp.path(), &["region", "-p", "6", "--mu", "0.1"]).status.success());
    let r = json(tmp.path().join("region.json"));
    assert_eq!(r[0]["kind"], "empty");

    assert!(ddwave(tmp.path(), &["region", "-p", "5", "--mu", "0.5"]).status.success());
    let r = json(tmp.path().join("region.json"));
    assert_eq!(r[0]["kind"], "up_to_one");
    let lo = r[0]["interval_lo"].as_f64().unwrap();
    assert!((lo - (9.0 - 21f64.sqrt()) / 6.0).abs() < 1e-10);
    assert_eq!(r[0]["interval_hi"].as_f64(), Some(1.0));

    assert!(ddwave(tmp.path(), &["region", "-p", "3", "-a", "2", "-b", "1"]).status.success());
    let r = json(tmp.path().join("region.json"));
    assert_eq!(r[0]["mu"].as_f64(), Some(0.5));

    let out = ddwave(tmp.path(), &["region", "-p", "5", "--mu", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn atlas_anchor_points() {
    let tmp = TempDir::new().unwrap();
    assert!(ddwave(tmp.path(), &["atlas"]).status.success());
    let (header, data) = rows(tmp.path().join("atlas.csv"));
    assert_eq!(header, ["mu", "p", "z_root", "root_index"]);
    let at_three = |mu: f64| -> Vec<f64> {
        data.iter()
            .filter(|r| num(&r[0]) == mu && num(&r[1]) == 3.0)
            .map(|r| num(&r[2]))
            .collect()
    };
    assert_eq!(at_three(0.0), [0.5]);
    let z = at_three(1.0);
    assert_eq!(z.len(), 1);
    assert!((z[0] - 1.0 / 3.0).abs() < 1e-12);
    // mu = 0 curve is z = (p - 1) / 4
    for r in data.iter().filter(|r| num(&r[0]) == 0.0) {
        assert!((num(&r[2]) - (num(&r[1]) - 1.0) / 4.0).abs() < 1e-12);
    }

    let (header, crit) = rows(tmp.path().join("mucrit.csv"));
    assert_eq!(header, ["p", "mu_crit"]);
    assert!(!crit.is_empty());
    assert!(crit.iter().all(|r| num(&r[0]) > 5.0));
    let m: Vec<f64> = crit.iter().map(|r| num(&r[1])).collect();
    assert!(m.windows(2).all(|w| w[1] >= w[0]));
    assert!(m.iter().all(|&x| x > 1.0 / 3.0 && x < 1.0));
    assert_manifest_complete(tmp.path());

    let out = ddwave(tmp.path(), &["atlas", "--p-max", "13"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_reference_run() {
    let tmp = TempDir::new().unwrap();
    let out = ddwave(
        tmp.path(),
        &["simulate", "-a", "2", "-b", "1", "-p", "3", "-c", "0.8", "--t-end", "10"],
    );
    assert!(out.status.success());
    let m = assert_manifest_complete(tmp.path());
    assert_eq!(m["verdict"], "completed");
    assert!(m["energy_drift"].as_f64().unwrap() <= 1e-6);
    assert!(m["momentum_drift"].as_f64().unwrap() <= 1e-6);
    let (header, data) = rows(tmp.path().join("run.csv"));
    assert_eq!(header, ["t", "E", "M", "sup_u", "H", "orbital_dist"]);
    assert!((num(&data.last().unwrap()[0]) - 10.0).abs() < 1e-12);
}

#[test]
fn simulate_blow_up_run() {
    let tmp = TempDir::new().unwrap();
    let out = ddwave(
        tmp.path(),
        &["simulate", "-a", "2", "-b", "1", "-p", "3", "-c", "0.2", "--lambda", "1.05", "--t-end", "50"],
    );
    assert!(out.status.success());
    let m = json(tmp.path().join("manifest.json"));
    assert_eq!(m["verdict"], "blow_up_detected");
    assert!(m["t_star"].as_f64().unwrap() < 50.0);
    assert_eq!(m["prediction"], "unstable_by_blow_up");
}

#[test]
fn simulate_rejects_large_step() {
    let tmp = TempDir::new().unwrap();
    let out = ddwave(
        tmp.path(),
        &["simulate", "-a", "2", "-b", "1", "-p", "3", "-c", "0.8", "--dt", "1"],
    );
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("stability bound"));
    let m = assert_manifest_complete(tmp.path());
    assert_eq!(m["verdict"], "step_rejected");
    assert!(m["dt_bound"].as_f64().unwrap() < 1.0);
}

#[test]
fn simulate_is_deterministic() {
    let tmp = TempDir::new().unwrap();
    let args = ["simulate", "-a", "2", "-b", "1", "-p", "2", "-c", "0.5", "--lambda", "1.02", "--t-end", "5"];
    assert!(ddwave(&tmp.path().join("x"), &args).status.success());
    assert!(ddwave(&tmp.path().join("y"), &args).status.success());
    let read = |d: &str| fs::read(tmp.path().join(d).join("run.csv")).unwrap();
    assert_eq!(read("x"), read("y"));
    let strip = |d: &str| {
        let mut m = json(tmp.path().join(d).join("manifest.json"));
        m.as_object_mut().unwrap().remove("wall_time_s");
        m
    };
    assert_eq!(strip("x"), strip("y"));
}

#[test]
fn sweep_merge_ignores_worker_count() {
    let tmp = TempDir::new().unwrap();
    let base = [
        "sweep", "-a", "2", "-b", "1", "-p", "3,2", "-c", "0.83,0.3", "--lambda", "1.05",
        "--t-end", "20", "-N", "512",
    ];
    let mut one = base.to_vec();
    one.extend(["--jobs", "1"]);
    let mut four = base.to_vec();
    four.extend(["--jobs", "4"]);
    assert!(ddwave(&tmp.path().join("j1"), &one).status.success());
    assert!(ddwave(&tmp.path().join("j4"), &four).status.success());
    let files = files_under(&tmp.path().join("j1"));
    assert_eq!(files, files_under(&tmp.path().join("j4")));
    for f in files.iter().filter(|f| f.ends_with(".csv")) {
        assert_eq!(
            fs::read(tmp.path().join("j1").join(f)).unwrap(),
            fs::read(tmp.path().join("j4").join(f)).unwrap(),
            "{f}"
        );
    }
    assert_manifest_complete(&tmp.path().join("j1"));
    let (_, data) = rows(tmp.path().join("j1/sweep.csv"));
    let keys: Vec<(f64, f64)> = data.iter().map(|r| (num(&r[0]), num(&r[1]))).collect();
    assert_eq!(keys, [(2.0, 0.3), (2.0, 0.83), (3.0, 0.3), (3.0, 0.83)]);
    let verdicts: Vec<&str> = data.iter().map(|r| r[5].as_str()).collect();
    assert_eq!(verdicts, ["blow_up_detected", "completed", "blow_up_detected", "completed"]);
}

#[test]
fn verify_passes_and_is_reproducible() {
    let tmp = TempDir::new().unwrap();
    assert!(ddwave(&tmp.path().join("a"), &["verify", "--seed", "11"]).status.success());
    assert!(ddwave(&tmp.path().join("b"), &["verify", "--seed", "11"]).status.success());
    let read = |d: &str| fs::read(tmp.path().join(d).join("verify.json")).unwrap();
    assert_eq!(read("a"), read("b"));
    let report = json(tmp.path().join("a/verify.json"));
    assert_eq!(report["passed"], true);
    assert_eq!(report["seed"], 11);
    let m = assert_manifest_complete(&tmp.path().join("a"));
    assert_eq!(m["seed"], 11);
}

#[test]
fn verify_catches_injected_fault() {
    let tmp = TempDir::new().unwrap();
    let out = ddwave(tmp.path(), &["verify", "--inject-fault", "sigma"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("verification failed: sigma_residual"));
    let report = json(tmp.path().join("verify.json"));
    assert_eq!(report["passed"], false);
    let failed: Vec<&str> = report["invariants"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["pass"] == false)
        .map(|r| r["name"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["sigma_residual"]);
}
