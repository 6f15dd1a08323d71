use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use entanglekit::states::{self, Bell, DensityMatrix, StateFile, WernerParam};
use entanglekit::ComplexMatrix;
use serde_json::Value;

fn entanglekit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entanglekit"))
        .args(args)
        .env_remove("ENTANGLEKIT_TOL")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn state_file(dir: &Path, name: &str, rho: &DensityMatrix) -> String {
    write(dir, name, &rho.to_file().to_json()).to_string_lossy().into_owned()
}

fn diagonal_file(dir: &Path, name: &str, d1: usize, d2: usize, diag: &[f64]) -> String {
    let n = d1 * d2;
    let m = ComplexMatrix::from_fn(n, n, |r, c| if r == c { diag[r].into() } else { 0.0.into() });
    write(dir, name, &StateFile::from_matrix(&m, d1, d2).to_json())
        .to_string_lossy()
        .into_owned()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn singlet() -> DensityMatrix {
    states::from_pure(&states::bell_state(Bell::PsiMinus))
}

#[test]
fn classify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let s = state_file(dir.path(), "singlet.json", &singlet());
    let out = entanglekit(&["classify", "--input", &s]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["verdict"], "EntangledDistillable");

    let mixed = state_file(dir.path(), "mixed.json", &DensityMatrix::maximally_mixed(2, 2));
    let out = entanglekit(&["classify", "--input", &mixed]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["verdict"], "Separable");

    let bound = state_file(dir.path(), "bound.json", &states::horodecki_3x3(0.5).unwrap());
    let out = entanglekit(&["classify", "--input", &bound]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["verdict"], "EntangledPPT");
}

#[test]
fn classify_names_the_failing_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let short = diagonal_file(dir.path(), "short.json", 2, 2, &[0.225; 4]);
    let out = entanglekit(&["classify", "--input", &short]);
    assert_eq!(out.status.code(), Some(64));
    assert!(stderr(&out).contains("trace"), "{}", stderr(&out));
    assert!(out.stdout.is_empty());

    let garbage = write(dir.path(), "garbage.json", "{\"d1\": 2");
    let out = entanglekit(&["classify", "--input", garbage.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(64));

    let out = entanglekit(&["classify", "--input", "/nonexistent/state.json"]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn tolerance_override_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let slightly_negative = diagonal_file(dir.path(), "neg.json", 2, 2, &[0.5 + 1e-9, 0.5, 0.0, -1e-9]);
    let out = entanglekit(&["classify", "--input", &slightly_negative]);
    assert_eq!(out.status.code(), Some(64));
    assert!(stderr(&out).contains("positive"), "{}", stderr(&out));

    let run = |tol: &str| {
        Command::new(env!("CARGO_BIN_EXE_entanglekit"))
            .args(["classify", "--input", &slightly_negative])
            .env("ENTANGLEKIT_TOL", tol)
            .output()
            .unwrap()
    };
    assert_eq!(run("-1e-8").status.code(), Some(0));
    assert_eq!(run("0.5").status.code(), Some(64));
    assert_eq!(run("tight").status.code(), Some(64));
}

#[test]
fn measure_values_and_dimension_errors() {
    let dir = tempfile::tempdir().unwrap();
    let s = state_file(dir.path(), "singlet.json", &singlet());
    let out = entanglekit(&["measure", "--input", &s, "--measures", "concurrence,eof"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v[0]["name"], "concurrence");
    assert!((v[0]["value"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert_eq!(v[1]["units"], "ebits");

    let werner = state_file(dir.path(), "w.json", &states::werner(WernerParam::new(0.75).unwrap()));
    let out = entanglekit(&["measure", "--input", &werner, "--measures", "negativity"]);
    assert!((json(&out)[0]["value"].as_f64().unwrap() - 0.25).abs() < 1e-10);

    let qutrits = state_file(dir.path(), "h.json", &states::horodecki_3x3(0.5).unwrap());
    let out = entanglekit(&["measure", "--input", &qutrits, "--measures", "concurrence"]);
    assert_eq!(out.status.code(), Some(64));
    assert!(stderr(&out).contains("concurrence"));

    // every measure defined for 3x3 is reported by default
    let out = entanglekit(&["measure", "--input", &qutrits]);
    assert_eq!(out.status.code(), Some(0));
    let names: Vec<String> = json(&out)
        .as_array()
        .unwrap()
        .iter()
        .map(|m| m["name"].as_str().unwrap().to_string())
        .collect();
    assert!(!names.contains(&"concurrence".to_string()) && names.contains(&"robustness".to_string()));

    let out = entanglekit(&["measure", "--input", &s, "--measures", "tangle"]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn distill_traces() {
    let out = entanglekit(&["distill", "--f0", "0.75", "--steps", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("step,F_before,F_after,p_success"));
    let row: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert!((row[2] - 0.788_461_5).abs() < 1e-7);
    assert!(!text.contains('\r'));
    assert!(entanglekit(&["distill", "--f0", "0.75"]).stderr.is_empty());

    let out = entanglekit(&["distill", "--f0", "1", "--steps", "3"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().filter(|l| l.ends_with(",1,1,1")).count(), 3);

    let out = entanglekit(&["distill", "--f0", "0.5", "--steps", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("note"));
    assert!(String::from_utf8(out.stdout).unwrap().lines().skip(1).all(|l| l.split(',').nth(2) == Some("0.5")));

    assert_eq!(entanglekit(&["distill", "--f0", "1.5"]).status.code(), Some(64));
    assert_eq!(entanglekit(&["distill", "--f0", "0.8", "--steps", "0"]).status.code(), Some(64));
}

#[test]
fn scan_row_counts_and_bound_entangled_cells() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("line.csv");
    let out = entanglekit(&["scan", "--family", "line", "--grid", "100", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 1 + 100 * 100);
    assert!(text.starts_with("alpha,beta,gamma,is_state,is_ppt,ccn_value,ccn_flag,verdict\n"));

    let out = entanglekit(&["scan", "--family", "offline", "--full"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let bound = text
        .lines()
        .filter(|l| {
            let f: Vec<&str> = l.split(',').collect();
            f[4] == "true" && f[6] == "true"
        })
        .count();
    assert!(bound >= 1);
}

#[test]
fn scan_rejects_bad_families() {
    assert_eq!(entanglekit(&["scan", "--family", "line", "--points", "00,10,11"]).status.code(), Some(64));
    assert_eq!(entanglekit(&["scan", "--family", "offline", "--points", "00,10,20"]).status.code(), Some(64));
    assert_eq!(entanglekit(&["scan", "--points", "00,13,20"]).status.code(), Some(64));
    assert_eq!(entanglekit(&["scan", "--grid", "1"]).status.code(), Some(64));
    assert_eq!(entanglekit(&["scan", "--lo", "1", "--hi", "0"]).status.code(), Some(64));
    let out = entanglekit(&["scan", "--family", "offline", "--points", "00,10,11", "--grid", "3", "--lo", "0"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn chsh_reports() {
    let dir = tempfile::tempdir().unwrap();
    let s = state_file(dir.path(), "singlet.json", &singlet());
    let v = json(&entanglekit(&["chsh", "--input", &s]));
    assert!((v["chsh_max"].as_f64().unwrap() - 2.828427).abs() < 1e-6);
    assert_eq!(v["confirmed"], true);
    assert_eq!(v["settings_found"]["a1"].as_array().unwrap().len(), 3);

    let mixed = state_file(dir.path(), "mixed.json", &DensityMatrix::maximally_mixed(2, 2));
    let v = json(&entanglekit(&["chsh", "--input", &mixed]));
    assert!(v["chsh_max"].as_f64().unwrap().abs() < 1e-12);

    let before = json(&entanglekit(&["chsh", "--hidden", "0.9,0.2"]));
    let after = json(&entanglekit(&["chsh", "--hidden", "0.9,0.2", "--filtered"]));
    assert!(before["chsh_max"].as_f64().unwrap() <= 2.0);
    assert!(after["chsh_max"].as_f64().unwrap() > 2.0);
    assert_eq!(after["violates_local_bound"], true);

    let qutrits = state_file(dir.path(), "h.json", &states::horodecki_3x3(0.5).unwrap());
    assert_eq!(entanglekit(&["chsh", "--input", &qutrits]).status.code(), Some(64));
    assert_eq!(entanglekit(&["chsh"]).status.code(), Some(64));
    assert_eq!(entanglekit(&["chsh", "--hidden", "0.9"]).status.code(), Some(64));
}

#[test]
fn witness_check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // SWAP is nonnegative on products, diag(-1, 1, 1, 1) is not
    let mut swap = ComplexMatrix::zeros(4, 4);
    for (r, c) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        swap[(r, c)] = 1.0.into();
    }
    let good = write(dir.path(), "swap.json", &StateFile::from_matrix(&swap, 2, 2).to_json());
    let out = entanglekit(&["witness-check", "--input", good.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verified"], true);
    assert!(v["min_product_expectation"].as_f64().unwrap().abs() < 1e-9);

    let bad = diagonal_file(dir.path(), "bad.json", 2, 2, &[-1.0, 1.0, 1.0, 1.0]);
    let out = entanglekit(&["witness-check", "--input", &bad]);
    assert_eq!(out.status.code(), Some(1));
    assert!((json(&out)["min_product_expectation"].as_f64().unwrap() + 1.0).abs() < 1e-9);

    let mut skew = ComplexMatrix::zeros(4, 4);
    skew[(0, 1)] = 1.0.into();
    let skew = write(dir.path(), "skew.json", &StateFile::from_matrix(&skew, 2, 2).to_json());
    assert_eq!(entanglekit(&["witness-check", "--input", skew.to_str().unwrap()]).status.code(), Some(64));
}

#[test]
fn usage_errors_exit_with_input_code() {
    assert_eq!(entanglekit(&["classify"]).status.code(), Some(64));
    assert_eq!(entanglekit(&["classify", "--input", "x", "--verbose"]).status.code(), Some(64));
    assert_eq!(entanglekit(&["teleport"]).status.code(), Some(64));
    assert_eq!(entanglekit(&["--help"]).status.code(), Some(0));
}

#[test]
fn stdin_input() {
    use std::io::Write;
    let mut child = Command::new(env!("CARGO_BIN_EXE_entanglekit"))
        .args(["classify", "--input", "-"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(singlet().to_file().to_json().as_bytes())
        .unwrap();
    assert_eq!(child.wait_with_output().unwrap().status.code(), Some(1));
}
