// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use bosent_cli::config::parse_document;
use bosent_core::fock::{FockState, SectorBasis};
use bosent_core::states::{example_state, SectorDensityMatrix};
use bosent_core::{CVector, C64};
use bosent_cli::OUTPUT_ENV;
use tempfile::TempDir;

fn bosent(args: &[&str]) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_bosent"));
    cmd.args(args).env_remove(OUTPUT_ENV);
    cmd
}

fn run(args: &[&str]) -> Output {
    bosent(args).output().expect("spawn bosent")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("config.json");
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

const RANDOM_EVOLVE: &str = r#"{
  "name": "random-run",
  "system": {"particles": 2, "modes": 3, "bipartition": 1},
  "hamiltonian": [{"kind": "hopping", "amplitudes": [0.6, 0.9]}],
  "noise": [{"kind": "dephasing", "rates": [0.2, 0.1, 0.3]}],
  "initial_state": {"kind": "random", "rank": 2},
  "task": {"kind": "evolve"},
  "time_grid": {"start": 0, "stop": 4, "points": 9}
}"#;

#[test]
fn bundled_verify_passes() {
    let out = TempDir::new().unwrap();
    let res = run(&["verify", "--config", "paper-examples", "--output", out.path().to_str().unwrap(), "--oracle"]);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    let mut seen = 0;
    for entry in fs::read_dir(out.path()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "csv") {
            let (header, rows) = read_csv(&path);
            let pass = column(&header, "pass");
            assert!(rows.iter().all(|r| r[pass] == "true"), "{}", path.display());
            seen += 1;
        }
    }
    assert_eq!(seen, 3);
}

#[test]
fn every_bundled_subcommand_succeeds() {
    for kind in ["evolve", "threshold", "large-n", "stationary"] {
        let out = TempDir::new().unwrap();
        let res = run(&[kind, "--config", "paper-examples", "--output", out.path().to_str().unwrap()]);
        assert_eq!(res.status.code(), Some(0), "{kind}: {}", String::from_utf8_lossy(&res.stderr));
    }
}

#[test]
fn every_csv_has_a_schema() {
    let out = TempDir::new().unwrap();
    let dir = out.path().to_str().unwrap();
    for kind in ["evolve", "verify", "threshold", "large-n", "stationary"] {
        assert!(run(&[kind, "--config", "paper-examples", "--output", dir]).status.success());
    }
    let mut csvs = 0;
    for entry in fs::read_dir(out.path()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "csv") {
            csvs += 1;
            let schema = path.with_extension("schema.json");
            let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&schema).unwrap()).unwrap();
            let (header, rows) = read_csv(&path);
            let names: Vec<&str> = doc["columns"]
                .as_array()
                .unwrap()
                .iter()
                .map(|c| c["name"].as_str().unwrap())
                .collect();
            assert_eq!(names, header, "{}", schema.display());
            assert_eq!(doc["rows"].as_u64().unwrap() as usize, rows.len());
            assert_eq!(doc["seed"].as_u64(), Some(0));
        }
    }
    assert!(csvs >= 12, "{csvs} csv files");
}

#[test]
fn dephasing_example_negativity_decreases() {
    let out = TempDir::new().unwrap();
    let res = run(&["evolve", "--config", "paper-examples", "--output", out.path().to_str().unwrap()]);
    assert!(res.status.success());
    let (header, rows) = read_csv(&out.path().join("dephasing-example.csv"));
    assert_eq!(rows.len(), 50);
    let neg = column(&header, "negativity_formula");
    let values: Vec<f64> = rows.iter().map(|r| r[neg].parse().unwrap()).collect();
    assert!(values[0] > 0.1);
    assert!(values.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    assert!(*values.last().unwrap() <= 1e-12);
}

#[test]
fn loss_threshold_value() {
    let out = TempDir::new().unwrap();
    let res = run(&["threshold", "--config", "paper-examples", "--output", out.path().to_str().unwrap(), "--oracle"]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let (header, rows) = read_csv(&out.path().join("loss-threshold.csv"));
    let (p, t) = (column(&header, "p"), column(&header, "t_star"));
    let row = rows.iter().find(|r| r[p] == "0.7").unwrap();
    let t_star: f64 = row[t].parse().unwrap();
    assert!((t_star - 3.389).abs() < 5e-4, "{t_star}");
    let at_half = rows.iter().find(|r| r[p] == "0.5").unwrap();
    assert_eq!(at_half[t], "");
}

#[test]
fn negative_rate_is_a_config_error_with_pointer() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), &RANDOM_EVOLVE.replace("[0.2, 0.1, 0.3]", "[0.2, -0.1, 0.3]"));
    let res = run(&["evolve", "--config", &cfg, "--output", dir.path().to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(1));
    let err = String::from_utf8_lossy(&res.stderr);
    assert!(err.contains("/noise/0/rates/1"), "{err}");
}

#[test]
fn malformed_documents_exit_one() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap().to_string();
    let unknown = write_config(dir.path(), &RANDOM_EVOLVE.replace("\"rank\": 2", "\"rank\": 2, \"colour\": 1"));
    let res = run(&["evolve", "--config", &unknown, "--output", &out]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("/initial_state"));

    let wrong_task = write_config(dir.path(), RANDOM_EVOLVE);
    let res = run(&["stationary", "--config", &wrong_task, "--output", &out]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("/task/kind"));

    let res = run(&["evolve", "--config", "/nonexistent/config.json", "--output", &out]);
    assert_eq!(res.status.code(), Some(1));
    assert_eq!(run(&["evolve"]).status.code(), Some(1));
}

#[test]
fn straddling_jump_rejects_loss_bound() {
    let dir = TempDir::new().unwrap();
    let text = RANDOM_EVOLVE
        .replace(
            r#"[{"kind": "dephasing", "rates": [0.2, 0.1, 0.3]}]"#,
            r#"[{"kind": "custom", "rate": 0.4, "operator": [{"word": "a1"}, {"word": "a2"}]}]"#,
        )
        .replace(r#"{"kind": "evolve"}"#, r#"{"kind": "evolve", "bound": "loss"}"#);
    let cfg = write_config(dir.path(), &text);
    let res = run(&["evolve", "--config", &cfg, "--output", dir.path().to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(1));
    let err = String::from_utf8_lossy(&res.stderr);
    assert!(err.contains("/task/bound"), "{err}");
}

#[test]
fn same_seed_gives_identical_bytes() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), RANDOM_EVOLVE);
    let (a, b, c) = (TempDir::new().unwrap(), TempDir::new().unwrap(), TempDir::new().unwrap());
    for (out, seed) in [(&a, "7"), (&b, "7"), (&c, "8")] {
        let res = run(&["evolve", "--config", &cfg, "--output", out.path().to_str().unwrap(), "--seed", seed]);
        assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    }
    let read = |d: &TempDir| fs::read(d.path().join("random-run.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&c));
}

#[test]
fn serialized_config_reproduces_output() {
    let dir = TempDir::new().unwrap();
    let original = write_config(dir.path(), RANDOM_EVOLVE);
    let parsed = parse_document(RANDOM_EVOLVE).unwrap();
    let round = dir.path().join("round.json");
    fs::write(&round, serde_json::to_string_pretty(&parsed[0].config).unwrap()).unwrap();
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    for (cfg, out) in [(original.as_str(), &a), (round.to_str().unwrap(), &b)] {
        assert!(run(&["evolve", "--config", cfg, "--output", out.path().to_str().unwrap()]).status.success());
    }
    let read = |d: &TempDir| fs::read(d.path().join("random-run.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn environment_sets_output_directory() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), RANDOM_EVOLVE);
    let env_out = TempDir::new().unwrap();
    let res = bosent(&["evolve", "--config", &cfg])
        .env(OUTPUT_ENV, env_out.path())
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(res.status.success());
    assert!(env_out.path().join("random-run.csv").exists());

    let flag_out = TempDir::new().unwrap();
    let res = bosent(&["evolve", "--config", &cfg, "--output", flag_out.path().to_str().unwrap()])
        .env(OUTPUT_ENV, env_out.path())
        .output()
        .unwrap();
    assert!(res.status.success());
    assert!(flag_out.path().join("random-run.csv").exists());
}

#[test]
fn violated_bound_exits_two() {
    let basis = SectorBasis::new(2, 4);
    let mut psi = CVector::zeros(basis.states().len());
    for occ in [vec![0, 1, 0, 1], vec![1, 1, 0, 0]] {
        psi[basis.index_of(&FockState::new(occ)).unwrap()] = C64::new(1.0 / 2f64.sqrt(), 0.0);
    }
    let pair = SectorDensityMatrix::pure(2, 4, &psi).unwrap();
    let rho = example_state(0.8).unwrap().mix(&pair, 0.99).unwrap();
    let m = rho.matrix();
    let rows = |f: fn(&C64) -> f64| -> Vec<Vec<f64>> {
        (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect()).collect()
    };
    let text = serde_json::json!({
        "name": "coherent-admixture",
        "system": {"particles": 2, "modes": 4, "bipartition": 2},
        "hamiltonian": [{"kind": "diagonal", "energies": [0.3, -0.2, 1.1, 0.5]}],
        "noise": [{"kind": "custom", "rate": 0.5, "operator": [{"word": "a1 a3"}]}],
        "initial_state": {"kind": "matrix", "re": rows(|z| z.re), "im": rows(|z| z.im)},
        "task": {"kind": "evolve", "bound": "loss"},
        "time_grid": {"start": 0, "stop": 10, "points": 41}
    });
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), &text.to_string());
    let res = run(&["evolve", "--config", &cfg, "--output", dir.path().to_str().unwrap()]);
    let err = String::from_utf8_lossy(&res.stderr);
    assert_eq!(res.status.code(), Some(2), "{err}");
    assert!(err.contains("loss bound violated"), "{err}");
    assert!(dir.path().join("coherent-admixture.csv").exists());
}
