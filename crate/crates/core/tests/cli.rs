use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use nnvqe::experiment::{load_config, preset, PRESETS};

fn nnvqe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nnvqe")).args(args).env_remove("NNVQE_OUT_DIR").output().unwrap()
}

const TINY: &str = r#"
kind = "sweep1d"
name = "tiny"
seed = 4

[[models]]
label = "hea"
n_qubits = 4
ansatz = "hea"
depth = 1
encoder = "mlp"
hidden_dim = 4
dropout = 0.2

[[models]]
label = "mera"
n_qubits = 4
ansatz = "mera"
depth = 1
encoder = "affine"
hidden_dim = 0
dropout = 0.0

[training]
max_epochs = 4

[[train_grid]]
start = -1.0
stop = 1.0
count = 3

[[test_grid]]
start = -4.0
stop = 4.0
count = 9
"#;

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_str().unwrap().to_string(), fs::read(&p).unwrap()))
        .collect();
    out.sort();
    out
}

#[test]
fn unknown_key_exits_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", "kind = \"sweep1d\"\nbogus = 1\n");
    let out = nnvqe(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2") && err.contains("bogus"), "{err}");

    let nested = write(dir.path(), "nested.toml", "kind = \"sweep1d\"\n[training]\nmax_epoch = 3\n");
    let err = String::from_utf8_lossy(&nnvqe(&["run", &nested]).stderr).to_string();
    assert!(err.contains("training.max_epoch"), "{err}");

    let missing = nnvqe(&["run", "/nonexistent/config.toml"]);
    assert_eq!(missing.status.code(), Some(1));
    assert_eq!(nnvqe(&["preset", "nope"]).status.code(), Some(2));
}

#[test]
fn presets_listing_and_values() {
    let out = nnvqe(&["presets"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for p in &PRESETS {
        assert!(text.lines().any(|l| l.starts_with(p.name)), "{}", p.name);
        let shown = nnvqe(&["preset", p.name, "--show"]);
        assert!(shown.status.success());
    }
    let fig4 = String::from_utf8(nnvqe(&["preset", "fig4", "--show"]).stdout).unwrap();
    assert!(fig4.contains("deltas = [1.5, 2.0]"), "{fig4}");
    assert!(fig4.contains("n_qubits = 12"));
    assert!(fig4.contains("max_epochs = 100"));
}

#[test]
fn shipped_configs_match_presets() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    for p in &PRESETS {
        let file = root.join(format!("{}.toml", p.name));
        assert_eq!(load_config(&file).unwrap(), preset(p.name).unwrap(), "{}", p.name);
    }
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "tiny.toml", TINY);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(nnvqe(&["run", &cfg, "--out", a.to_str().unwrap()]).status.success());
    assert!(nnvqe(&["run", &cfg, "--out", b.to_str().unwrap(), "--threads", "1"]).status.success());
    let (fa, fb) = (files(&a), files(&b));
    assert_eq!(fa.len(), fb.len());
    for ((name, x), (_, y)) in fa.iter().zip(&fb) {
        if name == "manifest.toml" {
            let strip = |v: &[u8]| String::from_utf8(v.to_vec()).unwrap().lines().skip(1).collect::<Vec<_>>().join("\n");
            assert_eq!(strip(x), strip(y));
        } else {
            assert_eq!(x, y, "{name}");
        }
    }

    // The manifest records every artifact and the full resolved config.
    let manifest: toml::Table = fs::read_to_string(a.join("manifest.toml")).unwrap().parse().unwrap();
    let listed: Vec<&str> = manifest["artifacts"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    let on_disk: Vec<&str> = fa.iter().map(|(n, _)| n.as_str()).collect();
    let mut sorted = listed.clone();
    sorted.sort();
    assert_eq!(sorted, on_disk);
    assert_eq!(manifest["config"]["training"]["schedule"]["initial"].as_float(), Some(0.009));
    assert_eq!(manifest["seed"].as_integer(), Some(4));

    let sweep = fs::read_to_string(a.join("sweep_hea.csv")).unwrap();
    assert_eq!(sweep.lines().next().unwrap(), "delta,e_pred,e_exact,rel_err,fidelity,variance");
    assert_eq!(sweep.lines().count(), 10);

    // A different seed changes the results.
    let c = dir.path().join("c");
    assert!(nnvqe(&["run", &cfg, "--out", c.to_str().unwrap(), "--seed", "5"]).status.success());
    assert_ne!(fs::read(a.join("sweep_hea.csv")).unwrap(), fs::read(c.join("sweep_hea.csv")).unwrap());
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "tiny.toml", TINY);
    let out = Command::new(env!("CARGO_BIN_EXE_nnvqe"))
        .args(["run", &cfg])
        .env("NNVQE_OUT_DIR", dir.path().join("env"))
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("env/tiny/summary.csv").exists());
}

#[test]
fn two_parameter_sweep_structure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "s5.toml",
        "preset = \"fig_s5\"\nname = \"s5\"\n\n[[models]]\nlabel = \"hea_d1\"\nn_qubits = 8\nansatz = \"hea\"\ndepth = 1\n\
         encoder = \"mlp\"\nhidden_dim = 6\ndropout = 0.2\n\n[training]\nmax_epochs = 2\n\n\
         [[train_grid]]\nstart = -1.0\nstop = 1.0\ncount = 2\n\n[[train_grid]]\nstart = 0.0\nstop = 1.0\ncount = 2\n",
    );
    let out_dir = dir.path().join("out");
    let out = nnvqe(&["run", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut reader = csv::Reader::from_path(out_dir.join("sweep_hea_d1.csv")).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["delta", "lambda", "e_pred", "e_exact", "rel_err", "fidelity", "variance", "hs", "hc"]);
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 5151);
    for r in &rows {
        let e_pred: f64 = r[2].parse().unwrap();
        let e_exact: f64 = r[3].parse().unwrap();
        assert!(e_pred >= e_exact - 1e-8);
        let delta: f64 = r[0].parse().unwrap();
        assert_eq!(r[7].parse::<f64>().unwrap(), 1.0 + delta);
        if delta < 1.0 {
            assert_eq!(&r[8], "nan");
        } else {
            assert_eq!(r[8].parse::<f64>().unwrap(), nnvqe::hamiltonian::phase_boundary_hc(delta).unwrap());
        }
    }

    let svg = nnvqe(&["plot", out_dir.join("sweep_hea_d1.csv").to_str().unwrap()]);
    assert!(svg.status.success());
    let text = fs::read_to_string(out_dir.join("sweep_hea_d1.svg")).unwrap();
    assert!(text.starts_with("<svg") || text.starts_with("<?xml"));
}

#[test]
fn every_kind_runs_at_toy_scale() {
    let dir = tempfile::tempdir().unwrap();
    let model = "[[models]]\nlabel = \"m\"\nn_qubits = 4\nansatz = \"hea\"\ndepth = 1\nencoder = \"mlp\"\nhidden_dim = 4\ndropout = 0.1\n";
    let common = "[training]\nmax_epochs = 3\n\n[[train_grid]]\nstart = -1.0\nstop = 1.0\ncount = 3\n\n\
                  [[test_grid]]\nstart = -2.0\nstop = 2.0\ncount = 5\n";
    let cases = [
        ("active_learn", "[active]\nmax_points = 3\n\n[[active.pool]]\nstart = -2.0\nstop = 2.0\ncount = 5\n", "rounds_m.csv"),
        ("speedup", "[paired]\ndeltas = [1.5]\ntrials = 2\n", "speedup_m_delta1.5.csv"),
        ("convergence_table", "[paired]\ndeltas = [1.0, 2.0]\ntrials = 2\n", "convergence.csv"),
        ("param_dump", "", "params_m.csv"),
        ("baseline_compare", "", "summary.csv"),
    ];
    for (kind, extra, artifact) in cases {
        let text = format!("kind = \"{kind}\"\nname = \"{kind}\"\n\n{model}\n{common}\n{extra}");
        let cfg = write(dir.path(), &format!("{kind}.toml"), &text);
        let out_dir = dir.path().join(kind);
        let out = nnvqe(&["run", &cfg, "--out", out_dir.to_str().unwrap()]);
        assert!(out.status.success(), "{kind}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(out_dir.join(artifact).exists(), "{kind} missing {artifact}");
        assert!(out_dir.join("manifest.toml").exists());
    }
    let rows = fs::read_to_string(dir.path().join("convergence_table/convergence.csv")).unwrap();
    assert_eq!(rows.lines().next().unwrap(), "n,delta,trials,nn_rate,vqe_rate");
    assert_eq!(rows.lines().count(), 3);
}
