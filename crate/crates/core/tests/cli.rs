use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use kacbath::harness::{parse_config, ExperimentKind};

fn kacbath(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_kacbath"));
    cmd.args(args);
    if let Some(t) = threads {
        cmd.env("KACBATH_THREADS", t);
    }
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn defaults_cover_every_experiment_and_parse_back() {
    let out = kacbath(&["defaults"], None);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for kind in ExperimentKind::ALL {
        assert!(text.contains(&format!("experiment = \"{kind}\"")), "{kind}");
    }
    let one = kacbath(&["defaults", "coupling_w2"], None);
    let cfg = parse_config(&String::from_utf8(one.stdout).unwrap()).unwrap();
    assert_eq!(cfg.experiment, ExperimentKind::CouplingW2);
    assert_eq!(kacbath(&["defaults", "nope"], None).status.code(), Some(1));
}

#[test]
fn validation_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let ok = write_config(dir.path(), "ok.toml", "experiment = \"moments\"\nseed = 3\n");
    assert_eq!(kacbath(&["validate", &ok], None).status.code(), Some(0));

    let bad = write_config(
        dir.path(),
        "bad.toml",
        "experiment = \"moments\"\nseed = 3\n[params]\nlambda = -1.0\n",
    );
    let out = kacbath(&["validate", &bad], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("params.lambda"));

    let typo = write_config(
        dir.path(),
        "typo.toml",
        "experiment = \"moments\"\nseed = 3\n[params]\nlamda = 1.0\n",
    );
    let out = kacbath(&["validate", &typo], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("did you mean `lambda`"));

    let unseeded = write_config(dir.path(), "unseeded.toml", "experiment = \"moments\"\n");
    assert_eq!(kacbath(&["validate", &unseeded], None).status.code(), Some(1));
    assert_eq!(kacbath(&["validate", "/does/not/exist.toml"], None).status.code(), Some(1));
    assert_eq!(kacbath(&["frobnicate"], None).status.code(), Some(1));
    assert_eq!(kacbath(&["run", &ok], Some("zero")).status.code(), Some(1));
}

#[test]
fn moments_run_is_reproducible_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let body = "experiment = \"moments\"\nseed = 11\nreplicas = 3000\nt_end = 4.0\nrecord_interval = 0.1\n";
    let cfg = write_config(dir.path(), "m.toml", body);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let out = kacbath(&["run", &cfg, "--output-dir", a.to_str().unwrap()], Some("1"));
    assert!(out.status.success(), "{}", stderr(&out));
    let out = kacbath(&["run", &cfg, "--output-dir", b.to_str().unwrap()], Some("3"));
    assert!(out.status.success(), "{}", stderr(&out));
    for file in ["moments.csv", "fits.csv"] {
        let x = fs::read(a.join(file)).unwrap();
        assert_eq!(x, fs::read(b.join(file)).unwrap(), "{file}");
        assert!(String::from_utf8(x).unwrap().lines().next().unwrap().contains(','));
    }
    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 11);
    assert_eq!(manifest["threads"], 1);
    assert_eq!(manifest["status"], "ok");
    assert_eq!(manifest["config"]["replicas"], 3000);
    let files: Vec<&str> = manifest["files"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(files.iter().filter(|f| **f == "manifest.json").count(), 1);
    let fits = fs::read_to_string(a.join("fits.csv")).unwrap();
    let energy = fits.lines().find(|l| l.starts_with("energy,")).unwrap();
    let rate: f64 = energy.split(',').nth(4).unwrap().parse().unwrap();
    assert!((rate - 0.5).abs() < 0.1, "{rate}");
}

#[test]
fn point_mass_reservoir_steady_state() {
    let dir = tempfile::tempdir().unwrap();
    let body = format!(
        "experiment = \"steady_state\"\nseed = 0\noutput_dir = \"{}\"\n[thermostat]\nkind = \"dirac_zero\"\n[solver]\nnodes_per_axis = 33\nn_theta = 64\npicard_tol = 1e-9\n",
        dir.path().join("ss").display()
    );
    let cfg = write_config(dir.path(), "ss.toml", &body);
    let out = kacbath(&["run", &cfg], None);
    assert!(out.status.success(), "{}", stderr(&out));
    let summary = fs::read_to_string(dir.path().join("ss/steady_state.csv")).unwrap();
    let get = |k: &str| -> f64 {
        summary
            .lines()
            .find_map(|l| l.strip_prefix(&format!("{k},")))
            .unwrap()
            .parse()
            .unwrap()
    };
    assert_eq!(get("converged"), 1.0);
    assert!(get("maxwellian_sup_error") < 1e-6);
    let grid = kacbath::fourier::read_snapshot(std::io::BufReader::new(
        fs::File::open(dir.path().join("ss/steady_state.grid")).unwrap(),
    ))
    .unwrap();
    assert!(grid.values().iter().all(|z| (z - 1.0).norm() < 1e-6));
}

#[test]
fn non_convergence_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let body = format!(
        "experiment = \"steady_state\"\nseed = 0\noutput_dir = \"{}\"\n[solver]\nnodes_per_axis = 33\nn_theta = 64\npicard_max_iter = 2\n",
        dir.path().join("nc").display()
    );
    let cfg = write_config(dir.path(), "nc.toml", &body);
    let out = kacbath(&["run", &cfg], None);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn failed_rate_assertion_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let body = format!(
        "experiment = \"moments\"\nseed = 5\nreplicas = 500\nt_end = 3.0\nrecord_interval = 0.1\nrate_tolerance = 1e-9\noutput_dir = \"{}\"\n[params]\nn_particles = 4\n",
        dir.path().join("m").display()
    );
    let cfg = write_config(dir.path(), "m.toml", &body);
    let out = kacbath(&["run", &cfg], None);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("m/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["status"], "assertion_failed");
    assert!(!manifest["assertion_failures"].as_array().unwrap().is_empty());
}

#[test]
fn coupling_run_fits_the_synchronous_rate() {
    let dir = tempfile::tempdir().unwrap();
    let body = format!(
        "experiment = \"coupling_w2\"\nseed = 2\nreplicas = 4000\noutput_dir = \"{}\"\n",
        dir.path().join("c").display()
    );
    let cfg = write_config(dir.path(), "c.toml", &body);
    let out = kacbath(&["run", &cfg], None);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("c/coupling.csv")).unwrap();
    assert!(csv.starts_with("time,delta_sq_mean,delta_sq_stderr,w2_upper_bound\n"));
    let fits = fs::read_to_string(dir.path().join("c/fits.csv")).unwrap();
    let row: Vec<&str> = fits.lines().nth(1).unwrap().split(',').collect();
    let (reference, rate): (f64, f64) = (row[3].parse().unwrap(), row[4].parse().unwrap());
    assert_eq!(reference, 0.5);
    assert!((rate - reference).abs() < 0.05 * reference, "{rate}");
}

#[test]
fn tensorization_table_holds() {
    let dir = tempfile::tempdir().unwrap();
    let body = format!(
        "experiment = \"tensorization\"\nseed = 9\nreplicas = 2000\noutput_dir = \"{}\"\n[solver]\nnodes_per_axis = 33\n",
        dir.path().join("t").display()
    );
    let cfg = write_config(dir.path(), "t.toml", &body);
    let out = kacbath(&["run", &cfg], None);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("t/tensorization.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "check,n_particles,value,reference,relation");
    assert_eq!(csv.lines().filter(|l| l.starts_with("gtw_tensor,")).count(), 2);
}
