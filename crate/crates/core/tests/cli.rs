use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn nsvlab(args: &[&str], env_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_nsvlab"));
    cmd.args(args).env("RUST_LOG", "warn").env_remove("NSVLAB_OUTPUT_DIR");
    if let Some(d) = env_dir {
        cmd.env("NSVLAB_OUTPUT_DIR", d);
    }
    cmd.output().expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn out_arg(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

#[test]
fn bounds_report_carries_printed_constants() {
    let dir = tempfile::tempdir().unwrap();
    let out = nsvlab(&["--output-dir", &out_arg(dir.path()), "bounds"], None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&dir.path().join("bounds.json"));
    assert_eq!(report["constants"]["log_coefficient_printed"], 7.46);
    assert_eq!(report["constants"]["log_shift_printed"], 5.74);
    let manifest = json(&dir.path().join("manifest.json"));
    assert_eq!(manifest["pass"], true);
    assert_eq!(manifest["complete"], true);
    let listed: Vec<&str> = manifest["artifacts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|a| a["path"].as_str().unwrap())
        .collect();
    for entry in fs::read_dir(dir.path()).unwrap() {
        let name = entry.unwrap().file_name().into_string().unwrap();
        assert!(name == "manifest.json" || listed.contains(&name.as_str()), "{name} not listed");
    }
}

#[test]
fn verify_spectrum_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = nsvlab(&["--output-dir", &out_arg(dir.path()), "verify", "spectrum", "--j-max", "100000"], None);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&dir.path().join("verify_spectrum.json"));
    assert_eq!(r["target"], "spectrum");
    assert_eq!(r["pass"], true);
    assert!(r["worst_ratio"].as_f64().unwrap() <= 1.0);
    assert!(r["range"].as_str().unwrap().contains("j <= 100000"));
}

#[test]
fn blow_up_exits_with_runtime_status() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(
        &cfg,
        "command = \"simulate\"\n[simulate]\nnu = 1e-4\nalpha = 0.0\nscheme = \"rk4\"\nresolution = 16\ndt = 5.0\nt_end = 500.0\ninitial = { kind = \"random\", norm = 100.0 }\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = nsvlab(&["--config", &out_arg(&cfg), "--output-dir", &out_arg(&out_dir), "simulate"], None);
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("diverged at step"), "{stderr}");
    let manifest = json(&out_dir.join("manifest.json"));
    assert_eq!(manifest["status"], "runtime-failure");
    assert_eq!(manifest["complete"], false);
}

#[test]
fn config_errors_exit_two_and_name_fields() {
    let dir = tempfile::tempdir().unwrap();
    let out = nsvlab(&["--output-dir", &out_arg(dir.path()), "bounds", "--alpha", "-1", "--nu", "0"], None);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("bounds.alpha") && stderr.contains("bounds.nu"), "{stderr}");

    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "command = \"verify\"\nspeed = 3\n[verify]\ntarget = \"spectrum\"\nfamilies = \"many\"\n").unwrap();
    let out = nsvlab(&["--config", &out_arg(&cfg), "verify", "spectrum"], None);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("speed") && stderr.contains("verify.families"), "{stderr}");
}

#[test]
fn flag_overrides_file_and_env_sets_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sim.toml");
    fs::write(
        &cfg,
        "command = \"simulate\"\noutput_dir = \"never-used\"\n[simulate]\nresolution = 16\ndt = 0.01\nt_end = 0.1\ninitial = { kind = \"shear\", amplitude = 1.0, wavenumber = 1 }\n",
    )
    .unwrap();
    let env_dir = dir.path().join("from-env");
    let out = nsvlab(&["--config", &out_arg(&cfg), "simulate", "--dt", "1e-3"], Some(&env_dir));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let written = fs::read_to_string(env_dir.join("config.toml")).unwrap();
    let table: toml::Table = written.parse().unwrap();
    assert_eq!(table["simulate"]["dt"].as_float(), Some(1e-3));
    let csv = fs::read_to_string(env_dir.join("diagnostics.csv")).unwrap();
    assert!(csv.starts_with("t,energy_l2,enstrophy,energy_alpha,avg_enstrophy,avg_grad_l1,grashof_G,grashof_calG\n"));
    assert!(env_dir.join("final_state.nsv").exists());

    let flag_dir = dir.path().join("from-flag");
    let out = nsvlab(
        &["--config", &out_arg(&cfg), "--output-dir", &out_arg(&flag_dir), "simulate"],
        Some(&env_dir.join("unused")),
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(flag_dir.join("manifest.json").exists());
    assert!(!env_dir.join("unused").exists());
}

#[test]
fn identical_configs_give_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, seed: &str| {
        let d = dir.path().join(name);
        let out = nsvlab(
            &[
                "--seed", seed, "--output-dir", &out_arg(&d), "verify", "lt", "--families", "6", "--n-max", "3",
                "--resolution", "16",
            ],
            None,
        );
        assert_eq!(out.status.code(), Some(0));
        d
    };
    let a = run("a", "4");
    let b = run("b", "4");
    let c = run("c", "5");
    let read = |d: &Path| fs::read(d.join("verify_lt.json")).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&c));
    assert_eq!(fs::read(a.join("verify_lt.csv")).unwrap(), fs::read(b.join("verify_lt.csv")).unwrap());
    let hash = |d: &Path| json(&d.join("manifest.json"))["config_hash"].clone();
    // the output directory is part of the configuration
    assert_ne!(hash(&a), hash(&b));
    assert_ne!(hash(&a), hash(&c));
}

#[test]
fn unwritable_artifact_is_left_partial() {
    let dir = tempfile::tempdir().unwrap();
    fs::create_dir(dir.path().join("bounds.json")).unwrap();
    let out = nsvlab(&["--output-dir", &out_arg(dir.path()), "bounds"], None);
    assert_eq!(out.status.code(), Some(3));
    let manifest = json(&dir.path().join("manifest.json"));
    assert_eq!(manifest["complete"], false);
    let art = manifest["artifacts"]
        .as_array()
        .unwrap()
        .iter()
        .find(|a| a["path"] == "bounds.json")
        .unwrap()
        .clone();
    assert_eq!(art["complete"], false);
    assert!(dir.path().join("bounds.json.partial").exists());
    assert!(dir.path().join("bounds.txt").exists());
}

#[test]
fn lyapunov_writes_trace_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = nsvlab(
        &[
            "--output-dir", &out_arg(dir.path()), "lyapunov", "--resolution", "16", "--dt", "0.01", "--t-end", "1",
            "--burn-in", "0.5", "--n", "4", "--frame", "eigenmodes",
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let s = json(&dir.path().join("lyapunov.json"));
    assert_eq!(s["n"], 4);
    assert!((s["q_hat"].as_f64().unwrap() + 2.0).abs() < 1e-10);
    assert_eq!(s["n_star"], 1);
    assert!(s["window"].as_f64().unwrap() > 0.0);
    let csv = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert!(csv.starts_with("t,trace_inst,trace_avg\n"));
}
