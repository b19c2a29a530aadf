use std::path::Path;
use std::process::{Command, Output};

use ssh2d::cli::CliError;

fn ssh2d(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ssh2d"))
        .args(args)
        .current_dir(cwd)
        .env_remove("SSH2D_OUT_ROOT")
        .output()
        .unwrap()
}

fn error_json(out: &Output) -> serde_json::Value {
    let text = String::from_utf8(out.stderr.clone()).unwrap();
    serde_json::from_str(text.trim()).unwrap_or_else(|e| panic!("{e}: {text}"))
}

const SMALL: &str = "N = 4\nM = 4\ngamma = 0.2\nJ = 0.5\n[ldos]\npoints = 11\n";

#[test]
fn usage_errors_exit_1() {
    let tmp = tempfile::tempdir().unwrap();
    for args in [&[][..], &["nonsense"], &["spectrum"], &["figure", "fig9"], &["sweep", "--workers", "0"]] {
        let out = ssh2d(args, tmp.path());
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert_eq!(error_json(&out)["error"]["kind"], "usage", "{args:?}");
    }
}

#[test]
fn config_errors_exit_2_with_key() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.toml");
    std::fs::write(&cfg, "N = 0\n").unwrap();
    let out = ssh2d(&["spectrum", "--config", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let e = error_json(&out);
    assert_eq!(e["error"]["key"], "N");
    assert!(e["error"]["message"].as_str().unwrap().contains("N ≥ 1"));

    std::fs::write(&cfg, "N = 4\nM = 4\nkappa = -1.0\n").unwrap();
    let out = ssh2d(&["ldos", "--config", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_json(&out)["error"]["key"], "kappa");
    let out = ssh2d(&["spectrum", "--config", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(0));

    std::fs::write(&cfg, "N = 4\nM = = 4\n").unwrap();
    let out = ssh2d(&["spectrum", "--config", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_json(&out)["error"]["line"], 2);

    std::fs::write(&cfg, "N = 3\nM = 3\n").unwrap();
    let out = ssh2d(&["fragments", "--config", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn filesystem_errors_exit_4() {
    let tmp = tempfile::tempdir().unwrap();
    let out = ssh2d(&["spectrum", "--config", "missing.toml"], tmp.path());
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(error_json(&out)["error"]["kind"], "io");

    let cfg = tmp.path().join("ok.toml");
    std::fs::write(&cfg, SMALL).unwrap();
    let blocker = tmp.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let out = ssh2d(
        &["spectrum", "--config", cfg.to_str().unwrap(), "--out", blocker.join("x").to_str().unwrap()],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn numerical_failures_map_to_3() {
    assert_eq!(CliError::from(ssh2d_core::Error::EigenConvergence).exit_code(), 3);
    assert_eq!(CliError::from(ssh2d_core::Error::NonFinite).exit_code(), 3);
    assert_eq!(CliError::from(ssh2d_core::Error::EmptyGrid).exit_code(), 2);
}

#[test]
fn commands_write_their_files() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("small.toml");
    std::fs::write(&cfg, SMALL).unwrap();
    let cfg = cfg.to_str().unwrap();
    let cases: [(&str, &[&str]); 6] = [
        ("spectrum", &["spectrum.csv", "summary.json", "fragments.json", "config.toml"]),
        ("ldos", &["ldos.csv", "dos.csv", "summary.json"]),
        ("profile", &["profiles/zero_energy.csv", "summary.json"]),
        ("fragments", &["fragments.json"]),
        ("sweep", &["sweep.csv", "overlay.csv", "summary.json"]),
        ("ensemble", &["ensemble.csv", "ensemble_states.csv", "summary.json"]),
    ];
    for (command, files) in cases {
        let out = ssh2d(&[command, "--config", cfg], tmp.path());
        assert!(out.status.success(), "{command}: {}", String::from_utf8_lossy(&out.stderr));
        let dir = tmp.path().join("runs").join(command);
        for f in files {
            assert!(dir.join(f).is_file(), "{command}: missing {f}");
        }
    }
    let ldos = std::fs::read_to_string(tmp.path().join("runs/ldos/ldos.csv")).unwrap();
    assert!(ldos.starts_with("energy,x,y,rho\n"));
}

#[test]
fn out_root_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("small.toml");
    std::fs::write(&cfg, SMALL).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_ssh2d"))
        .args(["spectrum", "--config", cfg.to_str().unwrap()])
        .current_dir(tmp.path())
        .env("SSH2D_OUT_ROOT", tmp.path().join("elsewhere"))
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(tmp.path().join("elsewhere/spectrum/spectrum.csv").is_file());
}

#[test]
fn seed_flag_overrides_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("small.toml");
    std::fs::write(&cfg, format!("seed = 1\n{SMALL}[ensemble]\nrealizations = 2\n")).unwrap();
    let out = ssh2d(&["ensemble", "--config", cfg.to_str().unwrap(), "--seed", "5"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("runs/ensemble/summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["seed"], 5);
    let seeds = summary["ensemble"]["seeds"].as_array().unwrap();
    assert_eq!(seeds[0], ssh2d_core::experiment::splitmix64(5, 0));
}
