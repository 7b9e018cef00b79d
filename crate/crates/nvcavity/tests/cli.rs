//! Command-line interface contract tests: exit codes, validation reporting,
//! and error messages that name the offending path.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nvcavity"))
}

#[test]
fn validate_reports_every_violation_and_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(
        &cfg,
        "[cavity]\nQ = -3.0\npolarization = \"TX\"\n[ensemble]\ndepth_sigma = 0.0\n",
    )
    .unwrap();
    let out = bin().args(["validate", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("cavity.Q"), "{stderr}");
    assert!(stderr.contains("cavity.polarization"), "{stderr}");
    assert!(stderr.contains("ensemble.depth_sigma"), "{stderr}");
}

#[test]
fn validate_accepts_a_good_config_with_exit_0() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("ok.toml");
    std::fs::write(&cfg, "[cavity]\nQ = 4000.0\n").unwrap();
    let out = bin().args(["validate", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn missing_config_file_exits_4_naming_the_path() {
    let out = bin()
        .args(["validate", "--config", "/nonexistent/nowhere.toml"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("/nonexistent/nowhere.toml"), "{stderr}");
}

#[test]
fn missing_field_file_fails_validation_naming_the_key_and_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[cavity]\nfield_file = \"/no/such/field.grid\"\n").unwrap();
    let out = bin()
        .args(["ensemble", "--config"])
        .arg(&cfg)
        .args(["--out"])
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("cavity.field_file"), "{stderr}");
    assert!(stderr.contains("/no/such/field.grid"), "{stderr}");
}

#[test]
fn missing_distribution_input_exits_4_naming_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[decay]\ndistribution_file = \"/no/such/table.csv\"\n").unwrap();
    let out = bin()
        .args(["decay", "--config"])
        .arg(&cfg)
        .args(["--out"])
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("/no/such/table.csv"), "{stderr}");
}

#[test]
fn unknown_config_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("typo.toml");
    std::fs::write(&cfg, "[cavity]\nquality = 3500.0\n").unwrap();
    let out = bin().args(["validate", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("quality"));
}

#[test]
fn seed_override_changes_sampling() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[ensemble]\nsample_count = 2000\n").unwrap();
    for (out_dir, seed) in [("s1", "1"), ("s2", "2")] {
        let status = bin()
            .args(["ensemble", "--config"])
            .arg(&cfg)
            .args(["--out"])
            .arg(dir.path().join(out_dir))
            .args(["--seed", seed, "--quiet"])
            .status()
            .unwrap();
        assert!(status.success());
    }
    let a = std::fs::read(dir.path().join("s1/distribution.csv")).unwrap();
    let b = std::fs::read(dir.path().join("s2/distribution.csv")).unwrap();
    assert_ne!(a, b, "different seeds must sample different ensembles");
}

#[test]
fn decay_roundtrips_the_ensemble_distribution() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[ensemble]\nsample_count = 2000\n").unwrap();
    let ens_out = dir.path().join("ens");
    let status = bin()
        .args(["ensemble", "--config"])
        .arg(&cfg)
        .args(["--out"])
        .arg(&ens_out)
        .arg("--quiet")
        .status()
        .unwrap();
    assert!(status.success());

    let cfg2 = dir.path().join("decay.toml");
    std::fs::write(
        &cfg2,
        format!(
            "[ensemble]\nsample_count = 2000\n[decay]\ndistribution_file = \"{}\"\n",
            ens_out.join("distribution.csv").display()
        ),
    )
    .unwrap();
    let dec_out = dir.path().join("dec");
    let status = bin()
        .args(["decay", "--config"])
        .arg(&cfg2)
        .args(["--out"])
        .arg(&dec_out)
        .arg("--quiet")
        .status()
        .unwrap();
    assert!(status.success());

    // identical fit numbers from the re-read table
    let strip = |p: &std::path::Path| -> String {
        std::fs::read_to_string(p)
            .unwrap()
            .lines()
            .filter(|l| {
                ["mean_purcell", "tau_ns", "gamma_per_ns", "rms_log_residual"]
                    .iter()
                    .any(|k| l.starts_with(k))
            })
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(
        strip(&ens_out.join("fit_report.txt")),
        strip(&dec_out.join("fit_report.txt"))
    );
}
