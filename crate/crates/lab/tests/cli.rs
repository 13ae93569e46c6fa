use std::path::Path;
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_kolmo-lab");

fn run(subcommand: &str, config: Option<&str>, dir: &Path) -> (i32, String) {
    let mut cmd = Command::new(BIN);
    cmd.arg(subcommand).arg("--out").arg(dir.join("out"));
    if let Some(text) = config {
        let path = dir.join("config.toml");
        std::fs::write(&path, text).unwrap();
        cmd.arg("--config").arg(path);
    }
    let output = cmd.output().unwrap();
    let text = String::from_utf8_lossy(&output.stdout).into_owned() + &String::from_utf8_lossy(&output.stderr);
    (output.status.code().unwrap(), text)
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(i).unwrap().to_string()).collect()
}

#[test]
fn empty_time_set_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = run("telescope", Some("kind = \"telescope\"\n[time]\nE = []\n"), dir.path());
    assert_eq!(code, 2, "{text}");
    assert!(text.contains("time.E"), "{text}");
}

#[test]
fn unknown_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = run("thickness", Some("kind = \"thickness\"\nsede = 4\n"), dir.path());
    assert_eq!(code, 2, "{text}");
}

#[test]
fn kind_mismatch_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = run("propagate", Some("kind = \"thickness\"\n"), dir.path());
    assert_eq!(code, 2);
}

#[test]
fn missing_config_file_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let output =
        Command::new(BIN).args(["thickness", "--config"]).arg(dir.path().join("absent.toml")).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn decay_preset_has_no_violations() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = run("decay-check", None, dir.path());
    assert_eq!(code, 0, "{text}");
    let csv = std::fs::read_to_string(dir.path().join("out/decay.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 5 * 100);
    assert!(column(&csv, "violation").iter().all(|v| v == "false"));
    assert!(dir.path().join("out/manifest.toml").exists());
}

#[test]
fn inflated_decay_rate_is_reported_with_a_witness() {
    let dir = tempfile::tempdir().unwrap();
    let config = "kind = \"decay-check\"\n[time]\nT = [1.0]\nN = [4.0]\n[constants]\nc_exponent = 5.0\n";
    let (code, text) = run("decay-check", Some(config), dir.path());
    assert_eq!(code, 4, "{text}");
    assert!(text.contains("violation"), "{text}");
}

#[test]
fn full_space_interpolation_holds() {
    let dir = tempfile::tempdir().unwrap();
    let config = "kind = \"interp-verify\"\n[data]\nsource = \"random\"\nsets = 2\nterms = 2\nd = 1\n\
                  [set]\nkind = \"full_space\"\n[constants]\nc1 = 0.0\n[time]\nT = [0.5, 2.0]\nalpha = [0.5]\n";
    let (code, text) = run("interp-verify", Some(config), dir.path());
    assert_eq!(code, 0, "{text}");
    let csv = std::fs::read_to_string(dir.path().join("out/interp.csv")).unwrap();
    for c in column(&csv, "observed_constant") {
        assert!(c.parse::<f64>().unwrap() <= 0.0, "{c}");
    }
    assert!(column(&csv, "holds").iter().all(|v| v == "true"));
}

#[test]
fn boundary_guard_trip_is_a_numerical_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = "kind = \"propagate\"\n[grid]\nd = 1\npoints = 32\nhalf_width = 1.5\n[time]\nT = [1.0]\n";
    let (code, text) = run("propagate", Some(config), dir.path());
    assert_eq!(code, 3, "{text}");
}

#[test]
fn preset_subcommand_prints_parseable_configs() {
    for kind in ["propagate", "decay-check", "thickness", "spectral-fit", "interp-verify", "telescope"] {
        let output = Command::new(BIN).args(["preset", kind]).output().unwrap();
        assert!(output.status.success());
        let text = String::from_utf8(output.stdout).unwrap();
        assert!(kolmo_lab::ExperimentConfig::from_toml(&text).is_ok(), "{kind}");
    }
    assert_eq!(Command::new(BIN).args(["preset", "nope"]).output().unwrap().status.code(), Some(2));
}
