use std::path::Path;
use std::process::{Command, Output};

use sfwm::config::bundled;
use sfwm::error::{exit, CliError};

fn sfwm(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sfwm"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("c.toml");
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn two_ring_noise_free_has_unit_visibility() {
    let d = tempfile::tempdir().unwrap();
    let o = sfwm(
        d.path(),
        &[
            "--config",
            "two_ring",
            "--grid",
            "65",
            "--span",
            "1",
            "fringe",
            "--noise-free",
        ],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&d.path().join("out/fringe.json"));
    for key in ["visibility_bunched", "visibility_anti_bunched"] {
        assert!(
            (v[key].as_f64().unwrap() - 1.0).abs() < 1e-9,
            "{key}: {}",
            v[key]
        );
    }
}

#[test]
fn missing_phase_is_a_config_error() {
    let d = tempfile::tempdir().unwrap();
    let text = bundled("two_ring")
        .unwrap()
        .replace("phase = \"phi\"\n", "");
    let c = write_config(d.path(), &text);
    let o = sfwm(d.path(), &["--config", &c, "fringe"]);
    assert_eq!(code(&o), i32::from(exit::CONFIG));
    assert!(stderr(&o).contains("phase"), "{}", stderr(&o));
}

#[test]
fn misplaced_field_is_located() {
    let d = tempfile::tempdir().unwrap();
    let text = bundled("two_ring")
        .unwrap()
        .replace("id = \"phi\"\n", "id = \"phi\"\nkappa = 0.5\n");
    let line = text.lines().position(|l| l == "kappa = 0.5").unwrap() + 1;
    let c = write_config(d.path(), &text);
    let o = sfwm(d.path(), &["--config", &c, "fringe"]);
    assert_eq!(code(&o), i32::from(exit::CONFIG));
    let err = stderr(&o);
    assert!(err.contains(&format!("c.toml:{line}:")), "{err}");
    assert!(err.contains("kappa"), "{err}");
}

#[test]
fn unknown_field_is_rejected() {
    let d = tempfile::tempdir().unwrap();
    let text = bundled("two_ring")
        .unwrap()
        .replace("[pump]\n", "[pump]\ncolour = 1\n");
    let c = write_config(d.path(), &text);
    let o = sfwm(d.path(), &["--config", &c, "fringe"]);
    assert_eq!(code(&o), i32::from(exit::CONFIG));
    assert!(stderr(&o).contains("colour"), "{}", stderr(&o));
}

#[test]
fn missing_config_file() {
    let d = tempfile::tempdir().unwrap();
    let o = sfwm(d.path(), &["--config", "nowhere.toml", "fringe"]);
    assert_eq!(code(&o), i32::from(exit::CONFIG));
}

#[test]
fn map_csv_has_axes() {
    let d = tempfile::tempdir().unwrap();
    let o = sfwm(d.path(), &["map"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for name in ["map_bunched.csv", "map_anti_bunched.csv"] {
        let text = std::fs::read_to_string(d.path().join("out").join(name)).unwrap();
        let rows: Vec<_> = text.lines().collect();
        assert_eq!(rows.len(), 42);
        assert!(rows.iter().all(|r| r.split(',').count() == 42));
        assert!(rows[0].starts_with("theta_rad\\phi_rad,"));
    }
}

#[test]
fn replay_reproduces_outputs() {
    let d = tempfile::tempdir().unwrap();
    let args = ["--config", "two_ring", "--grid", "65", "--span", "1"];
    let o = sfwm(
        d.path(),
        &[&args[..], &["--out", "a", "fringe", "--phi-steps", "16"]].concat(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = sfwm(d.path(), &["--out", "b", "replay", "a/manifest.json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for name in ["fringe.csv", "fringe.json", "manifest.json"] {
        let a = std::fs::read(d.path().join("a").join(name)).unwrap();
        let b = std::fs::read(d.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn validate_passes() {
    let d = tempfile::tempdir().unwrap();
    let o = sfwm(
        d.path(),
        &["validate", "--seeds", "10", "--oracle-grid", "17"],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(out.contains("PASS") && !out.contains("FAIL"), "{out}");
}

#[test]
fn waveguide_jsa_depends_on_frequency_sum() {
    let d = tempfile::tempdir().unwrap();
    let o = sfwm(d.path(), &["jsa", "--component", "input_routing"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let mut r =
        csv::Reader::from_path(d.path().join("out/jsa_input_routing_magnitude.csv")).unwrap();
    let m: Vec<Vec<f64>> = r
        .records()
        .map(|rec| {
            rec.unwrap()
                .iter()
                .skip(1)
                .map(|x| x.parse().unwrap())
                .collect()
        })
        .collect();
    let peak = m.iter().flatten().cloned().fold(0.0, f64::max);
    // Columns run up in idler frequency while rows run down in signal
    // frequency, so equal sums lie on j + k = const.
    for j in 0..m.len() - 1 {
        for k in 1..m[j].len() {
            assert!((m[j][k] - m[j + 1][k - 1]).abs() <= 1e-9 * peak);
        }
    }
}

#[test]
fn zero_pair_circuit_is_numerical() {
    let d = tempfile::tempdir().unwrap();
    let text = bundled("two_ring")
        .unwrap()
        .replace("effective_length_um = 2000.0", "effective_length_um = 0.0");
    let c = write_config(d.path(), &text);
    let o = sfwm(
        d.path(),
        &["--config", &c, "--grid", "65", "--span", "1", "fringe"],
    );
    assert_eq!(code(&o), i32::from(exit::NUMERICAL), "{}", stderr(&o));
}

#[test]
fn validation_failure_exit_code() {
    assert_eq!(
        CliError::Validation("x".into()).exit_code(),
        exit::VALIDATION
    );
}
