use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use timeleak::io::Table;

fn timeleak(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_timeleak"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn ok(args: &[&str], out: &Path) {
    let o = timeleak(args, out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn figure_fig1_writes_density_and_staircases() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["figure", "--figure", "fig1"], dir.path());
    let t = Table::read(&dir.path().join("fig1.csv")).unwrap();
    assert_eq!(t.header, ["t_ps", "density_per_ps", "binned_500ps", "binned_1000ps"]);
    let ts = t.column("t_ps").unwrap();
    let dt = ts[1] - ts[0];
    for col in ["density_per_ps", "binned_500ps", "binned_1000ps"] {
        let mass: f64 = t.column(col).unwrap().iter().sum::<f64>() * dt;
        assert!((mass - 1.0).abs() < 1e-9, "{col}: {mass}");
    }
    let manifest = fs::read_to_string(dir.path().join("manifest.csv")).unwrap();
    assert!(manifest.contains("tool_version,") && manifest.contains("figure,fig1"));
}

#[test]
fn zero_delay_sweep_is_all_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# matched detectors\nsubcommand = sweep\ndelta_t0_ps = 0\naxis1 = bin_width\naxis1_values = 1, 100:2000:100\n").unwrap();
    ok(&["sweep", "--config", cfg.to_str().unwrap()], dir.path());
    let t = Table::read(&dir.path().join("sweep.csv")).unwrap();
    assert_eq!(t.header, ["bin_width_ps", "mi_bits"]);
    assert_eq!(t.rows.len(), 21);
    assert!(t.column("mi_bits").unwrap().iter().all(|m| m.abs() <= 1e-9));
}

#[test]
fn simulate_is_reproducible() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["simulate", "--n_events", "1000", "--seed", "42", "--bootstrap", "20"];
    ok(&args, a.path());
    ok(&args, b.path());
    for f in ["events.csv", "summary.csv", "manifest.csv"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn compensate_reports_the_offset() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["compensate", "--n_coincidences", "50000", "--bootstrap", "10"], dir.path());
    let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    let get = |key: &str| -> f64 {
        summary
            .lines()
            .find_map(|l| l.strip_prefix(&format!("{key},")))
            .unwrap()
            .parse()
            .unwrap()
    };
    assert!((get("delta_before_ps") + 350.0).abs() <= 10.0_f64.max(3.0 * get("confidence_before_ps")));
    assert!(get("delta_after_ps").abs() <= 10.0);
    assert!(get("mi_after_bits") < get("mi_before_bits"));
    for f in ["correlogram_plus_before.csv", "correlogram_minus.csv", "correlogram_plus_after.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "bin_width_ps = 500\naxis1 = phase\naxis1_values = 0,100\n").unwrap();
    ok(&["sweep", "--config", cfg.to_str().unwrap(), "--bin_width_ps", "1000"], dir.path());
    let manifest = fs::read_to_string(dir.path().join("manifest.csv")).unwrap();
    assert!(manifest.lines().any(|l| l == "bin_width_ps,1000"));
}

#[test]
fn invalid_input_fails_with_the_key_named() {
    let dir = tempfile::tempdir().unwrap();
    let o = timeleak(&["sweep", "--tau_e_ps", "-1"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("tau_e_ps"));

    let o = timeleak(&["sweep", "--no_such_key", "1"], dir.path());
    assert!(String::from_utf8_lossy(&o.stderr).contains("no_such_key"));

    let o = Command::new(env!("CARGO_BIN_EXE_timeleak")).arg("sweep").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}
