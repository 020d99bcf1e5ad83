//! End-to-end tests of the `ciscat` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ciscat(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ciscat")).args(args).arg("--out").arg(out).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn csv_column(path: &Path, name: &str) -> Vec<f64> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(col).unwrap().parse().unwrap()).collect()
}

const SMALL_RUN: &str = "\
[run]
scenario = custom
task = propagate
beta = 1.0
n_steps = 60
snapshot_every = 20
[grid]
n_xi = 64
n_eta = 64
xi_min = -20.0
xi_max = 20.0
eta_min = -20.0
eta_max = 20.0
[model]
rho0 = 2.0
[packet]
xi0 = -11.0
sigma_long = 1.5
half_width = 4.0
rolloff = 2.0
";

#[test]
fn list_covers_every_figure() {
    let out = Command::new(env!("CARGO_BIN_EXE_ciscat")).arg("list").output().unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    for name in [
        "fig6_row3_right",
        "fig2_k10",
        "fig1a_green",
        "fig1b_blue",
        "fig1c_red",
        "fig1d_blue",
        "fig4_packet",
        "fig5_surfaces",
        "fig7_twoci",
    ] {
        assert!(text.lines().any(|l| l.split_whitespace().next() == Some(name)), "{name} missing");
    }
}

#[test]
fn wilson_presets_print_the_loop_value() {
    let dir = tempfile::tempdir().unwrap();
    let inner = ciscat(&["wilson", "--preset", "wilson_fig7_inner"], dir.path());
    assert!(inner.status.success());
    assert!(stdout(&inner).lines().any(|l| l == "wilson = -1.000000+0.000000i"), "{}", stdout(&inner));
    let outer = ciscat(&["wilson", "--preset", "wilson_fig7_outer"], dir.path());
    assert!(stdout(&outer).lines().any(|l| l == "wilson = 1.000000+0.000000i"), "{}", stdout(&outer));
    let re = csv_column(&dir.path().join("analysis/wilson.csv"), "re");
    assert!((re[0] - 1.0).abs() < 1e-6);
}

#[test]
fn polygon_wilson_loop_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("loop.ini");
    fs::write(&cfg, "[run]\nscenario = wilson_fig7_inner\n[analysis]\nloop_vertices = 1.5 -1; 1.5 1; 4 1; 4 -1\n")
        .unwrap();
    let o = ciscat(&["wilson", "--config", cfg.to_str().unwrap()], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("wilson = -1.000000+0.000000i"));
}

#[test]
fn low_energy_disk_overlaps_pure_ab() {
    let dir = tempfile::tempdir().unwrap();
    let o = ciscat(&["crosssection", "--preset", "fig1a_bluevsred"], dir.path());
    assert!(o.status.success());
    let path = dir.path().join("analysis/crosssection.csv");
    let theta = csv_column(&path, "theta");
    let dev = csv_column(&path, "relative_deviation");
    let worst = theta.iter().zip(&dev).filter(|(t, _)| t.abs() < 3.0).map(|(_, d)| *d).fold(0.0, f64::max);
    assert!(worst < 0.02, "{worst}");
}

#[test]
fn analytic_dump_feeds_the_dislocation_finder() {
    let dir = tempfile::tempdir().unwrap();
    let o = ciscat(&["crosssection", "--preset", "fig2_k1"], dir.path());
    assert!(o.status.success());
    let dump = dir.path().join("analysis/psi.field");
    let second = dir.path().join("second");
    let d = ciscat(&["dislocations", "--input", dump.to_str().unwrap()], &second);
    assert!(d.status.success(), "{}", String::from_utf8_lossy(&d.stderr));
    let xi = csv_column(&second.join("analysis/dislocations.csv"), "xi");
    let eta = csv_column(&second.join("analysis/dislocations.csv"), "eta");
    assert!(!xi.is_empty());
    // Every point lies on the nodal ray behind the disk.
    assert!(xi.iter().zip(&eta).all(|(x, y)| *x < 0.0 && y.abs() < 0.1));
}

#[test]
fn empty_config_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("empty.ini");
    fs::write(&cfg, "").unwrap();
    let o = ciscat(&["propagate", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err = fs::read_to_string(dir.path().join("error.json")).unwrap();
    assert!(err.contains("missing scenario"), "{err}");
}

#[test]
fn every_error_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.ini");
    fs::write(&cfg, "[run]\nscenario = fig6_row1_left\nbeta = -1\ncolour = red\n").unwrap();
    let o = ciscat(&["propagate", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("[run].beta") && err.contains("colour"), "{err}");
}

#[test]
fn preset_for_another_subcommand_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = ciscat(&["propagate", "--preset", "fig2_k10"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn propagation_bundle_is_deterministic_and_echo_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.ini");
    fs::write(&cfg, SMALL_RUN).unwrap();
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    for out in [&a, &b] {
        let o = ciscat(&["propagate", "--config", cfg.to_str().unwrap(), "--threads", "3"], out);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for name in ["config.echo.ini", "diagnostics.csv", "snap_0.field", "snap_3.field", "adiabatic_final.field"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
    let echo = a.join("config.echo.ini");
    let text = fs::read_to_string(&echo).unwrap();
    assert!(text.contains("n_steps = 60\n") && !text.contains("dtau = auto"));
    let o = ciscat(&["propagate", "--config", echo.to_str().unwrap()], &c);
    assert!(o.status.success());
    assert_eq!(fs::read(&echo).unwrap(), fs::read(c.join("config.echo.ini")).unwrap());
    assert_eq!(fs::read(a.join("adiabatic_final.field")).unwrap(), fs::read(c.join("adiabatic_final.field")).unwrap());
    let steps = csv_column(&a.join("diagnostics.csv"), "step");
    assert_eq!(steps, vec![0.0, 20.0, 40.0, 60.0]);
}

#[test]
fn surfaces_preset_writes_the_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = ciscat(&["propagate", "--preset", "fig5_surfaces"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let lower = csv_column(&dir.path().join("analysis/surfaces.csv"), "e_lower");
    let upper = csv_column(&dir.path().join("analysis/surfaces.csv"), "e_upper");
    assert_eq!(lower.len(), 256 * 256);
    assert!(lower.iter().zip(&upper).all(|(l, u)| l <= u));
}

#[test]
fn fig6_row1_left_stays_adiabatic() {
    let dir = tempfile::tempdir().unwrap();
    let o = ciscat(&["propagate", "--preset", "fig6_row1_left"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let excited = csv_column(&dir.path().join("diagnostics.csv"), "p_excited");
    assert!(*excited.last().unwrap() < 0.01);
    assert!(stdout(&o).contains("downstream dislocation: start="));
}
