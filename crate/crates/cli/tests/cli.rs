use std::fs;
use std::io::Cursor;
use std::path::Path;
use std::process::{Command, Output};

use thintube::inverse::{dominant_block, Block, Contributions, Event};
use thintube::io::{read_far_field, read_iteration_log};

fn thintube(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thintube")).args(args).env("THINTUBE_LOG", "quiet").output().expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn disk_tensor_is_printed() {
    let out = thintube(&["polarization", "1", "2.5", "disk"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let v: Vec<f64> = text.split_whitespace().map(|x| x.parse().unwrap()).collect();
    assert_eq!(v, vec![4.0 / 7.0, 0.0, 0.0, 4.0 / 7.0]);
}

#[test]
fn numeric_tensor_is_close_to_the_disk() {
    let out = thintube(&["polarization", "1", "2.5", "numeric", "--resolution", "160"]);
    assert!(out.status.success());
    let v: Vec<f64> = String::from_utf8(out.stdout).unwrap().split_whitespace().map(|x| x.parse().unwrap()).collect();
    assert!((v[0] - 4.0 / 7.0).abs() < 0.04 * 4.0 / 7.0);
    assert!(v[1].abs() < 1e-10);
}

#[test]
fn forward_header_carries_the_wavenumber() {
    let dir = tempfile::tempdir().unwrap();
    let ff = dir.path().join("ff.txt");
    let out = thintube(&["forward", "--curve", "helix", "--out", s(&ff)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (h, grid) = read_far_field(Cursor::new(fs::read(&ff).unwrap())).unwrap();
    assert!((h.k - 2.1).abs() < 0.01);
    assert_eq!(grid.len(), 180);
}

#[test]
fn zero_contrast_gives_zero_samples() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"material": {"eps_r": 1.0, "mu_r": 1.0}, "grid": 4}"#).unwrap();
    let ff = dir.path().join("ff.txt");
    assert!(thintube(&["forward", "--config", s(&cfg), "--curve", "figure", "--out", s(&ff)]).status.success());
    let (_, grid) = read_far_field(Cursor::new(fs::read(&ff).unwrap())).unwrap();
    assert!(grid.samples().unwrap().iter().all(|v| v.iter().all(|c| c.re == 0.0 && c.im == 0.0)));
}

#[test]
fn output_does_not_depend_on_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    assert!(thintube(&["--workers", "1", "forward", "--curve", "torus", "--out", s(&a)]).status.success());
    assert!(thintube(&["forward", "--curve", "torus", "--out", s(&b), "--workers", "3"]).status.success());
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let (na, nb) = (dir.path().join("na.txt"), dir.path().join("nb.txt"));
    assert!(thintube(&["noise", "--data", s(&a), "--level", "0.3", "--seed", "5", "--out", s(&na)]).status.success());
    assert!(thintube(&["noise", "--data", s(&b), "--level", "0.3", "--seed", "5", "--out", s(&nb)]).status.success());
    assert_eq!(fs::read(&na).unwrap(), fs::read(&nb).unwrap());
    assert_ne!(fs::read(&na).unwrap(), fs::read(&a).unwrap());
}

#[test]
fn reconstruct_noiseless_torus_stops_on_data() {
    let dir = tempfile::tempdir().unwrap();
    let ff = dir.path().join("torus.txt");
    assert!(thintube(&["forward", "--curve", "torus", "--out", s(&ff)]).status.success());
    let prefix = dir.path().join("run");
    let out = thintube(&["reconstruct", "--data", s(&ff), "--out", s(&prefix)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let log = read_iteration_log(Cursor::new(fs::read(dir.path().join("run.log.jsonl")).unwrap())).unwrap();
    let last = log.last().unwrap();
    assert_eq!(last.event, Event::Stop);
    let b = &last.blocks;
    let c = Contributions { data: b.data, curvature: b.curvature, length: b.length };
    assert_eq!(dominant_block(&c, 0.5), Block::Data);
    assert!(dir.path().join("run.curve.txt").exists());
}

#[test]
fn reconstruct_rejects_mismatched_data() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"grid": 3}"#).unwrap();
    let ff = dir.path().join("ff.txt");
    assert!(thintube(&["forward", "--config", s(&cfg), "--curve", "helix", "--out", s(&ff)]).status.success());
    let out = thintube(&["reconstruct", "--data", s(&ff), "--out", s(&dir.path().join("r"))]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn derivative_check_passes() {
    let out = thintube(&["check-derivatives", "--seed", "11"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8(out.stdout).unwrap().contains("pass"));
}

#[test]
fn convergence_series_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("conv.txt");
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"grid": 6}"#).unwrap();
    let out = thintube(&["convergence", "--config", s(&cfg), "--curve", "torus", "--out", s(&out_path)]);
    assert!(out.status.success());
    let text = fs::read_to_string(&out_path).unwrap();
    let values: Vec<f64> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split_whitespace().nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(values.len(), 4);
    assert!(values.windows(2).all(|w| w[1] < w[0]));
    assert!(text.contains("# slope"));
}

#[test]
fn bad_input_exits_with_two() {
    assert_eq!(thintube(&["forward", "--curve", "torus", "--out", "x", "--bogus"]).status.code(), Some(2));
    assert_eq!(thintube(&["forward", "--curve", "/nonexistent/curve", "--out", "x"]).status.code(), Some(2));
    assert_eq!(thintube(&["noise", "--data", "/nonexistent", "--level", "0.1", "--out", "x"]).status.code(), Some(2));
    assert_eq!(thintube(&["polarization", "1", "-2", "disk"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"grid": 10, "typo": 1}"#).unwrap();
    assert_eq!(thintube(&["check-derivatives", "--config", s(&cfg)]).status.code(), Some(2));
    let bad_log = Command::new(env!("CARGO_BIN_EXE_thintube"))
        .args(["polarization", "1", "2", "disk"])
        .env("THINTUBE_LOG", "loud")
        .output()
        .unwrap();
    assert_eq!(bad_log.status.code(), Some(2));
}

#[test]
fn help_lists_every_flag() {
    let top = String::from_utf8(thintube(&["--help"]).stdout).unwrap();
    assert!(top.contains("--workers"));
    for cmd in ["forward", "noise", "reconstruct", "check-derivatives", "polarization", "convergence"] {
        assert!(top.contains(cmd), "{cmd}");
    }
    let mut all = String::new();
    for cmd in ["forward", "noise", "reconstruct", "check-derivatives"] {
        all += &String::from_utf8(thintube(&[cmd, "--help"]).stdout).unwrap();
    }
    for flag in ["--config", "--curve", "--data", "--out", "--seed", "--level", "--workers"] {
        assert!(all.contains(flag), "{flag}");
    }
}
