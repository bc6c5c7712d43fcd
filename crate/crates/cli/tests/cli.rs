use std::fs;
use std::path::Path;
use std::process::Command;

use nozzleflow_cli::output::{read_rows, SNAPSHOT_HEADER};
use nozzleflow_cli::{cmd_run, parse_config, prepare};

const BIN: &str = env!("CARGO_BIN_EXE_nozzleflow");

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

const SHOCK_TUBE: &str = "gamma = 1.4\nT = 0.05\ndx = 0.04\nnozzle = constant\ninit = riemann:x0=0,rho_l=1,rho_r=0.5\n";

#[test]
fn run_writes_snapshots_and_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "a.cfg", &format!("{SHOCK_TUBE}snapshots = 0.02\n"));
    let out = dir.path().join("o");
    let st = Command::new(BIN).args(["run", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert_eq!(st.code(), Some(0));
    for f in ["snap_0.02.csv", "snap_0.05.csv", "diagnostics.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let snap = fs::read_to_string(out.join("snap_0.05.csv")).unwrap();
    assert_eq!(snap.lines().next(), Some(SNAPSHOT_HEADER));
    let diag = fs::read_to_string(out.join("diagnostics.csv")).unwrap();
    assert!(diag.starts_with("step,max_z_violation,max_w_violation,mass_defect,clip_budget"));
}

#[test]
fn snapshot_round_trips_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = parse_config(SHOCK_TUBE).unwrap();
    let s = cmd_run(&cfg, dir.path(), dir.path(), false).unwrap();
    let rows = read_rows(&fs::read_to_string(&s.snapshots[0]).unwrap()).unwrap();
    let state = &s.output.final_state;
    assert_eq!(rows.len(), state.u.len());
    for (r, u) in rows.iter().zip(&state.u) {
        assert_eq!(r[1].to_bits(), u.rho.to_bits());
        assert_eq!(r[2].to_bits(), u.m.to_bits());
    }
}

#[test]
fn zero_time_gives_the_averaged_data() {
    let dir = tempfile::tempdir().unwrap();
    let text = SHOCK_TUBE.replace("T = 0.05", "T = 0");
    let cfg = parse_config(&text).unwrap();
    let s = cmd_run(&cfg, dir.path(), dir.path(), false).unwrap();
    assert_eq!(s.snapshots.len(), 1);
    assert_eq!(s.steps, 0);
    let p = prepare(&cfg, cfg.dx, dir.path(), false).unwrap();
    let rows = read_rows(&fs::read_to_string(&s.snapshots[0]).unwrap()).unwrap();
    for (r, u) in rows.iter().zip(&p.init.u) {
        assert_eq!((r[1], r[2]), (u.rho, u.m));
    }
}

#[test]
fn reruns_are_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let text = "gamma = 1.4\nT = 0.05\ndx = 0.04\nnozzle = laval:h=2\ninit = riemann:x0=-0.75,rho_l=2,v_l=0,rho_r=0.2,v_r=1\n";
    let cfg = write(dir.path(), "l.cfg", text);
    let mut files = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("o{k}"));
        let st = Command::new(BIN).args(["run", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
        assert_eq!(st.code(), Some(0));
        files.push((fs::read(out.join("snap_0.05.csv")).unwrap(), fs::read(out.join("diagnostics.csv")).unwrap()));
    }
    assert!(files[0] == files[1]);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.cfg", "gamma = 1.4\nT = 0.1\ndx = 0.02\ninit = constant:rho=1\nalpha = 0.95\n");
    let o = Command::new(BIN).args(["validate", "--config"]).arg(&bad).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 5"));

    let steep = write(dir.path(), "steep.cfg", "gamma = 1.4\nT = 0.01\ndx = 0.02\nnozzle = laval:h=8\ninit = constant:rho=1\n");
    let o = Command::new(BIN).args(["run", "--config"]).arg(&steep).arg("--out").arg(dir.path().join("s")).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--force"));
    let o = Command::new(BIN)
        .args(["run", "--force", "--config"])
        .arg(&steep)
        .arg("--out")
        .arg(dir.path().join("s"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));

    // a one-step Newton budget cannot converge the jump solves
    let tight = write(dir.path(), "tight.cfg", &format!("{}newton_max_iter = 1\n", SHOCK_TUBE.replace("constant\n", "laval:h=2\n")));
    let o = Command::new(BIN).args(["run", "--config"]).arg(&tight).arg("--out").arg(dir.path().join("t")).output().unwrap();
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("t/diagnostics.csv").exists());

    let o = Command::new(BIN).args(["run", "--config"]).arg(dir.path().join("missing.cfg")).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn validate_constant_nozzle_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "a.cfg", SHOCK_TUBE);
    let o = Command::new(BIN).args(["validate", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let sigma: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("sigma = "))
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert!(sigma > 0.0 && sigma < 1.0);
    assert!(text.contains("PASS"));
}

#[test]
fn riemann_equal_states_are_constant() {
    let o = Command::new(BIN)
        .args(["riemann", "--left", "0.8,-0.3", "--right", "0.8,-0.3", "--samples", "7"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let rows = read_rows(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert_eq!(rows.len(), 7);
    for r in &rows {
        assert_eq!(&r[1..], &rows[0][1..]);
    }
    let o = Command::new(BIN).args(["riemann", "--left", "1", "--right", "1,0"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn tabulated_inputs_resolve_against_the_config() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "u0.txt", "# x rho v\n-1 1 0\n0 1 0\n0.0001 0.5 0\n1 0.5 0\n");
    write(dir.path(), "area.txt", "-1 1\n-0.5 1\n0 0.9\n0.5 1\n1 1\n");
    let cfg = write(
        dir.path(),
        "t.cfg",
        "gamma = 1.4\nT = 0.02\ndx = 0.04\nnozzle = table:area.txt\ninit = table:u0.txt\n",
    );
    let o = Command::new(BIN).args(["run", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("out/snap_0.02.csv").exists());
}
