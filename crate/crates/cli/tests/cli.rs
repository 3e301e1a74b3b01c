use std::path::Path;
use std::process::{Command, Output};

use mhdrelax::fields::Snapshot;

const TG: &str = r#"
[grid]
n = 16
[params]
nu = 1.0
eta = 0.1
[time]
dt = 1e-3
t_end = 0.02
[output]
cadence = 0.01
"#;

fn mhdrelax(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mhdrelax"))
        .args(args)
        .env("MHDRELAX_THREADS", "1")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("tg.toml");
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn read(p: impl AsRef<Path>) -> String {
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn run_writes_ledger_and_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), TG);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for d in [&a, &b] {
        let o = mhdrelax(&["run", "--config", &cfg, "--output-dir", d.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let ledger = read(a.join("ledger.csv"));
    assert!(ledger.starts_with("t,energy_B,dissipation_u,dissipation_B,balance_residual,max_u,dt\n"));
    assert_eq!(ledger.lines().count(), 22);
    for f in ["ledger.csv", "report.csv", "verdict.txt", "config.toml"] {
        assert_eq!(read(a.join(f)), read(b.join(f)), "{f} differs between runs");
    }
    assert!(read(a.join("meta.toml")).contains("timestamp = \""));
    assert!(!ledger.contains('T') && !ledger.contains(':'));
    assert_eq!(a.join("snapshots/ledger").read_dir().unwrap().count(), 3);
}

#[test]
fn missing_nu_is_named() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &TG.replace("nu = 1.0", ""));
    let o = mhdrelax(&["run", "--config", &cfg, "--output-dir", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("`params.nu`"));
    assert!(!tmp.path().join("o").exists());
}

#[test]
fn set_override_is_echoed() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), TG);
    let out = tmp.path().join("o");
    let o = mhdrelax(&["run", "--config", &cfg, "--set", "time.dt=1e-2", "--output-dir", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(read(out.join("config.toml")).contains("\"time.dt\" = 0.01\n"));
    // the echoed config is itself a valid config
    let again = tmp.path().join("again");
    let echo = out.join("config.toml");
    let o = mhdrelax(&["run", "--config", echo.to_str().unwrap(), "--output-dir", again.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read(out.join("ledger.csv")), read(again.join("ledger.csv")));
}

#[test]
fn report_reevaluates_and_detects_tampering() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), TG);
    let out = tmp.path().join("o");
    assert_eq!(code(&mhdrelax(&["run", "--config", &cfg, "--output-dir", out.to_str().unwrap()])), 0);
    let o = mhdrelax(&["report", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("energy_budget_max_residual"));
    let report = read(out.join("report.csv"));
    let tampered: String = report
        .lines()
        .map(|l| if l.starts_with("balance_residual,3,") { "balance_residual,3,0.5".to_string() } else { l.to_string() })
        .collect::<Vec<_>>()
        .join("\n");
    std::fs::write(out.join("report.csv"), tampered).unwrap();
    assert_eq!(code(&mhdrelax(&["report", out.to_str().unwrap()])), 2);
    assert_eq!(code(&mhdrelax(&["report", tmp.path().join("missing").to_str().unwrap()])), 1);
}

#[test]
fn verify_lorentz_writes_one_csv_per_inequality() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("v");
    let o = mhdrelax(&["verify", "--suite", "lorentz", "--seeds", "0..9", "--set", "grid.n=16", "--output-dir", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csvs: Vec<_> = out.read_dir().unwrap().filter_map(|e| e.ok()).filter(|e| e.path().extension().is_some_and(|x| x == "csv")).collect();
    assert_eq!(csvs.len(), 9);
    for e in csvs {
        let text = read(e.path());
        assert!(text.starts_with("seed,exponent,lhs,rhs,ratio\n"));
        assert_eq!(text.lines().count(), 11);
    }
}

#[test]
fn verify_stokes_checks_greens_bound() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("v");
    let o = mhdrelax(&["verify", "--suite", "stokes", "--seeds", "0..1", "--set", "grid.n=16", "--output-dir", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let g = read(out.join("greens_bound.csv"));
    assert!(g.starts_with("index,nu,x,y,lhs,rhs,ratio\n"));
    assert_eq!(g.lines().count(), 30_001);
    assert!(String::from_utf8_lossy(&o.stdout).contains("0 violations"));
    assert_eq!(code(&mhdrelax(&["report", out.to_str().unwrap()])), 0);
}

#[test]
fn unknown_suite_and_bad_threads_are_errors() {
    assert_eq!(code(&mhdrelax(&["verify", "--suite", "bogus"])), 1);
    assert_eq!(code(&mhdrelax(&["frobnicate"])), 1);
    let o = Command::new(env!("CARGO_BIN_EXE_mhdrelax"))
        .args(["verify", "--suite", "lorentz"])
        .env("MHDRELAX_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
}

#[test]
fn stokes_solves_periodic_and_free_space_snapshots() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), TG);
    let run = tmp.path().join("run");
    assert_eq!(code(&mhdrelax(&["run", "--config", &cfg, "--output-dir", run.to_str().unwrap()])), 0);
    let snap = run.join("snapshots/ledger/b_00000000.smhd");
    let out = tmp.path().join("s");
    let o = mhdrelax(&["stokes", snap.to_str().unwrap(), "--output-dir", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let u = Snapshot::read(out.join("velocity.smhd")).unwrap();
    assert_eq!((u.n, u.components.len(), u.box_size), (16, 2, None));

    let m = 16;
    let side = 2.0;
    let h = side / m as f64;
    let comp = |f: &dyn Fn(f64, f64) -> f64| -> Vec<f64> {
        (0..m * m)
            .map(|i| {
                let (x, y) = (-1.0 + h * (0.5 + (i % m) as f64), -1.0 + h * (0.5 + (i / m) as f64));
                f(x, y)
            })
            .collect()
    };
    let bump = |x: f64, y: f64| (1.0 - (x * x + y * y) / 0.25).max(0.0).powi(3);
    let free = Snapshot {
        n: m,
        t: 0.0,
        components: vec![comp(&|x, y| y * bump(x, y)), comp(&|x, y| -x * bump(x, y))],
        box_size: Some(side),
    };
    let fpath = tmp.path().join("free.smhd");
    free.write(&fpath).unwrap();
    let out = tmp.path().join("f");
    let o = mhdrelax(&["stokes", fpath.to_str().unwrap(), "--set", "params.nu=2", "--output-dir", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let u = Snapshot::read(out.join("velocity.smhd")).unwrap();
    assert_eq!(u.box_size, Some(side));
    assert!(u.components.iter().flatten().all(|v| v.is_finite()));
}
