use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_adamslab"))
        .args(args)
        .output()
        .unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("adamslab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn value(table: &str, name: &str) -> f64 {
    table
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{name},")))
        .unwrap_or_else(|| panic!("no row {name}"))
        .parse()
        .unwrap()
}

#[test]
fn constants_table() {
    let path = scratch("constants.csv");
    let o = run(&[
        "constants",
        "vartheta=7",
        "alpha0=1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# adamslab constants alpha0=1 vartheta=7\nname,value\n"));
    assert_eq!(value(&text, "p_star"), 6.0);
    assert_eq!(value(&text, "j0"), 3.0);
    let beta = 32.0 * std::f64::consts::PI.powi(2);
    assert!((value(&text, "beta_n2") - beta).abs() < 1e-9 * beta);
    assert!((value(&text, "c0") - 7.623953090908028).abs() < 1e-9);
}

#[test]
fn config_file_then_tokens_then_flags() {
    let cfg = scratch("run.cfg");
    std::fs::write(&cfg, "# six dimensions\nn=6\np = 2\n").unwrap();
    let o = run(&[
        "constants",
        "--config",
        cfg.to_str().unwrap(),
        "p=1.5",
        "--gamma",
        "2",
    ]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("# adamslab constants gamma=2 n=6 p=1.5"));
    let beta = value(&text, "beta_n2");
    assert!((value(&text, "beta_gamma") - beta * (1.0 - 2.0 / 6.0)).abs() < 1e-9 * beta);
}

#[test]
fn adams_probe_writes_a_table_and_trend() {
    let path = scratch("adams.csv");
    let o = run(&[
        "adams-probe",
        "kgrid=1e3,1e4,1e5",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines().skip(1);
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header[0], "param");
    assert_eq!(lines.count(), 3);
    let log = String::from_utf8(o.stderr).unwrap();
    assert!(log.contains("growth=") && log.contains("strictly_increasing="));
}

#[test]
fn selftest_passes() {
    let o = run(&["rearrange-selftest", "trials=200", "--seed", "3"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("trials=200") && text.contains("passed=true"));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["constants", "bogus=1"]).status.code(), Some(1));
    assert_eq!(run(&["constants", "n=abc"]).status.code(), Some(1));
    assert_eq!(run(&["constants", "vartheta=7"]).status.code(), Some(1));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    let o = run(&["solve", "lambda=1e-12", "nodes=256"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().starts_with("error:"));
}

#[test]
fn solve_record_and_profile() {
    let path = scratch("solve.csv");
    let o = run(&["solve", "--nodes", "512", "--out", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rec = String::from_utf8(o.stdout).unwrap();
    let energy: f64 = rec
        .lines()
        .find_map(|l| l.strip_prefix("energy="))
        .unwrap()
        .parse()
        .unwrap();
    assert!(energy > 0.0 && energy < 7.623953090908028);
    assert!(rec.contains("norm_bound_ok=true"));
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().nth(1), Some("r,u,lap_u"));
    assert_eq!(text.lines().count(), 2 + 512);
}
