use std::path::Path;
use std::process::{Command, Output};

use rabi_core::cli::parse_config;
use rabi_core::params::{from_mhz, SystemParams};

fn rabi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rabi"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let k = header.iter().position(|h| *h == name).unwrap_or_else(|| panic!("no column {name}"));
    lines.map(|l| l.split(',').nth(k).unwrap().parse().unwrap()).collect()
}

const DECOUPLED: &str = "\
gamma_c = 10
gamma_at = 0.01
gamma_m = 0.001
omega_m = 1000
J = 0
g1 = 0
g_coll = 0
delta_L_prime = -100
delta_R_prime = 100
Delta_L = 10
Delta_R = 10
alpha = 1
";

#[test]
fn simulate_is_deterministic_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let o = rabi(&["simulate", "--model", "reduced", "--t-max", "3", "--out", path.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(stdout(&o).contains("model=reduced"));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert!(text.starts_with("t_us,re_b,im_b,"));
    assert!(!text.contains('\r'));
    let pop = column(&text, "pop_cL");
    assert_eq!(pop[0], 1.0);
    assert_eq!(pop.len(), 301);
}

#[test]
fn full_model_keeps_cavities_empty() {
    let o = rabi(&["simulate", "--t-max", "5", "--dt-out", "0.01"]);
    assert!(o.status.success());
    let csv = stdout(&o);
    let cl = column(&csv, "pop_cL");
    let cavity = column(&csv, "pop_aL")
        .into_iter()
        .chain(column(&csv, "pop_aR"))
        .fold(0.0, f64::max);
    let peak = cl.iter().cloned().fold(0.0, f64::max);
    assert_eq!(cl[0], 1.0);
    assert!(cavity < 0.02 * peak, "{cavity}");
    assert!(cl.iter().any(|&v| v < 0.2), "no oscillation");
}

#[test]
fn zero_initial_state_gives_zero_csv() {
    let o = rabi(&["simulate", "--model", "effective", "--t-max", "1", "--dt-out", "0.5", "--init", "cL=0"]);
    assert!(o.status.success());
    let csv = stdout(&o);
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    for line in csv.lines().skip(1) {
        for (name, v) in header.iter().zip(line.split(',')).skip(1) {
            let v: f64 = v.parse().unwrap();
            // the effective model has no cavity modes
            if name.starts_with("pop_a") {
                assert!(v.is_nan());
            } else {
                assert_eq!(v, 0.0, "{line}");
            }
        }
    }
}

#[test]
fn normalized_time_axis() {
    let o = rabi(&["simulate", "--model", "effective", "--t-max", "1", "--dt-out", "0.5", "--normalize-time"]);
    let t = column(&stdout(&o), "t_norm");
    assert!((t[2] - from_mhz(1.0)).abs() < 1e-12);
}

#[test]
fn dump_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    for preset in ["fig2", "case-one", "case-two"] {
        let dumped = stdout(&rabi(&["--preset", preset, "--dump-config"]));
        let path = write_config(dir.path(), "dump.cfg", &dumped);
        let again = stdout(&rabi(&["--config", &path, "--dump-config"]));
        assert_eq!(dumped, again);
    }
    let dumped = stdout(&rabi(&["--dump-config"]));
    assert_eq!(parse_config(&dumped).unwrap(), SystemParams::fig2());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad_key = write_config(dir.path(), "bad.cfg", &format!("{DECOUPLED}J_typo = 1\n"));
    let o = rabi(&["--config", &bad_key, "effective"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 13: unknown key 'J_typo'"));

    let bad_decay = write_config(dir.path(), "decay.cfg", &DECOUPLED.replace("gamma_c = 10", "gamma_c = 0"));
    assert_eq!(rabi(&["--config", &bad_decay, "effective"]).status.code(), Some(1));

    let unwritable = dir.path().join("missing").join("x.csv");
    let o = rabi(&["simulate", "--model", "effective", "--t-max", "0.1", "--out", unwritable.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    let asym = write_config(dir.path(), "asym.cfg", &DECOUPLED.replace("delta_R_prime = 100", "delta_R_prime = 120"));
    assert_eq!(rabi(&["--config", &asym, "simulate", "--model", "effective"]).status.code(), Some(1));
}

#[test]
fn effective_table_for_case_one() {
    let o = rabi(&["--preset", "case-one", "effective"]);
    let out = stdout(&o);
    let c_line = out.lines().find(|l| l.starts_with("C ")).unwrap();
    assert!(c_line.contains("-0.0785"), "{c_line}");
    assert!(out.contains("regime                       CaseI"));
}

#[test]
fn zero_tunnelling_gives_zero_coupling() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "j0.cfg", &DECOUPLED.replace("g_coll = 0", "g_coll = 10"));
    let out = stdout(&rabi(&["--config", &cfg, "effective", "--json"]));
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["effective"]["direct_coupling"].as_f64().unwrap().abs(), 0.0);
}

#[test]
fn sweep_tunnelling_peaks_at_stationary_point() {
    let o = rabi(&["sweep", "--var", "J", "--from", "0", "--to", "500", "--steps", "501", "--columns", "C"]);
    assert!(o.status.success());
    let csv = stdout(&o);
    let j = column(&csv, "J");
    let c: Vec<f64> = column(&csv, "C").into_iter().map(f64::abs).collect();
    let k = (0..c.len()).max_by(|&a, &b| c[a].total_cmp(&c[b])).unwrap();
    // d/dJ [J/(γ²/4 + δ'² + J²)] = 0 at J = √(γ²/4 + δ'²)
    let expected = (25.0f64 + 100.0 * 100.0).sqrt();
    assert!((j[k] - expected).abs() <= 1.0, "peak at {} vs {expected}", j[k]);
    assert!(c[..k].windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn sweep_alpha_is_linear() {
    let csv = stdout(&rabi(&["sweep", "--var", "alpha", "--from", "0", "--to", "4", "--steps", "5", "--columns", "G_eff_R"]));
    let g = column(&csv, "G_eff_R");
    for (k, v) in g.iter().enumerate() {
        assert!((v - k as f64 * g[1]).abs() <= 1e-12 * g[4].abs(), "{g:?}");
    }
}

#[test]
fn two_point_sweep() {
    let csv = stdout(&rabi(&["sweep", "--var", "g_coll", "--from", "1", "--to", "2", "--steps", "2"]));
    assert_eq!(csv.lines().count(), 3);
    assert_eq!(csv.lines().next().unwrap(), "g_coll,C,G_eff_R,G_bar_eff_R,Lambda,gamma_at_eff");
    let o = rabi(&["sweep", "--var", "g_coll", "--from", "1", "--to", "2", "--steps", "1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn decoupled_stability_prints_mode_frequencies() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "dec.cfg", DECOUPLED);
    let o = rabi(&["--config", &cfg, "stability"]);
    let out = stdout(&o);
    assert!(out.trim_end().ends_with("STABLE"));
    for needle in ["-5.000000", "-0.005000", "-0.000500", "+1000.000000i", "+100.000000i", "+10.000000i"] {
        assert!(out.contains(needle), "{needle} missing from\n{out}");
    }
}

#[test]
fn radiation_shift_scan_keeps_damping() {
    let out = stdout(&rabi(&["stability", "--r", "-20,0,35"]));
    let rows: Vec<&str> = out.lines().skip(2).take(3).collect();
    for row in rows {
        let fields: Vec<&str> = row.split(',').collect();
        assert!(fields[1].starts_with("-5.000000 "), "{row}");
        assert!(fields[2].starts_with("-5.000000 "), "{row}");
        assert_eq!(fields[5], "true");
    }
}

#[test]
fn stability_json() {
    let out = stdout(&rabi(&["stability", "--json"]));
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["verdict"], "STABLE");
    assert_eq!(doc["full"]["spectrum"].as_array().unwrap().len(), 10);
}
