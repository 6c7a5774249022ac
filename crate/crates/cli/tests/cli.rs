use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use gsv_core::validation::sv_exact;

fn gsv(mode: &str, config: &str, dir: &Path, extra: &[&str]) -> Output {
    let path = dir.join("config.toml");
    fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_gsv"))
        .arg(mode)
        .arg("--config")
        .arg(&path)
        .arg("--out")
        .arg(dir.join("out"))
        .args(extra)
        .output()
        .unwrap()
}

fn csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, rows)
}

fn column(path: &Path, name: &str) -> Vec<f64> {
    let (header, rows) = csv(path);
    let k = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[k].parse().unwrap()).collect()
}

fn riemann_config(
    g_mod: f64,
    zeta: f64,
    left: (f64, f64),
    right: (f64, f64),
    sample: &str,
) -> String {
    format!(
        "[params]\ng = 9.81\nG = {g_mod}\nzeta = {zeta}\n\n\
         [left]\nh = {}\nu = {}\nsxx = 1.0\nszz = 1.0\n\n\
         [right]\nh = {}\nu = {}\nsxx = 1.0\nszz = 1.0\n\n\
         [sample]\n{sample}\n",
        left.0, left.1, right.0, right.1
    )
}

const SAMPLE: &str = "xi_min = -8.0\nxi_max = 8.0\npoints = 161";

#[test]
fn equal_states_give_three_trivial_waves() {
    let dir = tempfile::tempdir().unwrap();
    let out = gsv(
        "riemann",
        &riemann_config(1.0, 0.25, (1.0, 0.5), (1.0, 0.5), SAMPLE),
        dir.path(),
        &[],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let trivial = column(&dir.path().join("out/waves.csv"), "trivial");
    assert_eq!(trivial, vec![1.0, 1.0, 1.0]);
}

#[test]
fn saint_venant_profile_matches_the_classical_solution() {
    let dir = tempfile::tempdir().unwrap();
    let out = gsv(
        "riemann",
        &riemann_config(0.0, 0.25, (2.0, 0.0), (1.0, 0.0), SAMPLE),
        dir.path(),
        &[],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let profile = dir.path().join("out/profile.csv");
    let (header, _) = csv(&profile);
    assert_eq!(header, ["xi", "h", "u", "sxx", "szz", "P", "F"]);
    let oracle = sv_exact(2.0, 0.0, 1.0, 0.0, 9.81).unwrap();
    let xi = column(&profile, "xi");
    let h = column(&profile, "h");
    let u = column(&profile, "u");
    for k in 0..xi.len() {
        let (he, ue) = oracle.sample(xi[k]);
        assert!((h[k] - he).abs() < 1e-8, "xi={} h={} vs {he}", xi[k], h[k]);
        assert!((u[k] - ue).abs() < 1e-8, "xi={} u={} vs {ue}", xi[k], u[k]);
    }
}

#[test]
fn malformed_sample_grid_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = riemann_config(
        1.0,
        0.25,
        (2.0, 0.0),
        (1.0, 0.0),
        "xi_min = 1.0\nxi_max = -1.0\npoints = 10",
    );
    let out = gsv("riemann", &cfg, dir.path(), &[]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("xi_min < xi_max"));
}

#[test]
fn zeta_above_half_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = gsv(
        "riemann",
        &riemann_config(1.0, 0.7, (2.0, 0.0), (1.0, 0.0), SAMPLE),
        dir.path(),
        &[],
    );
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("zeta <= 1/2"));
}

#[test]
fn vacuum_data_fail_with_nonzero_status() {
    let dir = tempfile::tempdir().unwrap();
    let out = gsv(
        "riemann",
        &riemann_config(0.0, 0.0, (1.0, -20.0), (1.0, 20.0), SAMPLE),
        dir.path(),
        &[],
    );
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("vacuum"));
}

#[test]
fn eigen_mode_writes_four_fields() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "[params]\ng = 9.81\nG = 1.0\nzeta = 0.25\n\n[state]\nh = 1.0\nu = 0.5\nsxx = 2.0\nszz = 0.5\n";
    let out = gsv("eigen", cfg, dir.path(), &[]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let lam = column(&dir.path().join("out/eigen.csv"), "lambda");
    assert_eq!(lam.len(), 4);
    assert!(lam[0] < lam[1] && lam[1] == lam[2] && lam[2] < lam[3]);
    assert_eq!(lam[1], 0.5);
}

fn simulate_config(t_end: f64, boundary: &str, initial: &str) -> String {
    format!(
        "[params]\ng = 9.81\nG = 1.0\nzeta = 0.25\n\n\
         [state]\nh = 1.0\nu = 0.3\nsxx = 1.0\nszz = 1.0\n\n\
         [initial]\n{initial}\n\n\
         [grid]\nx_min = -1.0\nx_max = 1.0\ncells = 100\n\n\
         [time]\nt_end = {t_end}\nboundary = \"{boundary}\"\nsnapshots = [0.05]\n"
    )
}

#[test]
fn zero_end_time_writes_only_the_initial_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = simulate_config(
        0.0,
        "transmissive",
        "kind = \"dam-break\"\nh_left = 2.0\nh_right = 1.0",
    );
    let out = gsv("simulate", &cfg, dir.path(), &[]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let times = column(&dir.path().join("out/snapshots.csv"), "time");
    assert_eq!(times, vec![0.0]);
    let h = column(&dir.path().join("out/snapshot_0000.csv"), "h");
    assert_eq!(h.len(), 100);
    assert_eq!((h[0], h[99]), (2.0, 1.0));
}

#[test]
fn periodic_constant_run_conserves_totals() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = simulate_config(
        0.1,
        "periodic",
        "kind = \"smooth-bump\"\namplitude = 0.0\ncenter = 0.0\nwidth = 0.2",
    );
    let out = gsv("simulate", &cfg, dir.path(), &[]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let log = dir.path().join("out/conservation.csv");
    for name in ["mass", "momentum", "h_x", "h_zinv"] {
        let v = column(&log, name);
        assert!(v.len() > 2);
        for x in &v {
            assert!(
                (x - v[0]).abs() <= 1e-12 * v[0].abs(),
                "{name}: {x} vs {}",
                v[0]
            );
        }
    }
    let times = column(&dir.path().join("out/snapshots.csv"), "time");
    assert_eq!(times, vec![0.05, 0.1]);
}

const SMALL_SWEEP: &str =
    "[validate]\neigen_samples = 200\nriemann_samples = 40\nsv_samples = 40\n\
    profile_points = 100\nweak_problems = 4\nweak_tests = 4\nconvexity_pairs = 8\n\
    convergence_cells = [50, 100, 200]\n";

#[test]
fn validation_is_deterministic_and_exit_status_matches_the_report() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ra = gsv("validate", SMALL_SWEEP, a.path(), &["--seed", "11"]);
    let rb = gsv("validate", SMALL_SWEEP, b.path(), &["--seed", "11"]);
    let ta = fs::read_to_string(a.path().join("out/validation.csv")).unwrap();
    let tb = fs::read_to_string(b.path().join("out/validation.csv")).unwrap();
    assert_eq!(ta, tb);
    assert_eq!(ra.status.success(), rb.status.success());
    let (_, rows) = csv(&a.path().join("out/validation.csv"));
    let any_failed = rows.iter().any(|r| r[2] == "fail");
    assert_eq!(ra.status.success(), !any_failed);
    let ids: std::collections::BTreeSet<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(ids.len(), 10);
}

#[test]
fn injected_diagnostic_reports_the_negative_control() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!("{SMALL_SWEEP}diagnostic_zeta = 0.6\n");
    gsv("validate", &cfg, dir.path(), &[]);
    let (_, rows) = csv(&dir.path().join("out/validation.csv"));
    let control = rows
        .iter()
        .find(|r| r[3].starts_with("negative_control_violation"))
        .expect("negative control row");
    assert_eq!(control[5].parse::<f64>().unwrap(), 1.0);
}

#[test]
fn shipped_configs_resolve() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = fs::read_to_string(&path).unwrap();
        let cfg = gsv_cli::parse_config(&text).unwrap();
        let mode = cfg.mode.expect("shipped configs name their mode");
        cfg.resolve(mode)
            .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        seen += 1;
    }
    assert_eq!(seen, 4);
}
