use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tcphase_core::oracle::{berry_run, BerryModel};

fn tcphase(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tcphase")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = tcphase(args);
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stderr(&o));
    stdout(&o)
}

/// Rows of a CSV as (header, records), values as strings.
fn csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn column(text: &str, name: &str) -> Vec<f64> {
    let (header, rows) = csv(text);
    let i = header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Compare with the pinned file; `TCPHASE_BLESS=1` rewrites it.
fn check_golden(name: &str, actual: &str) {
    let path = golden(name);
    if std::env::var_os("TCPHASE_BLESS").is_some() {
        std::fs::write(&path, actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(actual, expected, "output differs from {}", path.display());
}

const BERRY_SU2: &[&str] = &["berry", "--config", "tests/golden/su2.ini"];
const SWEEP_SU2: &[&str] = &["sweep", "--config", "tests/golden/su2.ini", "--set", "sweep.axis1=lambda", "--set", "sweep.values1=0:0.2:5"];

fn in_crate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tcphase"))
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok_in_crate(args: &[&str]) -> String {
    let o = in_crate(args);
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stderr(&o));
    stdout(&o)
}

#[test]
fn berry_and_sweep_are_byte_identical_across_runs() {
    for args in [BERRY_SU2, SWEEP_SU2] {
        let mut with_seed = args.to_vec();
        with_seed.extend(["--seed", "7"]);
        let a = ok_in_crate(&with_seed);
        let b = ok_in_crate(&with_seed);
        assert_eq!(a, b);
        assert!(!a.contains('\r'));
    }
}

#[test]
fn golden_outputs() {
    check_golden("berry_su2.csv", &ok_in_crate(BERRY_SU2));
    check_golden("sweep_su2.csv", &ok_in_crate(SWEEP_SU2));
    check_golden(
        "berry_su11.csv",
        &ok_in_crate(&["berry", "--config", "tests/golden/su11.ini"]),
    );
}

#[test]
fn golden_headers() {
    let headers = [
        (vec!["verify", "--scope", "su2"], "check,residual,tolerance,status"),
        (vec!["berry", "--set", "T=20"], "model,T,steps,total_phase,dynamical_phase,geometric_phase,closed_form,deviation"),
        (
            vec!["sweep", "--set", "T=20", "--set", "sweep.axis1=lambda", "--set", "sweep.values1=0.1"],
            "lambda,model,T,steps,total_phase,dynamical_phase,geometric_phase,closed_form,deviation,error",
        ),
        (vec!["wavefunction", "--set", "rho_points=3", "--set", "angle_points=1"], "rho,angle,re,im,abs2"),
        (
            vec!["diagonalize"],
            "algebra,c0,lambda,phi,tau,xi_phi,energy_scale,residual_offdiag,spectrum_dev,levels",
        ),
        (vec!["coherent-state"], "index,weight,re,im,abs2"),
    ];
    for (args, header) in headers {
        assert_eq!(ok(&args).lines().next().unwrap(), header, "{args:?}");
    }
}

#[test]
fn verify_default_passes() {
    let out = ok(&["verify"]);
    let (_, rows) = csv(&out);
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| r[3] == "PASS"), "{out}");
}

#[test]
fn verify_reports_forced_breach() {
    let o = tcphase(&["verify", "--scope", "su2", "--set", "tol.su2-commutators=1e-20"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("su2-commutators"));
    assert!(stdout(&o).lines().any(|l| l.starts_with("su2-commutators,") && l.ends_with(",FAIL")));
}

#[test]
fn verify_scope_filters() {
    let out = ok(&["verify", "--scope", "su2"]);
    let (_, rows) = csv(&out);
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r[0].starts_with("su2-")));
    assert!(tcphase(&["verify", "--scope", "su3"]).status.code() == Some(2));
}

#[test]
fn verify_seed_is_reproducible() {
    let a = ok(&["verify", "--scope", "su11", "--seed", "3", "--set", "draws=5"]);
    assert_eq!(a, ok(&["verify", "--scope", "su11", "--seed", "3", "--set", "draws=5"]));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["frobnicate"],
        vec!["berry", "--set", "lamda=1"],
        vec!["berry", "--set", "T"],
        vec!["berry", "--config", "/nonexistent/run.ini"],
        vec!["berry", "--set", "model=su3-linear"],
        vec!["berry", "--format", "xml"],
        vec!["wavefunction", "--set", "zeta_re=1.2"],
        vec!["sweep"],
    ] {
        let o = tcphase(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn regime_violation_names_the_error() {
    let o = tcphase(&["berry", "--set", "model=su11-linear", "--set", "lambda=3", "--set", "T=10"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("NoAdiabaticFixedPoint"), "{}", stderr(&o));
}

#[test]
fn uncoupled_loop_has_no_geometric_phase() {
    for model in ["su2-linear", "su11-linear", "tc-su2", "tc-full-sector"] {
        let out = ok(&["berry", "--set", &format!("model={model}"), "--set", "lambda=0", "--set", "periods=20,40", "--set", "trunc_dim=32"]);
        for g in column(&out, "geometric_phase") {
            assert!(g.abs() <= 1e-9, "{model}: {g}");
        }
    }
}

#[test]
fn su2_defaults_reproduce_library_oracle() {
    let out = ok(&["berry", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let lib = berry_run(BerryModel::LinearSu2 { j: 0.5, mu: 0.5, c0: 1.0, lambda: 0.5 }, 500.0, 0.025, 4, 1, 1).unwrap();
    assert_eq!(v["oracle"].as_f64().unwrap(), lib.phases.geometric);
    assert!((v["closed_form"].as_f64().unwrap() - lib.closed_form).abs() < 1e-14);
    // documented orientation: +2 pi mu (1 - 1/sqrt 2)
    assert!((lib.closed_form - 0.92015).abs() < 1e-5);
}

#[test]
fn su11_defaults_meet_tolerance() {
    let out = ok(&["berry", "--set", "model=su11-linear"]);
    let g = column(&out, "geometric_phase")[0];
    assert!((g.abs() - 0.28616).abs() <= 1e-3, "{g}");
    assert!(column(&out, "deviation")[0] <= 1e-3);
}

#[test]
fn lambda_sweep_is_monotone() {
    let out = ok(&["sweep", "--set", "T=100", "--set", "sweep.axis1=lambda", "--set", "sweep.values1=0:0.2:6"]);
    let g: Vec<f64> = column(&out, "geometric_phase").iter().map(|x| x.abs()).collect();
    let cf: Vec<f64> = column(&out, "closed_form").iter().map(|x| x.abs()).collect();
    assert!(g.windows(2).all(|w| w[1] > w[0]), "{g:?}");
    assert!(cf.windows(2).all(|w| w[1] > w[0]), "{cf:?}");
}

#[test]
fn single_point_sweep_matches_berry() {
    let berry = ok(&["berry", "--set", "T=30", "--set", "lambda=0.3"]);
    let sweep = ok(&["sweep", "--set", "T=30", "--set", "sweep.axis1=lambda", "--set", "sweep.values1=0.3"]);
    let (_, b) = csv(&berry);
    let (_, s) = csv(&sweep);
    assert_eq!(s[0][1..9], b[0][..]);
    assert_eq!(s[0][9], "");
}

#[test]
fn boundary_crossing_sweep_tags_rows() {
    let out = ok(&[
        "sweep",
        "--set",
        "model=su11-linear",
        "--set",
        "trunc_dim=32",
        "--set",
        "T=20",
        "--set",
        "sweep.axis1=lambda",
        "--set",
        "sweep.values1=2.6,0.5,3",
    ]);
    let (header, rows) = csv(&out);
    assert_eq!(header.last().unwrap(), "error");
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0][0].parse::<f64>().unwrap(), 0.5);
    assert!(out.contains("NoAdiabaticFixedPoint"));
    assert_eq!(out.lines().filter(|l| l.contains("NoAdiabaticFixedPoint")).count(), 2);
}

#[test]
fn two_axis_sweep_order() {
    let out = ok(&[
        "sweep",
        "--set",
        "T=20",
        "--set",
        "sweep.axis1=lambda",
        "--set",
        "sweep.values1=0.2,0.1",
        "--set",
        "sweep.axis2=c0",
        "--set",
        "sweep.values2=1.5,1",
    ]);
    let lambda = column(&out, "lambda");
    let c0 = column(&out, "c0");
    assert_eq!(lambda, vec![0.1, 0.1, 0.2, 0.2]);
    assert_eq!(c0, vec![1.0, 1.5, 1.0, 1.5]);
}

fn wavefunction_norm(out: &str) -> (Vec<f64>, f64) {
    let rho = column(out, "rho");
    let abs2 = column(out, "abs2");
    let angles = rho.iter().filter(|&&r| r == 0.0).count();
    let radii: Vec<f64> = rho.iter().step_by(angles).copied().collect();
    let ring: Vec<f64> = abs2.chunks(angles).map(|c| c.iter().sum::<f64>() * 2.0 * std::f64::consts::PI / angles as f64).collect();
    let norm = radii
        .windows(2)
        .zip(ring.windows(2))
        .map(|(r, f)| 0.5 * (r[1] - r[0]) * (r[0] * f[0] + r[1] * f[1]))
        .sum();
    (ring, norm)
}

#[test]
fn wavefunction_ground_state() {
    let out = ok(&["wavefunction", "--set", "n_l=0", "--set", "m_n=0", "--set", "rho_points=81", "--set", "angle_points=16"]);
    let (ring, norm) = wavefunction_norm(&out);
    assert!(ring.windows(2).all(|w| w[1] < w[0]));
    assert!((norm - 1.0).abs() <= 1e-3, "{norm}");
    let squeezed = ok(&["wavefunction", "--set", "m_n=0", "--set", "zeta_re=0.3", "--set", "zeta_im=0.2", "--set", "rho_points=161"]);
    assert!((wavefunction_norm(&squeezed).1 - 1.0).abs() <= 1e-3);
}

#[test]
fn wavefunction_vanishes_at_origin_with_angular_momentum() {
    let out = ok(&["wavefunction", "--set", "n_l=1", "--set", "m_n=2", "--set", "rho_points=11", "--set", "angle_points=8"]);
    let (_, rows) = csv(&out);
    for r in rows.iter().filter(|r| r[0].parse::<f64>().unwrap() == 0.0) {
        assert_eq!(r[4].parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn out_flag_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.json");
    let o = tcphase(&["diagonalize", "--set", "model=su11-linear", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!((v[0]["energy_scale"].as_f64().unwrap() - 21f64.sqrt()).abs() < 1e-14);
}

#[test]
fn coherent_state_json_has_fidelity() {
    let out = ok(&["coherent-state", "--set", "model=su11-linear", "--set", "n=2", "--set", "tau=0.8", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!((1.0 - v["fidelity"].as_f64().unwrap()).abs() <= 1e-10);
}
