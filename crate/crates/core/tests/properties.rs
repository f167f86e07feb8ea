use approx::assert_abs_diff_eq;
use tcphase_core::algebra::build_su11_rep;
use tcphase_core::linalg::wrap_angle;
use tcphase_core::oracle::{berry_run, evolve, fixed_point_reference, BerryModel};
use tcphase_core::{Algebra, DrivingProtocol, StateLabel};

const SU11: BerryModel = BerryModel::LinearSu11 { k: 0.5, n: 0, trunc_dim: 128, c0: 5.0, lambda: 1.0 };
const SU2: BerryModel = BerryModel::LinearSu2 { j: 0.5, mu: 0.5, c0: 1.0, lambda: 0.5 };

#[test]
fn long_su11_run_keeps_norm() {
    let g = build_su11_rep(0.5, 128).unwrap();
    let p = DrivingProtocol::uniform_loop(Algebra::Su11, 5.0, 1.0, 500.0, 1).unwrap();
    let psi0 = fixed_point_reference(&g, &p, StateLabel::Su11 { k: 0.5, n: 0 }, 1, 0.0).unwrap();
    let run = evolve(|t| p.hamiltonian(t).matrix(&g), &psi0, 500.0, 100_000, 1000).unwrap();
    assert!(run.norm_drift <= 1e-9, "{}", run.norm_drift);
}

#[test]
fn reversed_loop_negates_geometric_phase() {
    // offsets of order 1/T do not cancel between the two orientations
    for (model, period) in [(SU11, 1000.0), (SU2, 10000.0)] {
        let fwd = berry_run(model, period, 0.025, 4, 1, 1).unwrap();
        let back = berry_run(model, period, 0.025, 4, -1, 1).unwrap();
        assert!(wrap_angle(fwd.phases.geometric + back.phases.geometric).abs() <= 1e-3, "{fwd:?} {back:?}");
        assert_abs_diff_eq!(fwd.phases.dynamical, back.phases.dynamical, epsilon = 1e-6);
        assert_abs_diff_eq!(fwd.closed_form, -back.closed_form, epsilon = 1e-14);
    }
}

#[test]
fn doubling_truncation_leaves_phase_alone() {
    let wide = BerryModel::LinearSu11 { k: 0.5, n: 0, trunc_dim: 256, c0: 5.0, lambda: 1.0 };
    let a = berry_run(SU11, 500.0, 0.025, 4, 1, 1).unwrap();
    let b = berry_run(wide, 500.0, 0.025, 4, 1, 1).unwrap();
    assert!((a.phases.geometric - b.phases.geometric).abs() <= 1e-6, "{} {}", a.phases.geometric, b.phases.geometric);
    assert!(a.norm_drift <= 1e-9 && b.norm_drift <= 1e-9);
}
