use lgaf_core::bifurcation::{first_lyapunov_at, hopf_detect_at, mu, HopfDirection};
use lgaf_core::equilibria::{allee_competition_threshold, critical_fear, find_equilibrium};
use lgaf_core::integrate::{long_run, IntegratorConfig, LongRun};
use lgaf_core::stability::branch_threshold;
use lgaf_core::{EquilibriumKind, Params, State};

fn cfg() -> IntegratorConfig {
    IntegratorConfig {
        rtol: 1e-10,
        atol: 1e-13,
        max_steps: 3_000_000,
        ..Default::default()
    }
}

// upper branch with a supercritical Hopf point
fn supercritical() -> Params {
    let m = 0.05;
    let a = 0.2 * allee_competition_threshold(m).unwrap();
    let lam = 0.4 * critical_fear(m, a).unwrap();
    Params::new(m, a, lam, 0.1).unwrap()
}

fn run_from_e5(p: &Params) -> LongRun {
    let e5 = find_equilibrium(p, EquilibriumKind::E5).unwrap();
    long_run(p, State::new(1.001 * e5.x, e5.y), &cfg()).unwrap()
}

#[test]
fn amplitude_grows_like_a_square_root() {
    let p = supercritical();
    assert_eq!(
        first_lyapunov_at(&p, EquilibriumKind::E5)
            .unwrap()
            .direction,
        HopfDirection::Supercritical
    );
    let sh = branch_threshold(&p, EquilibriumKind::E5).unwrap();
    let pts: Vec<(f64, f64)> = [0.9, 0.925, 0.95, 0.975, 0.99]
        .iter()
        .map(|&f| match run_from_e5(&p.with_s(f * sh)) {
            LongRun::Cycle(c) => (((1.0 - f) * sh).ln(), c.amplitude.ln()),
            other => panic!("no cycle at {f} s_H: {other:?}"),
        })
        .collect();
    let n = pts.len() as f64;
    let (mx, my) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), &(x, y)| (a + x / n, b + y / n));
    let sxy: f64 = pts.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|&(x, _)| (x - mx) * (x - mx)).sum();
    let exponent = sxy / sxx;
    assert!((exponent - 0.5).abs() < 0.1, "exponent {exponent}");
}

#[test]
fn subcritical_focus_sheds_no_small_cycle() {
    // the fixture's upper branch: l1 > 0, so no small stable cycle below s_H
    let p = Params::new(0.25, 0.2, 0.3, 0.1).unwrap();
    let ly = first_lyapunov_at(&p, EquilibriumKind::E5).unwrap();
    assert_eq!(ly.direction, HopfDirection::Subcritical);
    let sh = branch_threshold(&p, EquilibriumKind::E5).unwrap();
    let e5 = find_equilibrium(&p, EquilibriumKind::E5).unwrap();
    if let LongRun::Cycle(c) = run_from_e5(&p.with_s(0.99 * sh)) {
        assert!(c.amplitude > 0.1 * e5.x, "small cycle {c:?}");
    }
    // above s_H the focus attracts nearby points
    assert!(matches!(
        run_from_e5(&p.with_s(1.5 * sh)),
        LongRun::Equilibrium {
            kind: EquilibriumKind::E5,
            ..
        }
    ));
}

#[test]
fn trace_crosses_zero_with_unit_speed() {
    for p in [supercritical(), Params::new(0.25, 0.2, 0.3, 0.1).unwrap()] {
        for kind in [EquilibriumKind::E4, EquilibriumKind::E5] {
            let r = hopf_detect_at(&p, kind).unwrap();
            assert!(mu(&p, kind, r.s_star).unwrap().abs() < 1e-12);
            let h = 1e-4 * r.s_star;
            let slope = (mu(&p, kind, r.s_star + h).unwrap() - mu(&p, kind, r.s_star - h).unwrap())
                / (2.0 * h);
            assert!((slope + 1.0).abs() < 1e-10, "{kind}: {slope}");
        }
    }
}

#[test]
fn lower_branch_threshold_is_not_a_weak_center() {
    let p = Params::new(0.25, 0.2, 0.3, 0.1).unwrap();
    let r = hopf_detect_at(&p, EquilibriumKind::E4).unwrap();
    assert!((r.s_star - 0.161405).abs() < 1e-6);
    assert!(r.det < 0.0 && !r.is_weak_center());
    assert!(first_lyapunov_at(&p, EquilibriumKind::E4).is_err());
}
