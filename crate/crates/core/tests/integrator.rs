use lgaf_core::equilibria::find_equilibrium;
use lgaf_core::integrate::{integrate, integrate_fixed, IntegratorConfig, TerminalStatus};
use lgaf_core::{EquilibriumKind, Params, State};
use proptest::prelude::*;

fn fixture() -> Params {
    Params::new(0.25, 0.2, 0.3, 0.1).unwrap()
}

#[test]
fn adaptive_error_falls_with_step_count_at_order_four_or_more() {
    let p = fixture();
    let init = State::new(0.7, 0.4);
    let t_end = 20.0;
    let reference = integrate(
        &p,
        init,
        t_end,
        &IntegratorConfig::with_tolerances(1e-13, 1e-16),
    )
    .unwrap()
    .final_state();
    let mut pts = Vec::new();
    for k in 0..5 {
        let tol = 1e-5 * 0.1f64.powi(k);
        let tr = integrate(
            &p,
            init,
            t_end,
            &IntegratorConfig::with_tolerances(tol, tol * 1e-3),
        )
        .unwrap();
        assert_eq!(tr.status, TerminalStatus::TimeExhausted);
        let steps = (tr.accepted + tr.rejected) as f64;
        pts.push((steps.ln(), tr.final_state().dist(&reference).ln()));
    }
    let order = -(pts[4].1 - pts[0].1) / (pts[4].0 - pts[0].0);
    assert!(order >= 4.0, "observed order {order}");
}

#[test]
fn halving_tolerances_reduces_the_error() {
    let p = fixture();
    let init = State::new(0.7, 0.4);
    let reference = integrate(
        &p,
        init,
        20.0,
        &IntegratorConfig::with_tolerances(1e-12, 1e-15),
    )
    .unwrap()
    .final_state();
    let err = |tol: f64| {
        let cfg = IntegratorConfig::with_tolerances(tol, tol * 1e-3);
        integrate(&p, init, 20.0, &cfg)
            .unwrap()
            .final_state()
            .dist(&reference)
    };
    let (coarse, fine) = (err(1e-6), err(5e-7));
    assert!(fine < coarse, "{fine} vs {coarse}");
}

#[test]
fn fixed_step_convergence_is_fifth_order() {
    let p = fixture();
    let init = State::new(0.7, 0.4);
    let reference = integrate_fixed(&p, init, 10.0, 8192).unwrap();
    let err = |n| integrate_fixed(&p, init, 10.0, n).unwrap().dist(&reference);
    let order = (err(40) / err(80)).log2();
    assert!(order >= 4.0, "observed order {order}");
}

#[test]
fn upper_equilibrium_does_not_drift() {
    let p = fixture();
    let e5 = find_equilibrium(&p, EquilibriumKind::E5).unwrap();
    let tr = integrate(&p, e5.state(), 1e3, &IntegratorConfig::default()).unwrap();
    let drift = tr
        .samples
        .iter()
        .map(|s| State::new(s.x, s.y).dist(&e5.state()))
        .fold(0.0, f64::max);
    assert!(drift < 1e-6, "drift {drift}");
}

#[test]
fn csv_output_is_reproducible() {
    let p = fixture();
    let run = || {
        let tr = integrate(&p, State::new(0.6, 0.3), 50.0, &IntegratorConfig::default()).unwrap();
        let mut buf = Vec::new();
        tr.write_csv(&mut buf).unwrap();
        buf
    };
    assert_eq!(run(), run());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn accepted_states_stay_in_the_domain(x in 0.01f64..1.5, y in 0.0f64..1.5, s in 0.02f64..1.0) {
        let p = Params::new(0.25, 0.2, 0.3, s).unwrap();
        let cfg = IntegratorConfig { max_steps: 200_000, ..Default::default() };
        let tr = integrate(&p, State::new(x, y), 200.0, &cfg).unwrap();
        let n = tr.samples.len();
        for (i, smp) in tr.samples.iter().enumerate() {
            prop_assert!(smp.y >= 0.0);
            let last_exit = i + 1 == n && tr.status == TerminalStatus::DomainExit;
            prop_assert!(smp.x > cfg.x_floor || last_exit);
        }
        prop_assert!(tr.samples.windows(2).all(|w| w[1].t > w[0].t));
    }
}
