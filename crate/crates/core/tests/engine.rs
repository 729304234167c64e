use std::collections::BTreeSet;

use proptest::prelude::*;
use wavefront_core::fronttrack::{
    conservation_residual, entropy_residual, run, run_with, EngineConfig, EntropyFunction, EventKind, FrontKind, Rect,
    RuleTag, Solution,
};
use wavefront_core::riemann::{fan_state, liu_admissible, solve_boundary_rp, LambdaWave, State};
use wavefront_core::scenario::{build_alternating, default_x_stop, geometric_points, Scenario, Segment};
use wavefront_core::{DerivedFunctions, Error, IsothermModel};

fn cvx_model() -> IsothermModel {
    IsothermModel::inert_convex_quadratic(1.0, 0.5).unwrap()
}

fn cvx() -> DerivedFunctions {
    DerivedFunctions::new(cvx_model()).unwrap()
}

fn one_pair(delta: f64) -> Scenario {
    build_alternating(&cvx(), 0.2, 0.8, 1.0, &[0.0, 0.5], 10.0, 1.0, delta).unwrap()
}

fn alternating(n: usize, delta: f64) -> Scenario {
    let xs = geometric_points(1.0, 0.97, n).unwrap();
    build_alternating(&cvx(), 0.2, 0.8, 1.0, &xs, 10.0, default_x_stop(&xs, 1.0), delta).unwrap()
}

fn single_shock() -> Scenario {
    Scenario::new(cvx_model(), 1.0, 0.2, vec![Segment { x: 0.0, c: 0.8 }], 10.0, 1.0, 0.05).unwrap()
}

#[test]
fn constant_data_has_no_fronts() {
    let sc = Scenario::new(cvx_model(), 1.3, 0.4, vec![Segment { x: 0.2, c: 0.4 }], 5.0, 1.0, 0.05).unwrap();
    let sol = run(&sc).unwrap();
    assert!(sol.fronts().is_empty());
    assert_eq!(sol.bottom_trace().len(), 1);
    assert_eq!(sol.sample(2.0, 0.7).unwrap(), State { c: 0.4, u: 1.3 });

    let empty = Scenario::new(cvx_model(), 1.0, 0.3, Vec::new(), 5.0, 1.0, 0.05).unwrap();
    let sol = run(&empty).unwrap();
    assert!(sol.fronts().is_empty() && sol.events().is_empty());
    assert_eq!(sol.meta().x_final, 1.0);
}

#[test]
fn first_emission_is_the_shock_of_slope_2_2() {
    let sol = run(&one_pair(0.05)).unwrap();
    let first = &sol.events()[0];
    assert_eq!((first.kind, first.rule), (EventKind::Emission, Some(RuleTag::EmissionShock)));
    let shock = &sol.fronts()[first.out_ids[0]];
    assert_eq!(shock.kind, FrontKind::Shock);
    assert!((shock.slope - 2.2).abs() < 1e-12, "{}", shock.slope);
}

#[test]
fn one_pair_bottom_trace() {
    let sol = run(&one_pair(0.05)).unwrap();
    let trace = sol.bottom_trace();
    assert_eq!(trace.len(), 2);
    assert_eq!((trace[0].x_start, trace[0].x_end, trace[1].x_start, trace[1].x_end), (0.0, 0.5, 0.5, 1.0));
    assert!((trace[0].state.u - 0.590909).abs() < 1e-6);
    assert!((trace[1].state.u - 1.0094).abs() < 5e-4);
    assert!((trace[1].state.u - 1.0093706459051475).abs() < 1e-12);
}

#[test]
fn linear_model_returns_to_u0_after_each_pair() {
    let fns = DerivedFunctions::new(IsothermModel::linear(0.0, 1.0).unwrap()).unwrap();
    let xs = geometric_points(1.0, 0.8, 3).unwrap();
    let sc = build_alternating(&fns, 0.2, 0.8, 1.0, &xs, 10.0, default_x_stop(&xs, 1.0), 0.05).unwrap();
    let sol = run_with(&fns, &sc, EngineConfig::for_scenario(&sc)).unwrap();
    for seg in sol.raw_bottom_trace().iter().filter(|s| s.emission.is_some_and(|k| k % 2 == 1)) {
        assert!((seg.state.u - 1.0).abs() < 1e-12, "{seg:?}");
    }
}

#[test]
fn sampling_regions() {
    let fns = cvx();
    let sc = one_pair(0.05);
    let sol = run(&sc).unwrap();
    // On x = 0 every t sees the inflow state.
    assert_eq!(sol.sample(3.0, 0.0).unwrap(), State { c: 0.2, u: 1.0 });
    // Just above t = 0, below the corner shock.
    let s = sol.sample(1e-3, 0.25).unwrap();
    assert_eq!(s.c, 0.8);
    assert!((s.u - 0.590909).abs() < 1e-6);
    // Inside the fan from x = 0.5, before the shock above reaches it.
    let fan = solve_boundary_rp(&fns, 0.2, 0.8, s.u).unwrap();
    let LambdaWave::Rarefaction(r) = fan.wave else { panic!("expected a rarefaction") };
    let (x, z) = (0.6, 0.5 * (r.z0 + r.z_plus));
    let sampled = sol.sample(z * (x - 0.5), x).unwrap();
    let exact = fan_state(&fns, &r, z).unwrap();
    assert!((sampled.c - exact.c).abs() <= 0.05, "{sampled:?} vs {exact:?}");
    assert!(matches!(sol.sample(20.0, 0.5), Err(Error::Domain(_))));
    assert!(matches!(sol.sample(1.0, 2.0), Err(Error::Domain(_))));
}

#[test]
fn residual_of_constant_rectangle_and_exact_shock() {
    let fns = cvx();
    let sol = run(&single_shock()).unwrap();
    let below = conservation_residual(&fns, &sol, Rect::new(0.5, 0.9, 0.1, 0.4).unwrap(), 2).unwrap();
    assert!(below.iter().all(|v| v.abs() < 1e-14), "{below:?}");
    let across = conservation_residual(&fns, &sol, Rect::new(0.3, 0.8, 0.5, 2.0).unwrap(), 3).unwrap();
    assert!(across.iter().all(|v| v.abs() < 1e-10), "{across:?}");
    assert!(conservation_residual(&fns, &sol, Rect::new(0.3, 0.8, 0.0, 2.0).unwrap(), 3).is_err());
    assert!(conservation_residual(&fns, &sol, Rect::new(0.3, 0.8, 0.5, 2.0).unwrap(), 9).is_err());
}

#[test]
fn fan_residual_halves_with_delta() {
    let fns = cvx();
    let rect = Rect::new(0.55, 0.75, 0.05, 0.45).unwrap();
    let norm = |delta: f64| {
        let sol = run(&one_pair(delta)).unwrap();
        let [a, b] = conservation_residual(&fns, &sol, rect, 3).unwrap();
        a.hypot(b)
    };
    let (r0, r1) = (norm(0.02), norm(0.01));
    assert!(r0 > 0.0);
    let ratio = r1 / r0;
    assert!((0.3..=0.8).contains(&ratio), "ratio {ratio}");
}

#[test]
fn entropy_is_dissipated_across_the_shock_only() {
    let fns = cvx();
    let sol = run(&single_shock()).unwrap();
    for psi in [EntropyFunction::Square, EntropyFunction::CenteredSquare, EntropyFunction::CLogC] {
        let across = entropy_residual(&fns, &sol, Rect::new(0.3, 0.8, 0.5, 2.0).unwrap(), psi, 3).unwrap();
        let away = entropy_residual(&fns, &sol, Rect::new(0.5, 0.9, 0.1, 0.4).unwrap(), psi, 3).unwrap();
        assert!(across < 0.0, "{psi:?}: {across}");
        assert!(away.abs() < 1e-13, "{psi:?}: {away}");
    }
}

#[test]
fn event_cap_aborts_the_run() {
    let sc = alternating(6, 5e-3);
    let fns = cvx();
    let mut cfg = EngineConfig::for_scenario(&sc);
    cfg.max_events = 100;
    assert!(matches!(run_with(&fns, &sc, cfg), Err(Error::EventCap(100))));
}

#[test]
fn runs_are_deterministic() {
    let sc = alternating(4, 0.02);
    let (a, b) = (run(&sc).unwrap(), run(&sc).unwrap());
    assert_eq!(a.events(), b.events());
    assert_eq!(a.fronts(), b.fronts());
    assert_eq!(a.raw_bottom_trace(), b.raw_bottom_trace());
}

#[test]
fn batched_rows_match_single_rows() {
    let sol = run(&alternating(3, 0.02)).unwrap();
    let ts = [0.0, 0.7, 2.5, 10.0];
    let rows = sol.rows_pieces(&ts, 0.05, sol.x_stop()).unwrap();
    for (t, row) in ts.iter().zip(&rows) {
        assert_eq!(row, &sol.row_pieces(*t, 0.05, sol.x_stop()).unwrap(), "t={t}");
    }
    assert!(rows.iter().all(|r| !r.is_empty()));
}

#[test]
fn history_free_run_keeps_the_bottom_trace() {
    let fns = cvx();
    let sc = alternating(4, 0.02);
    let full = run(&sc).unwrap();
    let mut cfg = EngineConfig::for_scenario(&sc);
    cfg.keep_history = false;
    let lean = run_with(&fns, &sc, cfg).unwrap();
    assert!(lean.fronts().is_empty() && lean.events().is_empty());
    assert_eq!(lean.raw_bottom_trace(), full.raw_bottom_trace());
    assert_eq!(lean.meta().n_events, full.meta().n_events);
    assert!(lean.sample(1.0, 0.5).is_err());
}

#[test]
fn table_rules_show_up_in_a_six_pair_run() {
    let sol = run(&alternating(6, 5e-3)).unwrap();
    let tags: BTreeSet<&str> = sol.events().iter().filter_map(|e| e.rule).map(RuleTag::as_str).collect();
    for tag in ["RS→CD+S", "SCD→CD+S", "emission-shock", "emission-rarefaction"] {
        assert!(tags.contains(tag), "{tag} missing from {tags:?}");
    }
    assert!(!tags.contains("unlisted"), "{tags:?}");
}

#[test]
fn equal_strength_shock_and_subfront_cancel() {
    let segs = vec![Segment { x: 0.0, c: 0.8 }, Segment { x: 0.1, c: 0.2 }, Segment { x: 0.2, c: 0.8 }];
    let sc = Scenario::new(cvx_model(), 1.0, 0.2, segs, 10.0, 1.0, 0.7).unwrap();
    let sol = run(&sc).unwrap();
    let ev = sol.events().iter().find(|e| e.rule == Some(RuleTag::RsCdOnly)).expect("a cancellation");
    let out: Vec<FrontKind> = ev.out_ids.iter().map(|&i| sol.fronts()[i].kind).collect();
    assert!(out.iter().all(|&k| k == FrontKind::Contact || k == FrontKind::Marker), "{out:?}");
}

/// Structural checks every run must satisfy.
fn check_invariants(fns: &DerivedFunctions, sc: &Scenario, sol: &Solution) {
    let (lo, hi) = sc.c_range();
    for f in sol.fronts() {
        for s in [f.below, f.above] {
            assert!((lo..=hi).contains(&s.c) && s.u > 0.0, "{f:?}");
        }
        match f.kind {
            FrontKind::Contact => assert_eq!((f.below.c, f.slope), (f.above.c, 0.0)),
            FrontKind::Shock => assert!(liu_admissible(fns, f.below.c, f.above.c).unwrap(), "{f:?}"),
            FrontKind::RarSubfront => {
                assert!(f.strength() <= sc.delta * (1.0 + 1e-9), "{f:?}");
                let (wb, wa) = (fns.w_invariant(f.below), fns.w_invariant(f.above));
                assert!((wb - wa).abs() <= 1e-12 * wb, "{f:?}");
            }
            FrontKind::Marker => assert_eq!(f.below, f.above),
        }
    }
    for e in sol.events().iter().filter(|e| e.rule.is_some_and(RuleTag::is_table_interaction)) {
        let count = |ids: &[usize]| ids.iter().filter(|&&i| sol.fronts()[i].kind.is_lambda()).count();
        assert!(count(&e.out_ids) <= count(&e.in_ids), "{e:?}");
    }
    for i in 1..=8 {
        let t = sc.t_horizon * i as f64 / 8.0;
        let row = sol.row_pieces(t, 0.0, sc.x_stop).unwrap();
        for w in row.windows(2) {
            let (a, b) = (fns.w_invariant(w[0].2), fns.w_invariant(w[1].2));
            assert!(b >= a - 1e-9, "W decreases at t={t}: {a} -> {b}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn random_alternating_runs_keep_invariants(
        c_lo in 0.1f64..0.45,
        width in 0.1f64..0.45,
        n in 1usize..4,
        ratio in 0.6f64..0.9,
        delta in 0.01f64..0.05,
    ) {
        let fns = cvx();
        let xs = geometric_points(1.0, ratio, n).unwrap();
        let sc = build_alternating(&fns, c_lo, c_lo + width, 1.0, &xs, 5.0, default_x_stop(&xs, 1.0), delta).unwrap();
        let sol = run_with(&fns, &sc, EngineConfig::for_scenario(&sc)).unwrap();
        check_invariants(&fns, &sc, &sol);
        let again = run_with(&fns, &sc, EngineConfig::for_scenario(&sc)).unwrap();
        prop_assert_eq!(sol.events(), again.events());
    }
}
