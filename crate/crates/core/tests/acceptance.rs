//! Acceptance suite. Runs every criterion at its stated tolerance and
//! runtime budget, prints one line per criterion and fails if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wavefront_core::fronttrack::{
    conservation_residual, run_with, EngineConfig, EventKind, FrontKind, Rect, RuleTag, Solution,
};
use wavefront_core::fvref::{compare_with, fv_run, shock_slope, FvConfig};
use wavefront_core::model::{big_g_range, gpp_sign_class, DerivedFunctions, IsothermModel, SignClass};
use wavefront_core::riemann::{amplification_factor, gamma, shock_orientation, solve_boundary_rp};
use wavefront_core::scenario::{
    blowup_study, build_alternating, classify_temple, default_x_stop, geometric_points, verify_growth, BlowupParams,
    Scenario, Segment, TempleClass,
};

const T_HORIZON: f64 = 10.0;
const DELTA: f64 = 5e-3;

fn cvx_model() -> IsothermModel {
    IsothermModel::inert_convex_quadratic(1.0, 0.5).unwrap()
}

fn cvx() -> &'static DerivedFunctions {
    static F: OnceLock<DerivedFunctions> = OnceLock::new();
    F.get_or_init(|| DerivedFunctions::new(cvx_model()).unwrap())
}

fn cvx_alternating(n: usize, delta: f64) -> Scenario {
    let xs = geometric_points(1.0, 0.97, n).unwrap();
    build_alternating(cvx(), 0.2, 0.8, 1.0, &xs, T_HORIZON, default_x_stop(&xs, 1.0), delta).unwrap()
}

fn solve(fns: &DerivedFunctions, sc: &Scenario) -> Solution {
    run_with(fns, sc, EngineConfig::for_scenario(sc)).unwrap()
}

/// Runs shared between criteria, built on first use.
#[derive(Default)]
struct Runs {
    n6: OnceLock<Solution>,
    n6_half: OnceLock<Solution>,
    n25: OnceLock<Solution>,
    cancellation: OnceLock<Solution>,
    lng: OnceLock<Solution>,
    /// Concentrations sampled along constant-t lines of the N=25 run.
    row_samples: OnceLock<Vec<f64>>,
}

impl Runs {
    fn n6(&self) -> &Solution {
        self.n6.get_or_init(|| solve(cvx(), &cvx_alternating(6, DELTA)))
    }

    fn n6_half(&self) -> &Solution {
        self.n6_half.get_or_init(|| solve(cvx(), &cvx_alternating(6, DELTA / 2.0)))
    }

    fn n25(&self) -> &Solution {
        self.n25.get_or_init(|| solve(cvx(), &cvx_alternating(25, DELTA)))
    }
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn c1_temple_null(_: &Runs) -> Outcome {
    let fns = DerivedFunctions::new(IsothermModel::linear(0.0, 1.0).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e3a_11e5);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (a, b) = loop {
            let a: f64 = rng.random_range(0.01..0.99);
            let b: f64 = rng.random_range(0.01..0.99);
            if (a - b).abs() > 1e-3 {
                break (a, b);
            }
        };
        let r = amplification_factor(&fns, a.min(b), a.max(b)).unwrap();
        worst = worst.max((r - 1.0).abs());
    }
    let verdict = classify_temple(&fns, 32).unwrap();
    outcome(
        worst <= 1e-10 && verdict.verdict == TempleClass::Temple,
        format!("max |R-1| = {worst:.3e} over 100 pairs, Temple verdict {:?}", verdict.verdict),
    )
}

/// Closed-form antiderivative of `g' = (2 - c)/(1 + 2c - c²)` with `g(0) = 0`.
fn g_cvx_analytic(c: f64) -> f64 {
    let s2 = std::f64::consts::SQRT_2;
    let g = |c: f64| 0.5 * (1.0 + 2.0 * c - c * c).ln() + (1.0 / (2.0 * s2)) * ((s2 + c - 1.0) / (s2 - c + 1.0)).ln();
    g(c) - g(0.0)
}

fn c2_amplification(_: &Runs) -> Outcome {
    let fns = cvx();
    let quad = amplification_factor(fns, 0.2, 0.8).unwrap();
    let (below, above) = shock_orientation(fns, 0.2, 0.8).unwrap();
    let analytic = gamma(fns, below, above).unwrap() * (g_cvx_analytic(below) - g_cvx_analytic(above)).exp();
    // 30-digit oracle, frozen before the engine existed.
    let frozen = 1.0093706459051475;
    let pass = (quad - 1.0094).abs() <= 5e-4
        && (analytic - 1.0094).abs() <= 5e-4
        && (quad - analytic).abs() <= 1e-10
        && (quad - frozen).abs() <= 1e-12;
    outcome(pass, format!("R(0.2, 0.8): quadrature {quad:.16}, analytic {analytic:.16}, frozen {frozen}"))
}

fn c3_geometric_growth(runs: &Runs) -> Outcome {
    let sc = cvx_alternating(6, DELTA);
    let report = verify_growth(runs.n6(), cvx(), &sc, 1e-8).unwrap();
    outcome(
        report.pass && report.plateaus.len() == 6,
        format!("{} plateaus, max relative error {:.3e}", report.plateaus.len(), report.max_rel_error),
    )
}

fn c4_blowup_trend(_: &Runs) -> Outcome {
    let p = BlowupParams {
        c_lo: 0.2,
        c_hi: 0.8,
        u0: 1.0,
        x_inf: 1.0,
        ratio: 0.97,
        delta: DELTA,
        t_horizon: T_HORIZON,
        max_events: 10_000_000,
    };
    let table = blowup_study(cvx_model(), &p, &[25, 50, 100]).unwrap();
    let worst = table.rows.iter().map(|r| (r.max_u - r.predicted).abs() / r.predicted).fold(0.0, f64::max);
    let last = table.rows.last().unwrap();
    let growth = last.max_u / p.u0;
    let rows: Vec<String> = table.rows.iter().map(|r| format!("N={} u={:.8}", r.n_pairs, r.max_u)).collect();
    outcome(
        worst <= 1e-6 && table.strictly_increasing && growth >= 2.5,
        format!("{}; max relative error {worst:.3e}; growth {growth:.4}x", rows.join(", ")),
    )
}

fn c5_w_monotone(runs: &Runs) -> Outcome {
    let fns = cvx();
    let start = Instant::now();
    let sol = runs.n25();
    let run_secs = start.elapsed().as_secs_f64();
    let mut worst_drop = 0.0f64;
    let mut pieces = 0;
    let mut cs = Vec::new();
    let ts: Vec<f64> = (1..=20).map(|i| T_HORIZON * i as f64 / 20.0).collect();
    for row in sol.rows_pieces(&ts, 0.0, sol.x_stop()).unwrap() {
        pieces += row.len();
        let ws: Vec<f64> = row.iter().map(|p| fns.w_invariant(p.2)).collect();
        for w in ws.windows(2) {
            worst_drop = worst_drop.max(w[0] - w[1]);
        }
        cs.extend(row.iter().map(|p| p.2.c));
    }
    runs.row_samples.set(cs).ok();
    outcome(worst_drop <= 1e-9, format!(
            "20 lines, {pieces} constant pieces, largest decrease of W {worst_drop:.3e}; N=25 run {run_secs:.2}s, sampling {:.2}s",
            start.elapsed().as_secs_f64() - run_secs
        ),
    )
}

fn c6_max_principle(runs: &Runs) -> Outcome {
    let mut checked = 0usize;
    let mut outside = Vec::new();
    let mut check = |label: &str, cs: &mut dyn Iterator<Item = f64>| {
        for c in cs {
            checked += 1;
            if !(0.2..=0.8).contains(&c) {
                outside.push(format!("{label}: c={c}"));
            }
        }
    };
    let sols: [(&str, &Solution); 5] = [
        ("N=6", runs.n6()),
        ("N=6 half δ", runs.n6_half()),
        ("N=25", runs.n25()),
        ("cancellation", cancellation_run(runs)),
        ("LNG", lng_run(runs)),
    ];
    for (label, sol) in sols {
        check(label, &mut sol.fronts().iter().flat_map(|f| [f.below.c, f.above.c]));
        check(label, &mut sol.raw_bottom_trace().iter().map(|s| s.state.c));
    }
    if let Some(cs) = runs.row_samples.get() {
        check("N=25 rows", &mut cs.iter().copied());
    }
    let n = outside.len();
    outcome(
        n == 0,
        format!("{checked} sampled concentrations, {n} outside [0.2, 0.8]{}", outside.first().map(|s| format!(" (first {s})")).unwrap_or_default()),
    )
}

/// A shock from `x_2` overtakes the single sub-front of the fan from `x_1`;
/// with one sub-front the two have equal strength and cancel.
fn cancellation_run(runs: &Runs) -> &Solution {
    runs.cancellation.get_or_init(|| {
        let segs = vec![Segment { x: 0.0, c: 0.8 }, Segment { x: 0.1, c: 0.2 }, Segment { x: 0.2, c: 0.8 }];
        let sc = Scenario::new(cvx_model(), 1.0, 0.2, segs, T_HORIZON, 1.0, 0.7).unwrap();
        solve(cvx(), &sc)
    })
}

fn c7_rule_conformance(runs: &Runs) -> Outcome {
    let sol = runs.n25();
    let interactions: Vec<_> = sol.events().iter().filter(|e| e.kind == EventKind::Interaction).collect();
    let listed = interactions.iter().filter(|e| e.rule.is_some_and(RuleTag::is_table_interaction)).count();
    let synthetic = cancellation_run(runs);
    let cancellations = synthetic.events().iter().filter(|e| e.rule == Some(RuleTag::RsCdOnly)).count();
    let synthetic_ok = synthetic
        .events()
        .iter()
        .filter(|e| e.kind == EventKind::Interaction)
        .all(|e| e.rule.is_some_and(RuleTag::is_table_interaction));
    outcome(
        !interactions.is_empty() && listed == interactions.len() && cancellations >= 1 && synthetic_ok,
        format!(
            "N=25: {listed}/{} interactions tabulated; synthetic run: {cancellations} RS→CD-only",
            interactions.len()
        ),
    )
}

fn c8_residual_convergence(runs: &Runs) -> Outcome {
    let fns = cvx();
    let coarse = runs.n6();
    let fine = runs.n6_half();
    let x_stop = coarse.x_stop();
    // Rectangles that miss every sub-front have residual exactly zero.
    let meets = |r: &Rect| {
        coarse.fronts().iter().any(|f| {
            f.kind == FrontKind::RarSubfront && {
                let (a, b) = (f.x0.max(r.xa), f.x1.min(r.xb));
                a < b && {
                    let (t1, t2) = (f.t_at(a), f.t_at(b));
                    t1.min(t2) < r.tb && t1.max(t2) > r.ta
                }
            }
        })
    };
    let mut rng = ChaCha8Rng::seed_from_u64(12345);
    let mut rects = Vec::with_capacity(50);
    while rects.len() < 50 {
        let xa = rng.random_range(0.0..0.8 * x_stop);
        let w = rng.random_range(0.02..0.12);
        let ta = rng.random_range(0.05..1.05);
        let h = rng.random_range(0.05..0.25);
        let r = Rect::new(xa, (xa + w).min(x_stop), ta, ta + h).unwrap();
        if meets(&r) {
            rects.push(r);
        }
    }
    let median = |sol: &Solution| {
        let mut v: Vec<f64> = rects
            .iter()
            .map(|&r| {
                let [a, b] = conservation_residual(fns, sol, r, 3).unwrap();
                a.hypot(b)
            })
            .collect();
        v.sort_by(f64::total_cmp);
        0.5 * (v[24] + v[25])
    };
    let (m0, m1) = (median(coarse), median(fine));
    let ratio = m1 / m0;
    outcome(
        (0.3..=0.8).contains(&ratio),
        format!("median residual {m0:.3e} at δ={DELTA}, {m1:.3e} at δ={}; ratio {ratio:.3}", DELTA / 2.0),
    )
}

fn c9_fv_oracle(_: &Runs) -> Outcome {
    let fns = cvx();
    let sc = Scenario::new(cvx_model(), 1.0, 0.2, vec![Segment { x: 0.0, c: 0.8 }], 4.0, 1.0, DELTA).unwrap();
    let fan = solve_boundary_rp(fns, 0.8, 0.2, 1.0).unwrap();
    let err = |dt: f64| {
        let field = fv_run(fns, &sc, &FvConfig::new(dt, vec![0.5, 0.75, 1.0])).unwrap();
        let slice = field.slice(1.0).unwrap();
        let x = slice.x;
        let cmp = compare_with(slice, field.grid.dt, (0.0, 4.0), |t| fan.state_at(fns, t / x)).unwrap();
        (cmp, shock_slope(&field, 0.5).unwrap())
    };
    let (a, slope) = err(1e-3);
    let (b, _) = err(5e-4);
    let pass = a.l1_c <= 5e-3 * a.norm_c && b.l1_c < a.l1_c && b.l1_u < a.l1_u && (slope - 2.2).abs() <= 2e-2;
    outcome(
        pass,
        format!(
            "L1 c-error {:.3e} (bound {:.3e}), halved Δt {:.3e}; u-error {:.3e} -> {:.3e}; shock slope {slope:.5}",
            a.l1_c,
            5e-3 * a.norm_c,
            b.l1_c,
            a.l1_u,
            b.l1_u
        ),
    )
}

fn lng_fns() -> &'static DerivedFunctions {
    static F: OnceLock<DerivedFunctions> = OnceLock::new();
    F.get_or_init(|| DerivedFunctions::new(IsothermModel::inert_langmuir(1.0, 1.0).unwrap()).unwrap())
}

fn lng_run(runs: &Runs) -> &Solution {
    runs.lng.get_or_init(|| {
        let fns = lng_fns();
        let xs = geometric_points(1.0, 0.97, 6).unwrap();
        let (below, above) = shock_orientation(fns, 0.2, 0.8).unwrap();
        // R < 1 here, so the blow-up constructor refuses this model.
        let sc = Scenario::alternating(*fns.model(), 1.0, above, below, &xs, T_HORIZON, default_x_stop(&xs, 1.0), DELTA)
            .unwrap();
        solve(fns, &sc)
    })
}

fn c10_no_blowup(runs: &Runs) -> Outcome {
    let fns = lng_fns();
    let sign = gpp_sign_class(fns, 1025);
    let g = big_g_range(fns, 1025);
    let bound = 1.0 * g.max / g.min + 1e-9;
    let sol = lng_run(runs);
    let max_u = sol
        .fronts()
        .iter()
        .flat_map(|f| [f.below.u, f.above.u])
        .chain(sol.raw_bottom_trace().iter().map(|s| s.state.u))
        .fold(f64::NEG_INFINITY, f64::max);
    outcome(
        sign == SignClass::StrictlyPositive && max_u <= bound,
        format!("sign G'' {sign:?}; max u {max_u:.10} <= bound {bound:.10} over {} fronts", sol.fronts().len()),
    )
}

type Criterion = fn(&Runs) -> Outcome;

fn main() {
    let criteria: [(&str, Criterion, u64); 10] = [
        ("Temple null-amplification", c1_temple_null, 5),
        ("amplification regression", c2_amplification, 1),
        ("geometric growth", c3_geometric_growth, 10),
        ("blow-up trend", c4_blowup_trend, 60),
        ("W monotonicity", c5_w_monotone, 5),
        ("maximum principle", c6_max_principle, 10),
        ("interaction-rule conformance", c7_rule_conformance, 10),
        ("conservation residual", c8_residual_convergence, 30),
        ("finite-volume oracle agreement", c9_fv_oracle, 20),
        ("no-blow-up control", c10_no_blowup, 10),
    ];
    let runs = Runs::default();
    let mut failures = 0;
    for (k, (name, f, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(|| f(&runs)));
        let elapsed = start.elapsed();
        let (pass, detail) = match result {
            Ok(o) => (o.pass && elapsed <= Duration::from_secs(budget), o.detail),
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                (false, format!("panicked: {msg}"))
            }
        };
        if !pass {
            failures += 1;
        }
        println!(
            "criterion {:>2} {:<31} {}  [{:.2}s / {budget}s]  {detail}",
            k + 1,
            name,
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failures} failed", 10 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
