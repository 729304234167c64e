//! Alternating boundary data, growth bookkeeping along the bottom trace,
//! Temple classification and the blow-up study.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fronttrack::{run_with, EngineConfig, Solution};
use crate::model::{f_second_sign_on, gpp_sign_class, h_prime_sign_on, DerivedFunctions, IsothermModel, SignClass};
use crate::riemann::{amplification, amplification_factor, shock_orientation, State};

pub const DEFAULT_TEMPLE_GRID: usize = 32;
/// Largest `|R - 1|` still classified as Temple.
pub const TEMPLE_THRESHOLD: f64 = 1e-9;
pub const DEFAULT_GROWTH_TOL: f64 = 1e-8;
const RANGE_SAMPLES: usize = 1025;

/// From `x` on (until the next segment) the concentration at `t = 0` is `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub x: f64,
    pub c: f64,
}

/// Constant state `(boundary_c, u0)` entering at `x = 0` and piecewise
/// constant concentration along `t = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub model: IsothermModel,
    pub u0: f64,
    pub boundary_c: f64,
    pub segments: Vec<Segment>,
    pub t_horizon: f64,
    pub x_stop: f64,
    pub delta: f64,
}

impl Scenario {
    /// Checks structure only; no amplification or hypothesis requirements.
    pub fn new(
        model: IsothermModel,
        u0: f64,
        boundary_c: f64,
        segments: Vec<Segment>,
        t_horizon: f64,
        x_stop: f64,
        delta: f64,
    ) -> Result<Self> {
        let model = model.validated()?;
        State::new(boundary_c, u0)?;
        for (name, v) in [("t_horizon", t_horizon), ("x_stop", x_stop), ("delta", delta)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(name, format!("must be positive and finite, got {v}")));
            }
        }
        let mut last = f64::NEG_INFINITY;
        for s in &segments {
            if !(s.x >= 0.0 && s.x > last && s.x.is_finite()) {
                return Err(Error::param("segments", format!("abscissae must be non-negative and strictly increasing (at x={})", s.x)));
            }
            if !(0.0..=1.0).contains(&s.c) {
                return Err(Error::param("segments", format!("concentration {} outside [0, 1]", s.c)));
            }
            last = s.x;
        }
        Ok(Scenario { model, u0, boundary_c, segments, t_horizon, x_stop, delta })
    }

    /// Alternates `first, boundary_c, first, ...` at the given abscissae.
    #[allow(clippy::too_many_arguments)]
    pub fn alternating(
        model: IsothermModel,
        u0: f64,
        boundary_c: f64,
        first: f64,
        xs: &[f64],
        t_horizon: f64,
        x_stop: f64,
        delta: f64,
    ) -> Result<Self> {
        let segments = xs
            .iter()
            .enumerate()
            .map(|(k, &x)| Segment { x, c: if k % 2 == 0 { first } else { boundary_c } })
            .collect();
        Scenario::new(model, u0, boundary_c, segments, t_horizon, x_stop, delta)
    }

    /// The two concentrations used, as `(low, high)`.
    pub fn c_range(&self) -> (f64, f64) {
        let c1 = self.segments.first().map_or(self.boundary_c, |s| s.c);
        (self.boundary_c.min(c1), self.boundary_c.max(c1))
    }

    /// Number of shock/rarefaction pairs whose emissions lie before `x_stop`.
    pub fn completed_pairs(&self) -> usize {
        self.segments.iter().filter(|s| s.x < self.x_stop).count() / 2
    }
}

/// `x_k = X_inf (1 - ratio^k)` for `k = 0..2N`.
pub fn geometric_points(x_inf: f64, ratio: f64, n_pairs: usize) -> Result<Vec<f64>> {
    if !(x_inf > 0.0 && x_inf.is_finite()) {
        return Err(Error::param("x_inf", format!("must be positive, got {x_inf}")));
    }
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::param("ratio", format!("must lie in (0, 1), got {ratio}")));
    }
    if n_pairs == 0 {
        return Err(Error::param("n_pairs", "must be at least 1".to_string()));
    }
    let xs: Vec<f64> = (0..2 * n_pairs).map(|k| x_inf * (1.0 - ratio.powi(k as i32))).collect();
    if xs.windows(2).any(|w| !(w[0] < w[1])) || xs.last().is_some_and(|&x| !(x < x_inf)) {
        return Err(Error::param("ratio", format!("points no longer separate in floating point for N={n_pairs}")));
    }
    Ok(xs)
}

/// Halfway between the last point and the accumulation point.
pub fn default_x_stop(xs: &[f64], x_inf: f64) -> f64 {
    match xs.last() {
        Some(&x) => x + 0.5 * (x_inf - x),
        None => x_inf,
    }
}

fn check_range(fns: &DerivedFunctions, c_lo: f64, c_hi: f64) -> Result<()> {
    if !(0.0 < c_lo && c_lo < c_hi && c_hi < 1.0) {
        return Err(Error::param("c_lo/c_hi", format!("need 0 < c_lo < c_hi < 1, got ({c_lo}, {c_hi})")));
    }
    if !h_prime_sign_on(fns, c_lo, c_hi, RANGE_SAMPLES).is_strict() {
        return Err(Error::Hypothesis { hypothesis: "H2", detail: format!("h' vanishes on [{c_lo}, {c_hi}]") });
    }
    if !f_second_sign_on(fns, c_lo, c_hi, RANGE_SAMPLES).is_strict() {
        return Err(Error::Hypothesis { hypothesis: "H3", detail: format!("f'' vanishes on [{c_lo}, {c_hi}]") });
    }
    Ok(())
}

/// Alternating scenario oriented so that the emission at `x_0` is the
/// admissible shock: `boundary_c` is its upper value, the first segment its
/// lower one.
#[allow(clippy::too_many_arguments)]
pub fn build_alternating(
    fns: &DerivedFunctions,
    c_lo: f64,
    c_hi: f64,
    u0: f64,
    xs: &[f64],
    t_horizon: f64,
    x_stop: f64,
    delta: f64,
) -> Result<Scenario> {
    check_range(fns, c_lo, c_hi)?;
    amplification(fns, c_lo, c_hi)?;
    let (below, above) = shock_orientation(fns, c_lo, c_hi)?;
    Scenario::alternating(*fns.model(), u0, above, below, xs, t_horizon, x_stop, delta)
}

/// `R(c_lo, c_hi)^k u0`.
pub fn predict_growth(fns: &DerivedFunctions, c_lo: f64, c_hi: f64, u0: f64, k: u32) -> Result<f64> {
    if k == 0 {
        return Ok(u0);
    }
    Ok(amplification_factor(fns, c_lo, c_hi)?.powi(k as i32) * u0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlateauCheck {
    pub k: usize,
    pub x: f64,
    pub measured: f64,
    pub predicted: f64,
    pub rel_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub r: f64,
    pub u0: f64,
    pub rel_tol: f64,
    pub plateaus: Vec<PlateauCheck>,
    pub max_rel_error: f64,
    pub pass: bool,
}

/// Compares the plateau after each pair, `u_{2k}`, with `R^k u0`.
pub fn verify_growth(solution: &Solution, fns: &DerivedFunctions, scenario: &Scenario, rel_tol: f64) -> Result<GrowthReport> {
    if !(rel_tol > 0.0) {
        return Err(Error::param("rel_tol", format!("must be positive, got {rel_tol}")));
    }
    let pairs = scenario.segments.len() / 2;
    let (c_lo, c_hi) = scenario.c_range();
    let r = if pairs == 0 { 1.0 } else { amplification_factor(fns, c_lo, c_hi)? };
    let raw = solution.raw_bottom_trace();
    let mut plateaus = Vec::with_capacity(pairs);
    for k in 1..=pairs {
        let Some(seg) = raw.iter().find(|s| s.emission == Some(2 * k - 1)) else {
            return Err(Error::Precondition(format!(
                "only {} of {pairs} pairs were emitted before x_stop={}",
                k - 1,
                solution.x_stop()
            )));
        };
        let predicted = r.powi(k as i32) * scenario.u0;
        let measured = seg.state.u;
        plateaus.push(PlateauCheck { k, x: seg.x_start, measured, predicted, rel_error: (measured - predicted).abs() / predicted });
    }
    let max_rel_error = plateaus.iter().map(|p| p.rel_error).fold(0.0, f64::max);
    Ok(GrowthReport { r, u0: scenario.u0, rel_tol, plateaus, max_rel_error, pass: max_rel_error <= rel_tol })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TempleClass {
    Temple,
    NotTemple,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineFit {
    pub alpha: f64,
    pub beta: f64,
    /// Largest `|α q1 + (α - 1) q2 + c + β|` on the grid.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TempleVerdict {
    pub verdict: TempleClass,
    pub max_deviation: f64,
    /// Pair `(c_below, c_above)` where the deviation peaks.
    pub argmax: (f64, f64),
    pub pairs: usize,
    /// Pairs with no admissible shock orientation.
    pub skipped_pairs: usize,
    pub affine_fit: AffineFit,
    pub sign_gpp: SignClass,
    pub grid_n: usize,
}

fn affine_fit(fns: &DerivedFunctions, grid: &[f64]) -> AffineFit {
    // α h + β = q2 - c in the least-squares sense.
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    let pts: Vec<(f64, f64)> = grid.iter().map(|&c| (fns.h(c).value, fns.q2(c).value - c)).collect();
    for &(x, y) in &pts {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let n = pts.len() as f64;
    let det = n * sxx - sx * sx;
    let (alpha, beta) = if det.abs() <= 1e-300 { (0.0, sy / n) } else { ((n * sxy - sx * sy) / det, (sxx * sy - sx * sxy) / det) };
    let residual = grid
        .iter()
        .map(|&c| (alpha * fns.q1(c).value + (alpha - 1.0) * fns.q2(c).value + c + beta).abs())
        .fold(0.0, f64::max);
    AffineFit { alpha, beta, residual }
}

/// Temple verdict from the amplification coefficient on an interior grid.
pub fn classify_temple(fns: &DerivedFunctions, grid_n: usize) -> Result<TempleVerdict> {
    if grid_n < 8 {
        return Err(Error::param("grid_n", format!("need at least 8, got {grid_n}")));
    }
    let grid: Vec<f64> = (1..=grid_n).map(|i| i as f64 / (grid_n + 1) as f64).collect();
    let mut max_deviation: f64 = 0.0;
    let mut argmax = (f64::NAN, f64::NAN);
    let (mut pairs, mut skipped) = (0, 0);
    for (i, &a) in grid.iter().enumerate() {
        for &b in &grid[i + 1..] {
            let Ok((below, above)) = shock_orientation(fns, a, b) else {
                skipped += 1;
                continue;
            };
            pairs += 1;
            let dev = (amplification_factor(fns, a, b)? - 1.0).abs();
            if dev > max_deviation || argmax.0.is_nan() {
                max_deviation = dev;
                argmax = (below, above);
            }
        }
    }
    if pairs == 0 {
        return Err(Error::Hypothesis { hypothesis: "H3", detail: "no concentration pair admits a shock".into() });
    }
    let verdict = if max_deviation <= TEMPLE_THRESHOLD { TempleClass::Temple } else { TempleClass::NotTemple };
    Ok(TempleVerdict {
        verdict,
        max_deviation,
        argmax,
        pairs,
        skipped_pairs: skipped,
        affine_fit: affine_fit(fns, &grid),
        sign_gpp: gpp_sign_class(fns, RANGE_SAMPLES),
        grid_n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlowupParams {
    pub c_lo: f64,
    pub c_hi: f64,
    pub u0: f64,
    pub x_inf: f64,
    pub ratio: f64,
    pub delta: f64,
    pub t_horizon: f64,
    pub max_events: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlowupRow {
    pub n_pairs: usize,
    pub x_stop: f64,
    pub max_u: f64,
    pub predicted: f64,
    pub events: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupTable {
    pub r: f64,
    pub rows: Vec<BlowupRow>,
    /// Every row reaches `(1 - 1e-8) R^N u0`.
    pub reaches_prediction: bool,
    /// `max_u` strictly increases along the rows.
    pub strictly_increasing: bool,
}

/// One front-tracking run per entry of `n_list`, run concurrently.
pub fn blowup_study(model: IsothermModel, p: &BlowupParams, n_list: &[usize]) -> Result<BlowupTable> {
    let fns = DerivedFunctions::new(model)?;
    if !(0.0 < p.c_lo && p.c_lo < p.c_hi && p.c_hi < 1.0) {
        return Err(Error::param("c_lo/c_hi", format!("need 0 < c_lo < c_hi < 1, got ({}, {})", p.c_lo, p.c_hi)));
    }
    let r = amplification_factor(&fns, p.c_lo, p.c_hi)?;
    check_range(&fns, p.c_lo, p.c_hi)?;
    let (below, above) = shock_orientation(&fns, p.c_lo, p.c_hi)?;
    let results: Vec<Result<BlowupRow>> = std::thread::scope(|scope| {
        let handles: Vec<_> = n_list
            .iter()
            .map(|&n| {
                let fns = &fns;
                scope.spawn(move || -> Result<BlowupRow> {
                    let start = Instant::now();
                    let xs = geometric_points(p.x_inf, p.ratio, n)?;
                    let x_stop = default_x_stop(&xs, p.x_inf);
                    let sc = Scenario::alternating(model, p.u0, above, below, &xs, p.t_horizon, x_stop, p.delta)?;
                    let mut cfg = EngineConfig::for_scenario(&sc);
                    cfg.max_events = p.max_events;
                    cfg.keep_history = false;
                    let sol = run_with(fns, &sc, cfg)?;
                    Ok(BlowupRow {
                        n_pairs: n,
                        x_stop,
                        max_u: sol.max_bottom_u(),
                        predicted: r.powi(n as i32) * p.u0,
                        events: sol.meta().n_events,
                        seconds: start.elapsed().as_secs_f64(),
                    })
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("blow-up worker panicked")).collect()
    });
    let rows = results.into_iter().collect::<Result<Vec<_>>>()?;
    let reaches_prediction = rows.iter().all(|row| row.max_u >= (1.0 - 1e-8) * row.predicted);
    let strictly_increasing = rows.windows(2).all(|w| w[1].max_u > w[0].max_u);
    Ok(BlowupTable { r, rows, reaches_prediction, strictly_increasing })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fronttrack::run;

    fn cvx() -> DerivedFunctions {
        DerivedFunctions::new(IsothermModel::inert_convex_quadratic(1.0, 0.5).unwrap()).unwrap()
    }

    fn lin() -> DerivedFunctions {
        DerivedFunctions::new(IsothermModel::linear(0.0, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn geometric_points_examples() {
        assert_eq!(geometric_points(1.0, 0.5, 2).unwrap(), vec![0.0, 0.5, 0.75, 0.875]);
        let one = geometric_points(1.0, 0.97, 1).unwrap();
        assert_eq!(one.len(), 2);
        assert!((one[1] - 0.03).abs() < 1e-15);
        assert!(geometric_points(1.0, 0.97, 100).unwrap().iter().all(|&x| x < 1.0));
        assert!(geometric_points(1.0, 1.0, 2).is_err());
        assert!(geometric_points(0.0, 0.5, 2).is_err());
        assert!(geometric_points(1.0, 0.5, 0).is_err());
    }

    #[test]
    fn cvx_orientation_puts_shock_first() {
        let m = cvx();
        let xs = geometric_points(1.0, 0.5, 2).unwrap();
        let s = build_alternating(&m, 0.2, 0.8, 1.0, &xs, 10.0, 0.9, 5e-3).unwrap();
        assert_eq!(s.boundary_c, 0.2);
        let cs: Vec<f64> = s.segments.iter().map(|s| s.c).collect();
        assert_eq!(cs, vec![0.8, 0.2, 0.8, 0.2]);
        assert_eq!(s.completed_pairs(), 2);
    }

    #[test]
    fn concave_flux_orientation_swaps() {
        // f'' = -2 < 0 for this linear pair.
        let m = DerivedFunctions::new(IsothermModel::linear(1.0, 0.0).unwrap()).unwrap();
        let (below, above) = shock_orientation(&m, 0.2, 0.8).unwrap();
        assert_eq!((below, above), (0.2, 0.8));
        let s = build_alternating(&m, 0.2, 0.8, 1.0, &[0.0, 0.5], 10.0, 0.9, 5e-3).unwrap();
        assert_eq!(s.boundary_c, 0.8);
        assert_eq!(s.segments[0].c, 0.2);
    }

    #[test]
    fn empty_scenario_is_constant() {
        let m = cvx();
        let s = build_alternating(&m, 0.2, 0.8, 1.0, &[], 10.0, 0.5, 5e-3).unwrap();
        assert!(s.segments.is_empty());
        let sol = run(&s).unwrap();
        assert!(sol.fronts().is_empty());
        let rep = verify_growth(&sol, &m, &s, 1e-8).unwrap();
        assert!(rep.plateaus.is_empty() && rep.pass);
    }

    #[test]
    fn growth_prediction() {
        let m = cvx();
        assert_eq!(predict_growth(&m, 0.2, 0.8, 1.7, 0).unwrap(), 1.7);
        let u74 = predict_growth(&m, 0.2, 0.8, 1.0, 74).unwrap();
        assert!((u74 - 2.0).abs() < 0.1);
        // Frozen from the high-precision oracle for R.
        assert!((u74 - 1.99411).abs() < 1e-4);
        assert!((predict_growth(&lin(), 0.2, 0.8, 1.3, 40).unwrap() - 1.3).abs() < 1e-12);
    }

    #[test]
    fn one_pair_grows_by_r() {
        let m = cvx();
        let xs = geometric_points(1.0, 0.5, 1).unwrap();
        let s = build_alternating(&m, 0.2, 0.8, 1.0, &xs, 10.0, 0.75, 5e-3).unwrap();
        let sol = run(&s).unwrap();
        let rep = verify_growth(&sol, &m, &s, 1e-8).unwrap();
        assert_eq!(rep.plateaus.len(), 1);
        assert!(rep.pass, "{rep:?}");
        assert!((rep.plateaus[0].measured - 1.0093706459051475).abs() < 1e-10);
    }

    #[test]
    fn verify_growth_needs_all_pairs() {
        let m = cvx();
        let xs = geometric_points(1.0, 0.5, 2).unwrap();
        let s = build_alternating(&m, 0.2, 0.8, 1.0, &xs, 10.0, 0.6, 5e-3).unwrap();
        let sol = run(&s).unwrap();
        assert!(matches!(verify_growth(&sol, &m, &s, 1e-8), Err(Error::Precondition(_))));
    }

    #[test]
    fn temple_verdicts() {
        let v = classify_temple(&lin(), DEFAULT_TEMPLE_GRID).unwrap();
        assert_eq!(v.verdict, TempleClass::Temple);
        assert!(v.max_deviation <= 1e-10);
        assert!(v.affine_fit.residual <= 1e-10);

        let v = classify_temple(&cvx(), DEFAULT_TEMPLE_GRID).unwrap();
        assert_eq!(v.verdict, TempleClass::NotTemple);
        assert!(v.max_deviation >= 5e-3);
        assert_eq!(v.sign_gpp, SignClass::StrictlyNegative);

        let inert_linear = DerivedFunctions::new(IsothermModel::inert_convex_quadratic(1.0, 0.0).unwrap()).unwrap();
        assert_eq!(classify_temple(&inert_linear, 16).unwrap().verdict, TempleClass::Temple);

        let same_k = DerivedFunctions::new(IsothermModel::binary_langmuir(1.0, 2.0, 0.5, 2.0).unwrap()).unwrap();
        assert_eq!(classify_temple(&same_k, 16).unwrap().verdict, TempleClass::Temple);

        assert!(classify_temple(&lin(), 4).is_err());
    }

    #[test]
    fn lin_blowup_is_flat() {
        let p = BlowupParams { c_lo: 0.2, c_hi: 0.8, u0: 1.0, x_inf: 1.0, ratio: 0.9, delta: 0.05, t_horizon: 5.0, max_events: 1_000_000 };
        let model = IsothermModel::linear(0.0, 1.0).unwrap();
        let t = blowup_study(model, &p, &[1, 3]).unwrap();
        assert!((t.r - 1.0).abs() < 1e-12);
        for row in &t.rows {
            assert!((row.max_u - 1.0).abs() < 1e-10);
        }
        assert!(!t.strictly_increasing);
    }

    #[test]
    fn cvx_single_pair_study() {
        let p = BlowupParams { c_lo: 0.2, c_hi: 0.8, u0: 1.0, x_inf: 1.0, ratio: 0.9, delta: 0.05, t_horizon: 5.0, max_events: 1_000_000 };
        let model = IsothermModel::inert_convex_quadratic(1.0, 0.5).unwrap();
        let t = blowup_study(model, &p, &[1, 2]).unwrap();
        assert!((t.rows[0].max_u - t.r).abs() < 1e-10);
        assert!(t.reaches_prediction && t.strictly_increasing);
    }
}
