use std::path::PathBuf;

use serde::Serialize;
use serde_json::json;
use wavefront_core::fronttrack::{run_with, EngineConfig, Solution};
use wavefront_core::fvref::{compare, compare_with, fv_run, shock_slope, FvConfig, FvField};
use wavefront_core::model::check_hypotheses;
use wavefront_core::riemann::{shock_orientation, solve_boundary_rp, LambdaWave};
use wavefront_core::scenario::{
    blowup_study, classify_temple, default_x_stop, geometric_points, verify_growth, BlowupParams, Segment,
};
use wavefront_core::{DerivedFunctions, Scenario};

use crate::config::{Command, RunPlan};
use crate::output::{fmt_f64, to_json, write_atomic, Csv};
use crate::CliError;

/// What a successful command produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    /// JSON document printed on stdout.
    pub json: String,
    pub files: Vec<PathBuf>,
}

pub fn execute(plan: &RunPlan) -> Result<Report, CliError> {
    let fns = DerivedFunctions::with_tolerance(plan.model, plan.numerics.tolerance)?;
    match plan.command {
        Command::CheckModel => Ok(stdout_only(&check_hypotheses(&fns, plan.numerics.samples)?)),
        Command::Temple => Ok(stdout_only(&classify_temple(&fns, plan.numerics.temple_grid)?)),
        Command::Riemann => riemann(plan, &fns),
        Command::Simulate => simulate(plan, &fns),
        Command::Blowup => blowup(plan),
        Command::CompareFv => compare_fv(plan, &fns),
    }
}

fn stdout_only<T: Serialize>(value: &T) -> Report {
    Report { json: to_json(value), files: Vec::new() }
}

fn riemann(plan: &RunPlan, fns: &DerivedFunctions) -> Result<Report, CliError> {
    let r = plan.riemann.expect("validated plan has [riemann]");
    let fan = solve_boundary_rp(fns, r.c0, r.c_plus, r.u_plus)?;
    let mut out = json!({
        "c0": r.c0,
        "c_plus": r.c_plus,
        "u_plus": r.u_plus,
        "kind": fan.wave.kind_name(),
        "u0": fan.contact_u,
    });
    match fan.wave {
        LambdaWave::None => {}
        LambdaWave::Shock(s) => {
            out["s"] = json!(s.speed);
        }
        LambdaWave::Rarefaction(f) => {
            out["z0"] = json!(f.z0);
            out["z_plus"] = json!(f.z_plus);
            out["W"] = json!(f.invariant);
        }
    }
    Ok(stdout_only(&out))
}

fn alternating_scenario(plan: &RunPlan, fns: &DerivedFunctions) -> Result<Scenario, CliError> {
    let s = &plan.scenario;
    let xs = geometric_points(s.x_inf, s.ratio, s.n_pairs)?;
    let x_stop = s.x_stop.unwrap_or_else(|| default_x_stop(&xs, s.x_inf));
    let (below, above) = shock_orientation(fns, s.c_lo, s.c_hi)?;
    Ok(Scenario::alternating(plan.model, s.u0, above, below, &xs, s.t_max, x_stop, s.delta)?)
}

fn ids(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(";")
}

fn write_solution(plan: &RunPlan, sol: &Solution) -> Result<Vec<PathBuf>, CliError> {
    let dir = &plan.out_dir;
    let mut files = Vec::new();

    let mut fronts = Csv::new(&[
        "id", "kind", "x0", "t0", "x1", "t1", "c_below", "c_above", "u_below", "u_above", "strength", "lineage",
    ]);
    for f in sol.fronts() {
        let lineage = f.lineage.iter().map(u32::to_string).collect::<Vec<_>>().join(";");
        fronts.row([
            f.id.to_string(),
            f.kind.as_str().to_string(),
            fmt_f64(f.x0),
            fmt_f64(f.t0),
            fmt_f64(f.x1),
            fmt_f64(f.t1()),
            fmt_f64(f.below.c),
            fmt_f64(f.above.c),
            fmt_f64(f.below.u),
            fmt_f64(f.above.u),
            fmt_f64(f.strength()),
            lineage,
        ]);
    }
    files.push(dir.join("fronts.csv"));
    fronts.write_to(files.last().unwrap())?;

    let mut events = Csv::new(&["x", "t", "kind", "rule_tag", "in_ids", "out_ids"]);
    for e in sol.events() {
        events.row([
            fmt_f64(e.x),
            fmt_f64(e.t),
            e.kind.as_str().to_string(),
            e.rule.map(|r| r.as_str()).unwrap_or("").to_string(),
            ids(&e.in_ids),
            ids(&e.out_ids),
        ]);
    }
    files.push(dir.join("events.csv"));
    events.write_to(files.last().unwrap())?;

    let mut bottom = Csv::new(&["k", "x_start", "x_end", "c", "u"]);
    for (k, s) in sol.raw_bottom_trace().iter().enumerate() {
        bottom.row([k.to_string(), fmt_f64(s.x_start), fmt_f64(s.x_end), fmt_f64(s.state.c), fmt_f64(s.state.u)]);
    }
    files.push(dir.join("bottom_trace.csv"));
    bottom.write_to(files.last().unwrap())?;

    let (nt, nx) = (plan.output.fields_nt, plan.output.fields_nx);
    let ts: Vec<f64> = (0..nt).map(|i| sol.t_horizon() * i as f64 / (nt - 1) as f64).collect();
    let xs: Vec<f64> = (0..nx).map(|j| sol.x_stop() * j as f64 / (nx - 1) as f64).collect();
    let grid = sol.sample_grid(&ts, &xs)?;
    let mut fields = Csv::new(&["t", "x", "c", "u"]);
    for (i, row) in grid.iter().enumerate() {
        for (j, s) in row.iter().enumerate() {
            fields.row([fmt_f64(ts[i]), fmt_f64(xs[j]), fmt_f64(s.c), fmt_f64(s.u)]);
        }
    }
    files.push(dir.join("fields.csv"));
    fields.write_to(files.last().unwrap())?;
    Ok(files)
}

fn file_names(files: &[PathBuf]) -> Vec<String> {
    files.iter().filter_map(|p| p.file_name()).map(|n| n.to_string_lossy().into_owned()).collect()
}

fn finish(plan: &RunPlan, mut files: Vec<PathBuf>, mut report: serde_json::Value) -> Result<Report, CliError> {
    let path = plan.out_dir.join("report.json");
    files.push(path.clone());
    report["files"] = json!(file_names(&files));
    let text = to_json(&report);
    write_atomic(&path, text.as_bytes())?;
    Ok(Report { json: text, files })
}

fn simulate(plan: &RunPlan, fns: &DerivedFunctions) -> Result<Report, CliError> {
    let sc = alternating_scenario(plan, fns)?;
    let mut cfg = EngineConfig::for_scenario(&sc);
    cfg.max_events = plan.scenario.max_events;
    let sol = run_with(fns, &sc, cfg)?;
    let growth = verify_growth(&sol, fns, &sc, plan.numerics.growth_tol).ok();
    let files = write_solution(plan, &sol)?;
    let report = json!({
        "command": plan.command.as_str(),
        "scenario": sc,
        "run": sol.meta(),
        "growth": growth,
    });
    finish(plan, files, report)
}

fn blowup(plan: &RunPlan) -> Result<Report, CliError> {
    let s = &plan.scenario;
    let params = BlowupParams {
        c_lo: s.c_lo,
        c_hi: s.c_hi,
        u0: s.u0,
        x_inf: s.x_inf,
        ratio: s.ratio,
        delta: s.delta,
        t_horizon: s.t_max,
        max_events: s.max_events,
    };
    let table = blowup_study(plan.model, &params, &s.n_list)?;
    let mut csv = Csv::new(&["N", "max_u", "predicted", "events", "seconds"]);
    for r in &table.rows {
        csv.row([r.n_pairs.to_string(), fmt_f64(r.max_u), fmt_f64(r.predicted), r.events.to_string(), fmt_f64(r.seconds)]);
    }
    let path = plan.out_dir.join("growth.csv");
    csv.write_to(&path)?;
    let report = json!({
        "command": plan.command.as_str(),
        "model": plan.model,
        "params": params,
        "table": table,
    });
    finish(plan, vec![path], report)
}

fn write_field(plan: &RunPlan, field: &FvField) -> Result<PathBuf, CliError> {
    let mut csv = Csv::new(&["x", "t", "c", "u"]);
    for slice in &field.slices {
        for (j, s) in slice.states.iter().enumerate() {
            csv.row([fmt_f64(slice.x), fmt_f64(slice.t_center(field.grid.dt, j)), fmt_f64(s.c), fmt_f64(s.u)]);
        }
    }
    let path = plan.out_dir.join("fv_field.csv");
    csv.write_to(&path)?;
    Ok(path)
}

fn compare_fv(plan: &RunPlan, fns: &DerivedFunctions) -> Result<Report, CliError> {
    let r = plan.riemann.expect("validated plan has [riemann]");
    let s = &plan.scenario;
    let x = plan.fv.x_slice;
    let t_range = plan.fv.t_range.map_or((0.0, s.t_max), |[a, b]| (a, b));
    let sc = Scenario::new(plan.model, r.u_plus, r.c_plus, vec![Segment { x: 0.0, c: r.c0 }], s.t_max, x, s.delta)?;

    let mut cfg = EngineConfig::for_scenario(&sc);
    cfg.max_events = s.max_events;
    let sol = run_with(fns, &sc, cfg)?;
    let fv_cfg = FvConfig { dt: plan.fv.dt, cfl: plan.fv.cfl, slices: vec![0.5 * x, 0.75 * x, x] };
    let field = fv_run(fns, &sc, &fv_cfg)?;
    let slice = field.slice(x)?;

    let fan = solve_boundary_rp(fns, r.c0, r.c_plus, r.u_plus)?;
    let vs_exact = compare_with(slice, field.grid.dt, t_range, |t| fan.state_at(fns, t / slice.x))?;
    let vs_front_tracking = compare(&sol, &field, x, t_range)?;
    let (exact_slope, measured_slope) = match fan.wave {
        LambdaWave::Shock(sh) => (Some(sh.speed), Some(shock_slope(&field, 0.5 * (r.c0 + r.c_plus))?)),
        _ => (None, None),
    };
    let path = write_field(plan, &field)?;
    let report = json!({
        "command": plan.command.as_str(),
        "riemann": r,
        "x_slice": x,
        "x_recorded": slice.x,
        "t_range": [t_range.0, t_range.1],
        "grid": field.grid,
        "conservation_drift": field.conservation_drift,
        "max_courant": field.max_courant,
        "vs_exact": vs_exact,
        "vs_front_tracking": vs_front_tracking,
        "shock_slope_exact": exact_slope,
        "shock_slope_measured": measured_slope,
    });
    finish(plan, vec![path], report)
}
