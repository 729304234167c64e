//! First-order Godunov reference solver. Marches in `x` with uniform cells
//! in `t` on `[0, T]` and is independent of the front-tracking code.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fronttrack::Solution;
use crate::model::{big_g_range, gpp_sign_class, DerivedFunctions, SignClass};
use crate::riemann::State;
use crate::scenario::Scenario;

pub const DEFAULT_CFL: f64 = 0.9;
const BOUND_SAMPLES: usize = 1025;
const C_SLACK: f64 = 1e-12;

/// `Φ(c) = (h(c), c + q1(c))`.
pub fn flux(fns: &DerivedFunctions, c: f64) -> [f64; 2] {
    [fns.h(c).value, fns.flux_i(c)]
}

/// Both eigenvalues are non-negative and `Φ` depends on `c` alone, which
/// is continuous across the 0-contact sitting on the interface, so the
/// Godunov flux is the flux of the cell below.
pub fn godunov_flux(fns: &DerivedFunctions, below: State, _above: State) -> [f64; 2] {
    flux(fns, below.c)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FvConfig {
    pub dt: f64,
    pub cfl: f64,
    /// Abscissae at which the column of cell averages is recorded.
    pub slices: Vec<f64>,
}

impl FvConfig {
    pub fn new(dt: f64, slices: Vec<f64>) -> Self {
        FvConfig { dt, cfl: DEFAULT_CFL, slices }
    }
}

/// Grid actually used by a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FvGrid {
    pub dt: f64,
    pub dx: f64,
    pub n_cells: usize,
    pub n_steps: usize,
    /// `λ̄` from the a-priori bounds.
    pub lambda_bound: f64,
    /// Lower bound on `u` used for `λ̄`; the run aborts if it is violated.
    pub u_floor: f64,
    pub cfl: f64,
}

/// Cell averages at one abscissa.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FvSlice {
    /// Requested abscissa.
    pub x_requested: f64,
    /// Abscissa of the recorded step.
    pub x: f64,
    pub states: Vec<State>,
}

impl FvSlice {
    pub fn t_center(&self, dt: f64, j: usize) -> f64 {
        (j as f64 + 0.5) * dt
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FvField {
    pub grid: FvGrid,
    pub slices: Vec<FvSlice>,
    /// Relative defect of `Σ U Δt` against the accumulated boundary fluxes.
    pub conservation_drift: [f64; 2],
    /// Largest `λ Δx / Δt` met during the run.
    pub max_courant: f64,
    pub min_u: f64,
}

impl FvField {
    pub fn slice(&self, x: f64) -> Result<&FvSlice> {
        self.slices
            .iter()
            .find(|s| s.x_requested == x)
            .ok_or_else(|| Error::Domain(format!("no slice recorded at x={x}")))
    }
}

/// `λ̄` and the `u` floor it rests on. With `G'' < 0` the invariant `W` does
/// not decrease in `x`, so `u ≥ min W / max G`; otherwise half the inflow `u`.
fn speed_bound(fns: &DerivedFunctions, scenario: &Scenario) -> (f64, f64) {
    let n = BOUND_SAMPLES;
    let max_h = (0..n).map(|i| fns.big_h(i as f64 / (n - 1) as f64).0).fold(f64::NEG_INFINITY, f64::max);
    let u_floor = if gpp_sign_class(fns, n) == SignClass::StrictlyNegative {
        let w_min = scenario.u0 * fns.g(scenario.boundary_c).exp();
        w_min / big_g_range(fns, n).max
    } else {
        0.5 * scenario.u0
    };
    (max_h / u_floor, u_floor)
}

fn bottom_c(scenario: &Scenario, x: f64) -> f64 {
    let k = scenario.segments.partition_point(|s| s.x <= x);
    if k == 0 {
        scenario.boundary_c
    } else {
        scenario.segments[k - 1].c
    }
}

fn states_of(u: &[f64], m: &[f64]) -> Vec<State> {
    u.iter().zip(m).map(|(&u, &m)| State { c: (m / u).clamp(0.0, 1.0), u }).collect()
}

pub fn plan_grid(fns: &DerivedFunctions, scenario: &Scenario, cfg: &FvConfig) -> Result<FvGrid> {
    if !(cfg.dt > 0.0 && cfg.dt.is_finite() && cfg.dt < scenario.t_horizon) {
        return Err(Error::param("dt", format!("must lie in (0, T), got {}", cfg.dt)));
    }
    if !(cfg.cfl > 0.0 && cfg.cfl <= 1.0) {
        return Err(Error::param("cfl", format!("must lie in (0, 1], got {}", cfg.cfl)));
    }
    for &x in &cfg.slices {
        if !(0.0..=scenario.x_stop).contains(&x) {
            return Err(Error::Domain(format!("slice x={x} outside [0, {}]", scenario.x_stop)));
        }
    }
    let (lambda_bound, u_floor) = speed_bound(fns, scenario);
    let n_cells = (scenario.t_horizon / cfg.dt).round().max(1.0) as usize;
    let dt = scenario.t_horizon / n_cells as f64;
    let n_steps = (scenario.x_stop * lambda_bound / (cfg.cfl * dt)).ceil().max(1.0) as usize;
    let dx = scenario.x_stop / n_steps as f64;
    Ok(FvGrid { dt, dx, n_cells, n_steps, lambda_bound, u_floor, cfl: lambda_bound * dx / dt })
}

/// Runs the scheme from `x = 0` to `scenario.x_stop`.
pub fn fv_run(fns: &DerivedFunctions, scenario: &Scenario, cfg: &FvConfig) -> Result<FvField> {
    let grid = plan_grid(fns, scenario, cfg)?;
    let FvGrid { dt, dx, n_cells, n_steps, u_floor, .. } = grid;
    let r = dx / dt;

    let mut u = vec![scenario.u0; n_cells];
    let mut m = vec![scenario.u0 * scenario.boundary_c; n_cells];
    let mut f = vec![[0.0; 2]; n_cells + 1];

    let mut wanted: Vec<(usize, f64)> = cfg
        .slices
        .iter()
        .map(|&x| (((x / dx).round() as usize).min(n_steps), x))
        .collect();
    wanted.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut slices = Vec::with_capacity(wanted.len());
    let mut next = 0;

    let mass0 = [u.iter().sum::<f64>() * dt, m.iter().sum::<f64>() * dt];
    let mut inflow = [0.0f64; 2];
    let mut max_courant = 0.0f64;
    let mut min_u = f64::INFINITY;

    for n in 0..=n_steps {
        while next < wanted.len() && wanted[next].0 == n {
            slices.push(FvSlice { x_requested: wanted[next].1, x: n as f64 * dx, states: states_of(&u, &m) });
            next += 1;
        }
        if n == n_steps {
            break;
        }

        // Interface j sits below cell j; interface n_cells is the top.
        f[0] = flux(fns, bottom_c(scenario, (n as f64 + 0.5) * dx));
        for j in 0..n_cells {
            let c = m[j] / u[j];
            if !(-C_SLACK..=1.0 + C_SLACK).contains(&c) {
                return Err(Error::Inconsistent(format!("c={c} left [0, 1] at x={}, cell {j}", n as f64 * dx)));
            }
            let c = c.clamp(0.0, 1.0);
            max_courant = max_courant.max(fns.big_h(c).0 / u[j] * r);
            f[j + 1] = flux(fns, c);
        }
        for k in 0..2 {
            inflow[k] += dx * (f[0][k] - f[n_cells][k]);
        }
        for j in 0..n_cells {
            u[j] -= r * (f[j + 1][0] - f[j][0]);
            m[j] -= r * (f[j + 1][1] - f[j][1]);
            if !(u[j] > 0.0) {
                return Err(Error::Cfl(format!("u={} at x={}, cell {j}", u[j], (n + 1) as f64 * dx)));
            }
            min_u = min_u.min(u[j]);
        }
        if min_u < u_floor * (1.0 - 1e-12) {
            return Err(Error::Cfl(format!("u={min_u} fell below the a-priori floor {u_floor}; the step bound no longer holds")));
        }
        if max_courant > 1.0 {
            return Err(Error::Cfl(format!("Courant number {max_courant} exceeds 1")));
        }
    }

    let mass = [u.iter().sum::<f64>() * dt, m.iter().sum::<f64>() * dt];
    let mut drift = [0.0; 2];
    for k in 0..2 {
        let scale = mass0[k].abs().max(mass[k].abs()).max(inflow[k].abs()).max(f64::MIN_POSITIVE);
        drift[k] = (mass[k] - mass0[k] - inflow[k]).abs() / scale;
    }
    let order: Vec<f64> = cfg.slices.clone();
    slices.sort_by(|a, b| {
        let pa = order.iter().position(|&x| x == a.x_requested);
        let pb = order.iter().position(|&x| x == b.x_requested);
        pa.cmp(&pb)
    });
    Ok(FvField { grid, slices, conservation_drift: drift, max_courant, min_u: min_u.min(scenario.u0) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FvComparison {
    pub x: f64,
    pub t_range: (f64, f64),
    pub l1_c: f64,
    pub l1_u: f64,
    /// `L1` norms of the reference over the same cells.
    pub norm_c: f64,
    pub norm_u: f64,
    pub cells: usize,
}

/// `L1` differences over the cells of `slice` whose centres lie in
/// `t_range`, with the reference sampled at the centres.
pub fn compare_with(
    slice: &FvSlice,
    dt: f64,
    t_range: (f64, f64),
    reference: impl Fn(f64) -> Result<State>,
) -> Result<FvComparison> {
    let (ta, tb) = t_range;
    if !(ta < tb) {
        return Err(Error::param("t_range", format!("need ta < tb, got ({ta}, {tb})")));
    }
    let span = slice.states.len() as f64 * dt;
    if ta < 0.0 || tb > span * (1.0 + 1e-12) {
        return Err(Error::Domain(format!("t_range ({ta}, {tb}) outside the grid [0, {span}]")));
    }
    let mut out = FvComparison { x: slice.x, t_range, l1_c: 0.0, l1_u: 0.0, norm_c: 0.0, norm_u: 0.0, cells: 0 };
    for (j, s) in slice.states.iter().enumerate() {
        let t = slice.t_center(dt, j);
        if t < ta || t > tb {
            continue;
        }
        let e = reference(t)?;
        out.l1_c += (s.c - e.c).abs() * dt;
        out.l1_u += (s.u - e.u).abs() * dt;
        out.norm_c += e.c.abs() * dt;
        out.norm_u += e.u.abs() * dt;
        out.cells += 1;
    }
    if out.cells == 0 {
        return Err(Error::Domain(format!("no cell centre in ({ta}, {tb})")));
    }
    Ok(out)
}

/// Front-tracking solution against the slice recorded at `x_slice`.
pub fn compare(solution: &Solution, field: &FvField, x_slice: f64, t_range: (f64, f64)) -> Result<FvComparison> {
    let slice = field.slice(x_slice)?;
    if t_range.1 > solution.t_horizon() {
        return Err(Error::Domain(format!("t_range ends at {} beyond the front-tracking horizon", t_range.1)));
    }
    // Sampled on the recorded step so both sides see the same abscissa.
    let column = solution.column(slice.x.min(solution.x_stop()))?;
    compare_with(slice, field.grid.dt, t_range, |t| Ok(column.at(t)))
}

/// First time at which the cell profile crosses `c_mid`, linearly
/// interpolated between cell centres.
pub fn crossing_time(slice: &FvSlice, dt: f64, c_mid: f64) -> Option<f64> {
    slice.states.windows(2).enumerate().find_map(|(j, w)| {
        let (a, b) = (w[0].c - c_mid, w[1].c - c_mid);
        if a == 0.0 {
            Some(slice.t_center(dt, j))
        } else if a * b < 0.0 {
            Some(slice.t_center(dt, j) + dt * a / (a - b))
        } else {
            None
        }
    })
}

/// Least-squares slope `dt/dx` of the `c_mid` crossing over the slices.
pub fn shock_slope(field: &FvField, c_mid: f64) -> Result<f64> {
    let pts: Vec<(f64, f64)> = field
        .slices
        .iter()
        .filter(|s| s.x > 0.0)
        .map(|s| {
            crossing_time(s, field.grid.dt, c_mid)
                .map(|t| (s.x, t))
                .ok_or_else(|| Error::Domain(format!("no crossing of c={c_mid} at x={}", s.x)))
        })
        .collect::<Result<_>>()?;
    if pts.len() < 2 {
        return Err(Error::Precondition("need crossings on at least two slices with x > 0".into()));
    }
    let n = pts.len() as f64;
    let (mx, mt) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxt: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - mt)).sum();
    Ok(sxt / sxx)
}
