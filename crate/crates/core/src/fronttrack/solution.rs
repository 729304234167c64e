use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::engine::EngineConfig;
use super::{Event, Front, FrontKind};
use crate::error::{Error, Result};
use crate::model::IsothermModel;
use crate::riemann::State;

/// State just above `t = 0` on `[x_start, x_end)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BottomSegment {
    pub x_start: f64,
    pub x_end: f64,
    pub state: State,
    /// Emission that opened the segment; `None` for the boundary state itself.
    pub emission: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub model: IsothermModel,
    pub boundary: State,
    pub config: EngineConfig,
    pub x_final: f64,
    pub n_events: usize,
    pub n_interactions: usize,
    pub n_emissions: usize,
    pub n_prunes: usize,
    pub n_passthroughs: usize,
    pub n_merged_groups: usize,
    pub n_shock_paths: usize,
}

/// Polyline `(x, t)` followed by one emitted shock and its descendants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShockPath {
    pub index: u32,
    pub vertices: Vec<(f64, f64)>,
}

/// The piecewise-constant solution along one vertical line `x = const`.
#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub x: f64,
    pub bottom: State,
    /// `(t, slope, state above)` sorted by `t`, then slope.
    pub levels: Vec<(f64, f64, State)>,
}

impl Column {
    pub fn at(&self, t: f64) -> State {
        let k = self.levels.partition_point(|&(tl, _, _)| tl <= t);
        if k == 0 {
            self.bottom
        } else {
            self.levels[k - 1].2
        }
    }

    /// Constant pieces `(t_start, t_end, state)` covering `[ta, tb]`.
    pub fn pieces(&self, ta: f64, tb: f64) -> Vec<(f64, f64, State)> {
        let mut out = Vec::new();
        let mut start = ta;
        let mut state = self.at(ta);
        for &(tl, _, above) in &self.levels {
            if tl <= ta {
                continue;
            }
            if tl >= tb {
                break;
            }
            out.push((start, tl, state));
            start = tl;
            state = above;
        }
        out.push((start, tb, state));
        out
    }
}

/// Everything recorded by one front-tracking run.
#[derive(Debug, Clone)]
pub struct Solution {
    fronts: Vec<Front>,
    events: Vec<Event>,
    bottom: Vec<BottomSegment>,
    shock_paths: Vec<ShockPath>,
    meta: RunMeta,
    /// Non-marker front ids sorted by `x0`.
    by_x0: Vec<usize>,
}

impl Solution {
    pub(crate) fn new(fronts: Vec<Front>, events: Vec<Event>, bottom: Vec<BottomSegment>, meta: RunMeta) -> Self {
        let mut paths: BTreeMap<u32, Vec<&Front>> = BTreeMap::new();
        for f in &fronts {
            for &k in &f.lineage {
                paths.entry(k).or_default().push(f);
            }
        }
        let shock_paths = paths
            .into_iter()
            .map(|(index, mut segs)| {
                segs.sort_by(|a, b| a.x0.total_cmp(&b.x0));
                let mut vertices = vec![(segs[0].x0, segs[0].t0)];
                for s in segs {
                    vertices.push((s.x1, s.t1()));
                }
                ShockPath { index, vertices }
            })
            .collect();
        let mut by_x0: Vec<usize> = fronts.iter().filter(|f| f.kind != FrontKind::Marker).map(|f| f.id).collect();
        by_x0.sort_by(|&a, &b| fronts[a].x0.total_cmp(&fronts[b].x0));
        Solution { fronts, events, bottom, shock_paths, meta, by_x0 }
    }

    pub fn fronts(&self) -> &[Front] {
        &self.fronts
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn meta(&self) -> &RunMeta {
        &self.meta
    }

    pub fn shock_paths(&self) -> &[ShockPath] {
        &self.shock_paths
    }

    pub fn x_stop(&self) -> f64 {
        self.meta.config.x_stop
    }

    pub fn t_horizon(&self) -> f64 {
        self.meta.config.t_horizon
    }

    /// One segment per emission (plus the initial boundary segment).
    pub fn raw_bottom_trace(&self) -> &[BottomSegment] {
        &self.bottom
    }

    /// Bottom trace with consecutive equal states merged.
    pub fn bottom_trace(&self) -> Vec<BottomSegment> {
        let mut out: Vec<BottomSegment> = Vec::with_capacity(self.bottom.len());
        for seg in &self.bottom {
            match out.last_mut() {
                Some(last) if last.state == seg.state => last.x_end = seg.x_end,
                _ => out.push(*seg),
            }
        }
        out
    }

    pub fn bottom_state_at(&self, x: f64) -> State {
        let k = self.bottom.partition_point(|s| s.x_start <= x);
        self.bottom[k.saturating_sub(1)].state
    }

    /// Largest bottom velocity over the run.
    pub fn max_bottom_u(&self) -> f64 {
        self.bottom.iter().map(|s| s.state.u).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Whether fronts and events were kept (see `EngineConfig::keep_history`).
    pub fn has_history(&self) -> bool {
        self.meta.config.keep_history
    }

    fn check_x(&self, x: f64) -> Result<()> {
        if !self.has_history() {
            return Err(Error::Precondition("the run kept no front history to sample".into()));
        }
        if !(x >= 0.0 && x <= self.x_stop()) {
            return Err(Error::Domain(format!("x={x} outside [0, {}]", self.x_stop())));
        }
        Ok(())
    }

    fn check_t(&self, t: f64) -> Result<()> {
        if !(t >= 0.0 && t <= self.t_horizon()) {
            return Err(Error::Domain(format!("t={t} outside [0, {}]", self.t_horizon())));
        }
        Ok(())
    }

    /// Columns at each abscissa, in the order given. One sweep over the fronts.
    pub fn columns(&self, xs: &[f64]) -> Result<Vec<Column>> {
        for &x in xs {
            self.check_x(x)?;
        }
        let mut order: Vec<usize> = (0..xs.len()).collect();
        order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
        let x_stop = self.x_stop();
        let mut out: Vec<Option<Column>> = vec![None; xs.len()];
        let mut active: Vec<usize> = Vec::new();
        let mut cursor = 0;
        for k in order {
            let x = xs[k];
            while cursor < self.by_x0.len() && self.fronts[self.by_x0[cursor]].x0 <= x {
                active.push(self.by_x0[cursor]);
                cursor += 1;
            }
            active.retain(|&id| {
                let f = &self.fronts[id];
                f.x1 > x || f.x1 >= x_stop
            });
            let mut levels: Vec<(f64, f64, State)> = active
                .iter()
                .map(|&id| &self.fronts[id])
                .filter(|f| f.covers(x, x_stop))
                .map(|f| (f.t_at(x), f.slope, f.above))
                .collect();
            levels.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
            out[k] = Some(Column { x, bottom: self.bottom_state_at(x), levels });
        }
        Ok(out.into_iter().map(|c| c.expect("every column filled")).collect())
    }

    pub fn column(&self, x: f64) -> Result<Column> {
        Ok(self.columns(&[x])?.pop().expect("one column"))
    }

    /// State at `(t, x)`; on a front the state above it is returned.
    pub fn sample(&self, t: f64, x: f64) -> Result<State> {
        self.check_t(t)?;
        Ok(self.column(x)?.at(t))
    }

    /// `grid[i][j]` is the state at `(ts[i], xs[j])`.
    pub fn sample_grid(&self, ts: &[f64], xs: &[f64]) -> Result<Vec<Vec<State>>> {
        for &t in ts {
            self.check_t(t)?;
        }
        let cols = self.columns(xs)?;
        Ok(ts.iter().map(|&t| cols.iter().map(|c| c.at(t)).collect()).collect())
    }

    /// Abscissae in `(xa, xb)` where a front crosses the line `t = const`.
    pub fn crossings_at_t(&self, t: f64, xa: f64, xb: f64) -> Vec<f64> {
        let mut xs: Vec<f64> = self
            .fronts
            .iter()
            .filter(|f| f.kind != FrontKind::Marker && f.slope > 0.0)
            .filter_map(|f| {
                let x = f.x0 + (t - f.t0) / f.slope;
                (x >= f.x0 && x < f.x1 && x > xa && x < xb).then_some(x)
            })
            .collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        xs
    }

    /// Constant pieces `(x_start, x_end, state)` along `t = const` on `[xa, xb]`.
    pub fn row_pieces(&self, t: f64, xa: f64, xb: f64) -> Result<Vec<(f64, f64, State)>> {
        Ok(self.rows_pieces(&[t], xa, xb)?.pop().expect("one row"))
    }

    /// [`Solution::row_pieces`] for several lines with a single column sweep.
    pub fn rows_pieces(&self, ts: &[f64], xa: f64, xb: f64) -> Result<Vec<Vec<(f64, f64, State)>>> {
        for &t in ts {
            self.check_t(t)?;
        }
        let breaks: Vec<Vec<f64>> = ts
            .iter()
            .map(|&t| {
                let mut b = vec![xa];
                b.extend(self.crossings_at_t(t, xa, xb));
                b.push(xb);
                b
            })
            .collect();
        let mids: Vec<f64> = breaks.iter().flat_map(|b| b.windows(2).map(|w| 0.5 * (w[0] + w[1]))).collect();
        let mut cols = self.columns(&mids)?.into_iter();
        Ok(ts
            .iter()
            .zip(&breaks)
            .map(|(&t, b)| b.windows(2).zip(cols.by_ref()).map(|(w, c)| (w[0], w[1], c.at(t))).collect())
            .collect())
    }
}
