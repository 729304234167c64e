//! Front tracking in the quarter plane `x > 0, t > 0` with `x` as the
//! evolution variable.
//!
//! Every front is a straight segment `t = t0 + slope (x - x0)` with `slope >= 0`.
//! Crossings of adjacent fronts are resolved by a fresh full Riemann problem
//! on the outer states; emissions at `t = 0` come from jumps of the bottom
//! concentration. Marker fronts carry shock-path lineage through regions where
//! the shock they follow has been cancelled.

mod engine;
mod residual;
mod solution;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::DerivedFunctions;
use crate::riemann::{fan_slope_at, Rarefaction, State};

pub use engine::{init_engine, run, run_with, Engine, EngineConfig, PendingEvent, DEFAULT_MAX_EVENTS};
pub use residual::{conservation_residual, entropy_residual, EntropyFunction, Rect};
pub use solution::{BottomSegment, Column, RunMeta, ShockPath, Solution};

/// Jumps in `c` below this are not tracked.
pub const ZERO_C_JUMP: f64 = 1e-13;
/// Relative jumps in `u` below this are not tracked.
pub const ZERO_U_JUMP: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrontKind {
    Shock,
    RarSubfront,
    Contact,
    Marker,
}

impl FrontKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FrontKind::Shock => "shock",
            FrontKind::RarSubfront => "rar-subfront",
            FrontKind::Contact => "contact",
            FrontKind::Marker => "marker",
        }
    }

    pub fn is_lambda(self) -> bool {
        matches!(self, FrontKind::Shock | FrontKind::RarSubfront)
    }
}

/// One straight front segment from its anchor `(x0, t0)` to abscissa `x1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Front {
    pub id: usize,
    pub kind: FrontKind,
    pub x0: f64,
    pub t0: f64,
    /// `dt/dx`; zero for contacts.
    pub slope: f64,
    pub below: State,
    pub above: State,
    /// Shock-path indices carried by this segment.
    pub lineage: Vec<u32>,
    /// End abscissa; `f64::INFINITY` while the front is alive.
    pub x1: f64,
}

impl Front {
    pub fn t_at(&self, x: f64) -> f64 {
        self.t0 + self.slope * (x - self.x0)
    }

    pub fn t1(&self) -> f64 {
        self.t_at(self.x1)
    }

    /// `|Δc|` for λ-fronts; `|Δu| / u_below` for contacts (a diagnostic only).
    pub fn strength(&self) -> f64 {
        match self.kind {
            FrontKind::Contact => (self.above.u - self.below.u).abs() / self.below.u,
            _ => (self.above.c - self.below.c).abs(),
        }
    }

    /// Whether the segment covers abscissa `x` (half-open, closed at `x_stop`).
    pub fn covers(&self, x: f64, x_stop: f64) -> bool {
        self.x0 <= x && (x < self.x1 || (x == self.x1 && self.x1 >= x_stop))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventKind {
    Interaction,
    Emission,
    Prune,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Interaction => "interaction",
            EventKind::Emission => "emission",
            EventKind::Prune => "prune",
        }
    }
}

/// Outcome class of an event, following the wave-interaction table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RuleTag {
    #[serde(rename = "RS→CD+R")]
    RsCdR,
    #[serde(rename = "RS→CD+S")]
    RsCdS,
    #[serde(rename = "RS→CD-only")]
    RsCdOnly,
    #[serde(rename = "SS→CD+S")]
    SsCdS,
    #[serde(rename = "SCD→CD+S")]
    ScdCdS,
    #[serde(rename = "RCD→CD+R")]
    RcdCdR,
    #[serde(rename = "emission-shock")]
    EmissionShock,
    #[serde(rename = "emission-rarefaction")]
    EmissionRarefaction,
    /// Any combination outside the table (e.g. merged multi-front collisions).
    #[serde(rename = "unlisted")]
    Unlisted,
}

impl RuleTag {
    pub fn as_str(self) -> &'static str {
        match self {
            RuleTag::RsCdR => "RS→CD+R",
            RuleTag::RsCdS => "RS→CD+S",
            RuleTag::RsCdOnly => "RS→CD-only",
            RuleTag::SsCdS => "SS→CD+S",
            RuleTag::ScdCdS => "SCD→CD+S",
            RuleTag::RcdCdR => "RCD→CD+R",
            RuleTag::EmissionShock => "emission-shock",
            RuleTag::EmissionRarefaction => "emission-rarefaction",
            RuleTag::Unlisted => "unlisted",
        }
    }

    /// True for the six interaction outcomes of the table.
    pub fn is_table_interaction(self) -> bool {
        matches!(
            self,
            RuleTag::RsCdR | RuleTag::RsCdS | RuleTag::RsCdOnly | RuleTag::SsCdS | RuleTag::ScdCdS | RuleTag::RcdCdR
        )
    }
}

impl fmt::Display for RuleTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub x: f64,
    pub t: f64,
    pub kind: EventKind,
    pub in_ids: Vec<usize>,
    pub out_ids: Vec<usize>,
    pub rule: Option<RuleTag>,
}

/// Speed assigned to a discretised rarefaction sub-front.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubfrontSpeed {
    /// Self-similar fan slope at the mid concentration of the jump.
    Midpoint,
    /// Characteristic speed `H(c)/u` of the state below the jump. The first
    /// sub-front then runs along the foot `z0` of the fan.
    #[default]
    BelowState,
}

/// One jump of a discretised rarefaction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Subfront {
    pub below: State,
    pub above: State,
    pub slope: f64,
}

/// Splits a centred rarefaction into `ceil(|Δc| / δ)` jumps of equal `Δc`.
///
/// Both sides of every jump lie on the level set `u G(c) = W`, and the end
/// states are copied from the fan so neighbours match bit for bit.
pub fn discretize_fan(fns: &DerivedFunctions, fan: &Rarefaction, delta: f64, speed: SubfrontSpeed) -> Result<Vec<Subfront>> {
    if !(delta > 0.0) {
        return Err(Error::param("delta", format!("must be positive, got {delta}")));
    }
    let span = fan.c_plus - fan.c0;
    if span == 0.0 {
        return Err(Error::Precondition("cannot discretise an empty fan".into()));
    }
    let n = ((span.abs() / delta) - 1e-9).ceil().max(1.0) as usize;
    let (lo, hi) = if fan.c0 < fan.c_plus { (fan.c0, fan.c_plus) } else { (fan.c_plus, fan.c0) };
    let states: Vec<State> = (0..=n)
        .map(|i| {
            if i == 0 {
                fan.below()
            } else if i == n {
                fan.above()
            } else {
                let c = (fan.c0 + span * (i as f64 / n as f64)).clamp(lo, hi);
                State { c, u: fan.invariant / fns.g(c).exp() }
            }
        })
        .collect();
    let fronts: Vec<Subfront> = states
        .windows(2)
        .map(|w| {
            let slope = match speed {
                SubfrontSpeed::Midpoint => fan_slope_at(fns, fan, 0.5 * (w[0].c + w[1].c)),
                SubfrontSpeed::BelowState => fns.lambda(w[0]),
            };
            Subfront { below: w[0], above: w[1], slope }
        })
        .collect();
    if fronts.windows(2).any(|w| !(w[0].slope < w[1].slope)) {
        return Err(Error::Inconsistent("discretised fan slopes are not increasing".into()));
    }
    Ok(fronts)
}
