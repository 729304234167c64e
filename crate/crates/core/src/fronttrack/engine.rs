use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::solution::{BottomSegment, RunMeta, Solution};
use super::{discretize_fan, Event, EventKind, Front, FrontKind, RuleTag, SubfrontSpeed, ZERO_C_JUMP, ZERO_U_JUMP};
use crate::error::{Error, Result};
use crate::model::DerivedFunctions;
use crate::riemann::{solve_boundary_rp, solve_full_rp, LambdaWave, State, WaveFan};
use crate::scenario::Scenario;

pub const DEFAULT_MAX_EVENTS: usize = 10_000_000;
/// Fronts are dropped once they leave `t <= T (1 + PRUNE_MARGIN)`.
pub const PRUNE_MARGIN: f64 = 0.05;
/// Fronts passing within this distance (in `t`, relative) of a crossing join it.
pub const MERGE_TOLERANCE: f64 = 1e-12;
/// Tolerance of the strength checks made after each tabulated interaction.
const STRENGTH_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub delta: f64,
    pub t_horizon: f64,
    pub x_stop: f64,
    pub max_events: usize,
    pub subfront_speed: SubfrontSpeed,
    pub prune: bool,
    /// Keep every front segment and event. Without history the run only
    /// yields the bottom trace and counters, in memory proportional to the
    /// number of alive fronts.
    pub keep_history: bool,
}

impl EngineConfig {
    pub fn for_scenario(s: &Scenario) -> Self {
        EngineConfig {
            delta: s.delta,
            t_horizon: s.t_horizon,
            x_stop: s.x_stop,
            max_events: DEFAULT_MAX_EVENTS,
            subfront_speed: SubfrontSpeed::default(),
            prune: true,
            keep_history: true,
        }
    }

    fn t_prune(&self) -> f64 {
        self.t_horizon * (1.0 + PRUNE_MARGIN)
    }

    fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::param("delta", format!("must be positive, got {}", self.delta)));
        }
        if !(self.t_horizon > 0.0 && self.t_horizon.is_finite()) {
            return Err(Error::param("t_horizon", format!("must be positive, got {}", self.t_horizon)));
        }
        if !(self.x_stop > 0.0 && self.x_stop.is_finite()) {
            return Err(Error::param("x_stop", format!("must be positive, got {}", self.x_stop)));
        }
        if self.max_events == 0 {
            return Err(Error::param("max_events", "must be at least 1".to_string()));
        }
        Ok(())
    }
}

/// The next thing the engine will do, as returned by [`Engine::next_event`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PendingEvent {
    Emission { index: usize, x: f64 },
    Crossing { x: f64, t: f64, lower: usize, upper: usize },
    Prune { x: f64, id: usize },
}

impl PendingEvent {
    pub fn x(&self) -> f64 {
        match *self {
            PendingEvent::Emission { x, .. } | PendingEvent::Crossing { x, .. } | PendingEvent::Prune { x, .. } => x,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    x: f64,
    t: f64,
    prune: bool,
    a: usize,
    b: usize,
    /// Slot generations of `a` and `b` when the candidate was made.
    ga: u32,
    gb: u32,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.x
            .total_cmp(&other.x)
            .then(self.t.total_cmp(&other.t))
            .then(self.prune.cmp(&other.prune))
            .then(self.a.cmp(&other.a))
            .then(self.b.cmp(&other.b))
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Link {
    prev: Option<usize>,
    next: Option<usize>,
    alive: bool,
}

#[derive(Debug, Clone, Copy, Default)]
struct Counters {
    events: usize,
    interactions: usize,
    emissions: usize,
    prunes: usize,
    passthroughs: usize,
    merged_groups: usize,
}

/// Event-driven front tracker. Fronts live in a slab indexed by id and are
/// linked in increasing `t` order along the current column `x = x_now`.
pub struct Engine<'a> {
    fns: &'a DerivedFunctions,
    cfg: EngineConfig,
    boundary: State,
    emissions: Vec<(f64, f64)>,
    next_emission: usize,
    x_now: f64,
    fronts: Vec<Front>,
    links: Vec<Link>,
    gens: Vec<u32>,
    free: Vec<usize>,
    n_alive: usize,
    lowest: Option<usize>,
    highest: Option<usize>,
    heap: BinaryHeap<Reverse<Candidate>>,
    bottom: State,
    bottom_trace: Vec<BottomSegment>,
    events: Vec<Event>,
    next_lineage: u32,
    counters: Counters,
}

/// Engine for a scenario with the configuration it implies.
pub fn init_engine<'a>(fns: &'a DerivedFunctions, scenario: &Scenario) -> Result<Engine<'a>> {
    Engine::new(fns, scenario, EngineConfig::for_scenario(scenario))
}

/// Runs a scenario to `x_stop` with default settings.
pub fn run(scenario: &Scenario) -> Result<Solution> {
    let fns = DerivedFunctions::new(scenario.model)?;
    run_with(&fns, scenario, EngineConfig::for_scenario(scenario))
}

pub fn run_with(fns: &DerivedFunctions, scenario: &Scenario, cfg: EngineConfig) -> Result<Solution> {
    let mut engine = Engine::new(fns, scenario, cfg)?;
    while let Some(ev) = engine.next_event() {
        engine.apply_event(ev)?;
    }
    engine.x_now = engine.cfg.x_stop;
    Ok(engine.finish())
}

/// Where the lower front `a` catches the upper front `b`, looking from `x_now` on.
fn crossing_x(a: &Front, b: &Front, x_now: f64) -> Option<f64> {
    if a.slope <= b.slope {
        return None;
    }
    let gap = b.t_at(x_now) - a.t_at(x_now);
    Some(x_now + gap.max(0.0) / (a.slope - b.slope))
}

impl<'a> Engine<'a> {
    pub fn new(fns: &'a DerivedFunctions, scenario: &Scenario, cfg: EngineConfig) -> Result<Self> {
        cfg.validate()?;
        if fns.model() != &scenario.model {
            return Err(Error::Precondition("derived functions were built for a different model".into()));
        }
        let boundary = State::new(scenario.boundary_c, scenario.u0)?;
        let mut emissions = Vec::with_capacity(scenario.segments.len());
        let mut last_x = f64::NEG_INFINITY;
        for seg in &scenario.segments {
            if !(seg.x >= 0.0 && seg.x > last_x) {
                return Err(Error::param("segments", format!("abscissae must be non-negative and increasing at x={}", seg.x)));
            }
            State::new(seg.c, 1.0)?;
            last_x = seg.x;
            emissions.push((seg.x, seg.c));
        }
        Ok(Engine {
            fns,
            cfg,
            boundary,
            emissions,
            next_emission: 0,
            x_now: 0.0,
            fronts: Vec::new(),
            links: Vec::new(),
            gens: Vec::new(),
            free: Vec::new(),
            n_alive: 0,
            lowest: None,
            highest: None,
            heap: BinaryHeap::new(),
            bottom: boundary,
            bottom_trace: vec![BottomSegment { x_start: 0.0, x_end: f64::INFINITY, state: boundary, emission: None }],
            events: Vec::new(),
            next_lineage: 0,
            counters: Counters::default(),
        })
    }

    pub fn x_now(&self) -> f64 {
        self.x_now
    }

    pub fn config(&self) -> &EngineConfig {
        &self.cfg
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn front(&self, id: usize) -> &Front {
        &self.fronts[id]
    }

    /// Alive fronts in increasing `t` order along the current column.
    pub fn alive(&self) -> Vec<&Front> {
        let mut out = Vec::new();
        let mut cur = self.lowest;
        while let Some(id) = cur {
            out.push(&self.fronts[id]);
            cur = self.links[id].next;
        }
        out
    }

    pub fn bottom_state(&self) -> State {
        self.bottom
    }

    fn is_valid(&self, c: &Candidate) -> bool {
        if self.gens[c.a] != c.ga || self.gens[c.b] != c.gb {
            return false;
        }
        if c.prune {
            self.links[c.a].alive && self.links[c.a].next.is_none()
        } else {
            self.links[c.a].alive && self.links[c.b].alive && self.links[c.a].next == Some(c.b)
        }
    }

    /// Earliest pending event with `x < x_stop`, or `None` when the run is over.
    /// Emissions win ties within 1e-12 in `x`.
    pub fn next_event(&mut self) -> Option<PendingEvent> {
        while let Some(Reverse(top)) = self.heap.peek() {
            if self.is_valid(top) {
                break;
            }
            self.heap.pop();
        }
        let candidate = self.heap.peek().map(|r| r.0);
        let emission = self.emissions.get(self.next_emission).map(|&(x, _)| x);
        let pending = match (emission, candidate) {
            (Some(xe), Some(c)) if xe <= c.x + 1e-12 => PendingEvent::Emission { index: self.next_emission, x: xe },
            (Some(xe), None) => PendingEvent::Emission { index: self.next_emission, x: xe },
            (_, Some(c)) if c.prune => PendingEvent::Prune { x: c.x, id: c.a },
            (_, Some(c)) => PendingEvent::Crossing { x: c.x, t: c.t, lower: c.a, upper: c.b },
            (None, None) => return None,
        };
        if pending.x() >= self.cfg.x_stop {
            None
        } else {
            Some(pending)
        }
    }

    pub fn apply_event(&mut self, ev: PendingEvent) -> Result<()> {
        self.counters.events += 1;
        if self.counters.events > self.cfg.max_events {
            return Err(Error::EventCap(self.cfg.max_events));
        }
        self.x_now = self.x_now.max(ev.x());
        match ev {
            PendingEvent::Emission { index, x } => {
                if index != self.next_emission {
                    return Err(Error::Precondition(format!("emission {index} is not the next one")));
                }
                self.next_emission += 1;
                self.emit(index, x)
            }
            PendingEvent::Crossing { x, t, lower, upper } => {
                if !(self.links[lower].alive && self.links[lower].next == Some(upper)) {
                    return Err(Error::Precondition("crossing fronts are no longer adjacent".into()));
                }
                self.cross(x, t, lower, upper)
            }
            PendingEvent::Prune { x, id } => self.prune(x, id),
        }?;
        if self.heap.len() > 4 * self.n_alive + 4096 {
            let heap = std::mem::take(&mut self.heap);
            self.heap = heap.into_iter().filter(|c| self.is_valid(&c.0)).collect();
        }
        Ok(())
    }

    fn new_front(&mut self, kind: FrontKind, anchor: (f64, f64), slope: f64, below: State, above: State, lineage: Vec<u32>) -> usize {
        if let Some(id) = self.free.pop() {
            self.fronts[id] = Front { id, kind, x0: anchor.0, t0: anchor.1, slope, below, above, lineage, x1: f64::INFINITY };
            self.links[id] = Link::default();
            self.gens[id] = self.gens[id].wrapping_add(1);
            return id;
        }
        let id = self.fronts.len();
        self.fronts.push(Front { id, kind, x0: anchor.0, t0: anchor.1, slope, below, above, lineage, x1: f64::INFINITY });
        self.links.push(Link::default());
        self.gens.push(0);
        id
    }

    fn detach(&mut self, id: usize) {
        if self.links[id].alive {
            self.links[id].alive = false;
            self.n_alive -= 1;
        }
    }

    fn close(&mut self, id: usize, x: f64) {
        self.fronts[id].x1 = x;
        self.detach(id);
        if !self.cfg.keep_history {
            self.free.push(id);
        }
    }

    fn log(&mut self, event: Event) {
        if self.cfg.keep_history {
            self.events.push(event);
        }
    }

    /// Replaces the alive run `lo..=hi` (or inserts between `prev` and `next`
    /// when the run is empty) by `seq`, relinking and rescheduling.
    fn splice(&mut self, prev: Option<usize>, next: Option<usize>, seq: &[usize]) {
        let mut last = prev;
        for &id in seq {
            if !self.links[id].alive {
                self.n_alive += 1;
            }
            self.links[id].alive = true;
            self.links[id].prev = last;
            match last {
                Some(p) => self.links[p].next = Some(id),
                None => self.lowest = Some(id),
            }
            last = Some(id);
        }
        match (last, next) {
            (Some(l), Some(n)) => {
                self.links[l].next = Some(n);
                self.links[n].prev = Some(l);
            }
            (Some(l), None) => {
                self.links[l].next = None;
                self.highest = Some(l);
            }
            (None, Some(n)) => {
                self.links[n].prev = None;
                self.lowest = Some(n);
            }
            (None, None) => {
                self.lowest = None;
                self.highest = None;
            }
        }
        let mut chain: Vec<usize> = Vec::with_capacity(seq.len() + 2);
        chain.extend(prev);
        chain.extend_from_slice(seq);
        chain.extend(next);
        for w in chain.windows(2) {
            self.schedule_pair(w[0], w[1]);
        }
        if let Some(h) = self.highest {
            if next.is_none() {
                self.schedule_prune(h);
            }
        }
    }

    fn schedule_pair(&mut self, lo: usize, up: usize) {
        let (a, b) = (&self.fronts[lo], &self.fronts[up]);
        let Some(x) = crossing_x(a, b, self.x_now) else {
            return;
        };
        if !(x < self.cfg.x_stop) {
            return;
        }
        let t = 0.5 * (a.t_at(x) + b.t_at(x));
        let (ga, gb) = (self.gens[lo], self.gens[up]);
        self.heap.push(Reverse(Candidate { x, t, prune: false, a: lo, b: up, ga, gb }));
    }

    fn schedule_prune(&mut self, id: usize) {
        if !self.cfg.prune {
            return;
        }
        let f = &self.fronts[id];
        if f.slope <= 0.0 {
            return;
        }
        let x = (f.x0 + (self.cfg.t_prune() - f.t0) / f.slope).max(self.x_now);
        if x < self.cfg.x_stop {
            let g = self.gens[id];
            self.heap.push(Reverse(Candidate { x, t: self.cfg.t_prune(), prune: true, a: id, b: id, ga: g, gb: g }));
        }
    }

    fn fresh_lineage(&mut self) -> Vec<u32> {
        let k = self.next_lineage;
        self.next_lineage += 1;
        vec![k]
    }

    fn emit(&mut self, index: usize, x: f64) -> Result<()> {
        let c_new = self.emissions[index].1;
        let above = self.bottom;
        let fan = solve_boundary_rp(self.fns, c_new, above.c, above.u)?;
        let anchor = (x, 0.0);
        let (seq, rule) = match fan.wave {
            LambdaWave::None => (Vec::new(), None),
            LambdaWave::Shock(s) => {
                let lineage = self.fresh_lineage();
                (vec![self.new_front(FrontKind::Shock, anchor, s.speed, s.below, s.above, lineage)], Some(RuleTag::EmissionShock))
            }
            LambdaWave::Rarefaction(r) => {
                let subs = discretize_fan(self.fns, &r, self.cfg.delta, self.cfg.subfront_speed)?;
                let ids = subs
                    .iter()
                    .map(|s| self.new_front(FrontKind::RarSubfront, anchor, s.slope, s.below, s.above, Vec::new()))
                    .collect();
                (ids, Some(RuleTag::EmissionRarefaction))
            }
        };
        self.bottom = fan.bottom();
        if let Some(last) = self.bottom_trace.last_mut() {
            last.x_end = x;
        }
        if self.bottom_trace.last().is_some_and(|s| s.x_start == x) {
            self.bottom_trace.pop();
        }
        self.bottom_trace.push(BottomSegment { x_start: x, x_end: f64::INFINITY, state: self.bottom, emission: Some(index) });
        let old_lowest = self.lowest;
        self.splice(None, old_lowest, &seq);
        self.counters.emissions += 1;
        self.log(Event { x, t: 0.0, kind: EventKind::Emission, in_ids: Vec::new(), out_ids: seq, rule });
        Ok(())
    }

    fn prune(&mut self, x: f64, id: usize) -> Result<()> {
        if !(self.links[id].alive && self.links[id].next.is_none()) {
            return Err(Error::Precondition(format!("front {id} is not the topmost alive front")));
        }
        let prev = self.links[id].prev;
        let t = self.fronts[id].t_at(x);
        self.close(id, x);
        self.splice(prev, None, &[]);
        self.counters.prunes += 1;
        self.log(Event { x, t, kind: EventKind::Prune, in_ids: vec![id], out_ids: Vec::new(), rule: None });
        Ok(())
    }

    fn near(&self, id: usize, x: f64, t: f64) -> bool {
        (self.fronts[id].t_at(x) - t).abs() <= MERGE_TOLERANCE * t.abs().max(1.0)
    }

    fn cross(&mut self, x: f64, t: f64, lower: usize, upper: usize) -> Result<()> {
        let mut lo = lower;
        while let Some(p) = self.links[lo].prev {
            if self.near(p, x, t) {
                lo = p;
            } else {
                break;
            }
        }
        let mut hi = upper;
        while let Some(n) = self.links[hi].next {
            if self.near(n, x, t) {
                hi = n;
            } else {
                break;
            }
        }
        let mut group = vec![lo];
        while *group.last().unwrap() != hi {
            let n = self.links[*group.last().unwrap()].next.expect("group is a linked run");
            group.push(n);
        }
        let prev = self.links[lo].prev;
        let next = self.links[hi].next;
        let real: Vec<usize> = group.iter().copied().filter(|&i| self.fronts[i].kind != FrontKind::Marker).collect();
        if group.len() > 2 {
            self.counters.merged_groups += 1;
        }
        match real.len() {
            0 => self.merge_markers(x, t, &group, prev, next),
            1 => self.pass_through(x, t, &group, real[0], prev, next),
            _ => self.interact(x, t, &group, &real, prev, next),
        }
    }

    fn merge_markers(&mut self, x: f64, t: f64, group: &[usize], prev: Option<usize>, next: Option<usize>) -> Result<()> {
        let state = self.fronts[group[0]].below;
        let lineage = union_lineage(group.iter().map(|&i| &self.fronts[i]));
        for &id in group {
            self.close(id, x);
        }
        let slope = self.fns.lambda(state);
        let m = self.new_front(FrontKind::Marker, (x, t), slope, state, state, lineage);
        self.counters.passthroughs += 1;
        self.splice(prev, next, &[m]);
        Ok(())
    }

    /// Markers crossing a single real front: shocks absorb them, other fronts
    /// let them through on the far side.
    fn pass_through(&mut self, x: f64, t: f64, group: &[usize], real: usize, prev: Option<usize>, next: Option<usize>) -> Result<()> {
        let f = self.fronts[real].clone();
        self.counters.passthroughs += 1;
        if f.kind == FrontKind::Shock {
            let lineage = union_lineage(group.iter().map(|&i| &self.fronts[i]));
            for &id in group {
                self.close(id, x);
            }
            let s = self.new_front(FrontKind::Shock, (x, t), f.slope, f.below, f.above, lineage);
            self.splice(prev, next, &[s]);
            return Ok(());
        }
        let pos = group.iter().position(|&i| i == real).unwrap();
        let (from_below, from_above) = (&group[..pos], &group[pos + 1..]);
        let below_lineage = union_lineage(from_above.iter().map(|&i| &self.fronts[i]));
        let above_lineage = union_lineage(from_below.iter().map(|&i| &self.fronts[i]));
        for &id in group {
            if id != real {
                self.close(id, x);
            }
        }
        let mut seq = Vec::with_capacity(3);
        if !below_lineage.is_empty() {
            let slope = self.fns.lambda(f.below).min(f.slope);
            seq.push(self.new_front(FrontKind::Marker, (x, t), slope, f.below, f.below, below_lineage));
        }
        seq.push(real);
        if !above_lineage.is_empty() {
            let slope = self.fns.lambda(f.above).max(f.slope);
            seq.push(self.new_front(FrontKind::Marker, (x, t), slope, f.above, f.above, above_lineage));
        }
        // `real` stays alive; detach it so splice relinks it cleanly.
        self.detach(real);
        self.splice(prev, next, &seq);
        Ok(())
    }

    fn interact(&mut self, x: f64, t: f64, group: &[usize], real: &[usize], prev: Option<usize>, next: Option<usize>) -> Result<()> {
        let incoming: Vec<Front> = real.iter().map(|&i| self.fronts[i].clone()).collect();
        let below = incoming[0].below;
        let above = incoming[incoming.len() - 1].above;
        let lineage = union_lineage(group.iter().map(|&i| &self.fronts[i]));
        for &id in group {
            self.close(id, x);
        }
        let fan = solve_full_rp(self.fns, below, above, (x, t))?;
        let rule = classify(&incoming, &fan)?;

        let mut seq = Vec::new();
        if (fan.contact_u - below.u).abs() >= ZERO_U_JUMP * below.u {
            seq.push(self.new_front(FrontKind::Contact, (x, t), 0.0, below, fan.bottom(), Vec::new()));
        }
        let lambda_start = seq.len();
        match fan.wave {
            LambdaWave::None => {}
            LambdaWave::Shock(s) => {
                if (s.above.c - s.below.c).abs() >= ZERO_C_JUMP {
                    let lin = lineage.clone();
                    seq.push(self.new_front(FrontKind::Shock, (x, t), s.speed, s.below, s.above, lin));
                }
            }
            LambdaWave::Rarefaction(r) => {
                if r.strength() >= ZERO_C_JUMP {
                    for s in discretize_fan(self.fns, &r, self.cfg.delta, self.cfg.subfront_speed)? {
                        seq.push(self.new_front(FrontKind::RarSubfront, (x, t), s.slope, s.below, s.above, Vec::new()));
                    }
                }
            }
        }
        let has_shock = seq[lambda_start..].iter().any(|&i| self.fronts[i].kind == FrontKind::Shock);
        if !lineage.is_empty() && !has_shock {
            self.place_marker(x, t, &fan, &mut seq, lambda_start, lineage);
        }
        if rule.is_table_interaction() {
            let lambda_in = incoming.iter().filter(|f| f.kind.is_lambda()).count();
            let lambda_out = seq.iter().filter(|&&i| self.fronts[i].kind.is_lambda()).count();
            if lambda_out > lambda_in {
                return Err(Error::Inconsistent(format!(
                    "{rule} at ({x}, {t}) produced {lambda_out} λ-fronts from {lambda_in}"
                )));
            }
        }
        self.counters.interactions += 1;
        let out_ids = if self.cfg.keep_history { seq.clone() } else { Vec::new() };
        self.log(Event {
            x,
            t,
            kind: EventKind::Interaction,
            in_ids: group.to_vec(),
            out_ids,
            rule: Some(rule),
        });
        self.splice(prev, next, &seq);
        Ok(())
    }

    /// Puts a lineage-carrying marker in the first outgoing region whose
    /// characteristic slope fits between the fronts bounding it.
    fn place_marker(&mut self, x: f64, t: f64, fan: &WaveFan, seq: &mut Vec<usize>, lambda_start: usize, lineage: Vec<u32>) {
        let mut lower_bound = 0.0;
        let mut state = fan.bottom();
        let mut pos = lambda_start;
        loop {
            let upper_bound = seq.get(pos).map_or(f64::INFINITY, |&i| self.fronts[i].slope);
            let lam = self.fns.lambda(state);
            if (lam <= upper_bound && lam >= lower_bound) || pos == seq.len() {
                let slope = lam.clamp(lower_bound, upper_bound);
                let m = self.new_front(FrontKind::Marker, (x, t), slope, state, state, lineage);
                seq.insert(pos, m);
                return;
            }
            lower_bound = upper_bound;
            state = self.fronts[seq[pos]].above;
            pos += 1;
        }
    }

    /// Closes every alive front at `x_stop` and hands over the record.
    pub fn finish(mut self) -> Solution {
        let x_stop = self.cfg.x_stop;
        let alive: Vec<usize> = self.alive().iter().map(|f| f.id).collect();
        for id in alive {
            self.close(id, x_stop);
        }
        if let Some(last) = self.bottom_trace.last_mut() {
            last.x_end = x_stop;
        }
        self.bottom_trace.retain(|s| s.x_start < x_stop);
        let meta = RunMeta {
            model: *self.fns.model(),
            boundary: self.boundary,
            config: self.cfg,
            x_final: self.x_now,
            n_events: self.counters.events,
            n_interactions: self.counters.interactions,
            n_emissions: self.counters.emissions,
            n_prunes: self.counters.prunes,
            n_passthroughs: self.counters.passthroughs,
            n_merged_groups: self.counters.merged_groups,
            n_shock_paths: self.next_lineage as usize,
        };
        let fronts = if self.cfg.keep_history { self.fronts } else { Vec::new() };
        Solution::new(fronts, self.events, self.bottom_trace, meta)
    }
}

fn union_lineage<'f>(fronts: impl Iterator<Item = &'f Front>) -> Vec<u32> {
    let mut out: Vec<u32> = fronts.flat_map(|f| f.lineage.iter().copied()).collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn lambda_out_strength(fan: &WaveFan) -> f64 {
    match fan.wave {
        LambdaWave::None => 0.0,
        LambdaWave::Shock(s) => (s.above.c - s.below.c).abs(),
        LambdaWave::Rarefaction(r) => r.strength(),
    }
}

/// Tags an interaction and checks the strength algebra of its outcome.
fn classify(incoming: &[Front], fan: &WaveFan) -> Result<RuleTag> {
    let count = |k: FrontKind| incoming.iter().filter(|f| f.kind == k).count();
    let (shocks, subs, contacts) = (count(FrontKind::Shock), count(FrontKind::RarSubfront), count(FrontKind::Contact));
    if incoming.len() != 2 {
        return Ok(RuleTag::Unlisted);
    }
    let out = lambda_out_strength(fan);
    let dc = |f: &Front| f.above.c - f.below.c;
    let fail = |what: &str| {
        Err(Error::Inconsistent(format!(
            "interaction at ({}, {}): {what}; incoming {:?}, outgoing {}",
            fan.datum.0,
            fan.datum.1,
            incoming.iter().map(|f| f.kind.as_str()).collect::<Vec<_>>(),
            fan.wave.kind_name()
        )))
    };
    match (shocks, subs, contacts) {
        (1, 1, 0) => {
            let (s, r) = if incoming[0].kind == FrontKind::Shock {
                (&incoming[0], &incoming[1])
            } else {
                (&incoming[1], &incoming[0])
            };
            if dc(s) * dc(r) > 0.0 {
                return Ok(RuleTag::Unlisted);
            }
            let (ss, rs) = (dc(s).abs(), dc(r).abs());
            if (out - (ss - rs).abs()).abs() > STRENGTH_TOL {
                return fail("outgoing strength is not the difference of incoming strengths");
            }
            let tag = if out < ZERO_C_JUMP {
                RuleTag::RsCdOnly
            } else if matches!(fan.wave, LambdaWave::Shock(_)) {
                RuleTag::RsCdS
            } else {
                RuleTag::RsCdR
            };
            let expected = if (ss - rs).abs() <= STRENGTH_TOL {
                tag == RuleTag::RsCdOnly || out <= STRENGTH_TOL
            } else if ss > rs {
                tag == RuleTag::RsCdS
            } else {
                tag == RuleTag::RsCdR
            };
            if !expected {
                return fail("the stronger incoming wave does not survive");
            }
            Ok(tag)
        }
        (2, 0, 0) => {
            if !matches!(fan.wave, LambdaWave::Shock(_)) {
                return fail("two shocks did not merge into a shock");
            }
            let strongest = dc(&incoming[0]).abs().max(dc(&incoming[1]).abs());
            if dc(&incoming[0]) * dc(&incoming[1]) > 0.0 && out < strongest - STRENGTH_TOL {
                return fail("merged shock is weaker than its parts");
            }
            Ok(RuleTag::SsCdS)
        }
        (1, 0, 1) => {
            let s = incoming.iter().find(|f| f.kind == FrontKind::Shock).unwrap();
            if !matches!(fan.wave, LambdaWave::Shock(_)) || (out - dc(s).abs()).abs() > STRENGTH_TOL {
                return fail("shock strength changed across a contact");
            }
            Ok(RuleTag::ScdCdS)
        }
        (0, 1, 1) => {
            let r = incoming.iter().find(|f| f.kind == FrontKind::RarSubfront).unwrap();
            if !matches!(fan.wave, LambdaWave::Rarefaction(_)) || (out - dc(r).abs()).abs() > STRENGTH_TOL {
                return fail("rarefaction strength changed across a contact");
            }
            Ok(RuleTag::RcdCdR)
        }
        _ => Ok(RuleTag::Unlisted),
    }
}
