//! Exact boundary and full Riemann problems, with `x` as the evolution
//! variable and `z = t / x` as the self-similar coordinate.
//!
//! A boundary Riemann problem has the state `(c0, ·)` on `t = 0` (below) and
//! `(c_plus, u_plus)` on `x = 0` (above). It is solved by one λ-wave whose
//! lower state carries the unknown velocity `u0`. A full Riemann problem adds
//! a 0-contact on the ray `t = t*` that joins the lower data to `(c0, u0)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{f_second_sign_on, DerivedFunctions, SignClass};
use crate::quad::adaptive_simpson;

const LIU_SAMPLES: usize = 65;
const LIU_TOL: f64 = 1e-12;
const RH_TOL: f64 = 1e-12;
const FAN_BISECTION_TOL: f64 = 1e-13;

/// A point value: concentration in `[0, 1]` and positive velocity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub c: f64,
    pub u: f64,
}

impl State {
    pub fn new(c: f64, u: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&c) {
            return Err(Error::param("c", format!("concentration must lie in [0, 1], got {c}")));
        }
        if !(u.is_finite() && u > 0.0) {
            return Err(Error::param("u", format!("velocity must be positive, got {u}")));
        }
        Ok(State { c, u })
    }
}

/// A λ-shock; `speed` is the slope `dt/dx` of the discontinuity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Shock {
    pub speed: f64,
    pub below: State,
    pub above: State,
}

/// A centred λ-rarefaction occupying `z0 < z < z_plus`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rarefaction {
    pub c0: f64,
    pub c_plus: f64,
    pub u0: f64,
    pub u_plus: f64,
    pub z0: f64,
    pub z_plus: f64,
    /// The Riemann invariant `W = u G(c)`, constant through the fan.
    pub invariant: f64,
}

impl Rarefaction {
    pub fn below(&self) -> State {
        State { c: self.c0, u: self.u0 }
    }

    pub fn above(&self) -> State {
        State { c: self.c_plus, u: self.u_plus }
    }

    pub fn strength(&self) -> f64 {
        (self.c_plus - self.c0).abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LambdaWave {
    None,
    Shock(Shock),
    Rarefaction(Rarefaction),
}

impl LambdaWave {
    pub fn kind_name(&self) -> &'static str {
        match self {
            LambdaWave::None => "none",
            LambdaWave::Shock(_) => "shock",
            LambdaWave::Rarefaction(_) => "rarefaction",
        }
    }
}

/// Solution of one (boundary or full) Riemann problem centred at `datum`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveFan {
    /// `(x*, t*)`.
    pub datum: (f64, f64),
    /// State on the `t < t*` side of the 0-contact.
    pub below: State,
    /// Velocity just above the 0-contact; the concentration there is `below.c`.
    pub contact_u: f64,
    pub wave: LambdaWave,
}

impl WaveFan {
    /// State on the rays just above the contact (the bottom trace of a
    /// boundary problem).
    pub fn bottom(&self) -> State {
        State { c: self.below.c, u: self.contact_u }
    }

    pub fn has_contact(&self) -> bool {
        self.contact_u != self.below.u
    }

    /// State seen on the ray of slope `z > 0` from the datum.
    pub fn state_at(&self, fns: &DerivedFunctions, z: f64) -> Result<State> {
        match self.wave {
            LambdaWave::None => Ok(self.bottom()),
            LambdaWave::Shock(s) => Ok(if z < s.speed { s.below } else { s.above }),
            LambdaWave::Rarefaction(r) => {
                if z <= r.z0 {
                    Ok(r.below())
                } else if z >= r.z_plus {
                    Ok(r.above())
                } else {
                    fan_state(fns, &r, z)
                }
            }
        }
    }
}

fn chord(fns: &DerivedFunctions, c0: f64, c: f64) -> f64 {
    (fns.f(c).value - fns.f(c0).value) / (c - c0)
}

/// Liu admissibility of a λ-shock from `c0` (below) to `c_plus` (above).
///
/// With `f''` of one sign on the range the endpoint rule decides and the
/// sampled chord condition must agree with it. An affine `f` on the range is
/// a tie and is not a shock.
pub fn liu_admissible(fns: &DerivedFunctions, c0: f64, c_plus: f64) -> Result<bool> {
    if c0 == c_plus {
        return Err(Error::Precondition("Liu test needs two distinct concentrations".into()));
    }
    // A strict sign on all of [0, 1] settles it by the endpoint rule; the
    // chord comparison is only needed where the sign is decided locally.
    match fns.fpp_sign() {
        SignClass::StrictlyPositive => return Ok(c_plus < c0),
        SignClass::StrictlyNegative => return Ok(c0 < c_plus),
        SignClass::VanishesSomewhere => {}
    }
    let class = f_second_sign_on(fns, c0, c_plus, LIU_SAMPLES);
    let chord_ok = || {
        let target = chord(fns, c0, c_plus);
        (1..LIU_SAMPLES).all(|i| {
            let c = c0 + (c_plus - c0) * i as f64 / LIU_SAMPLES as f64;
            target <= chord(fns, c0, c) + LIU_TOL
        })
    };
    let endpoint = match class {
        SignClass::StrictlyPositive => c_plus < c0,
        SignClass::StrictlyNegative => c0 < c_plus,
        SignClass::VanishesSomewhere => {
            let (lo, hi) = if c0 < c_plus { (c0, c_plus) } else { (c_plus, c0) };
            let affine = (0..LIU_SAMPLES).all(|i| {
                let c = lo + (hi - lo) * i as f64 / (LIU_SAMPLES - 1) as f64;
                fns.f(c).d2.abs() <= crate::model::VANISH_THRESHOLD
            });
            if affine {
                return Ok(false);
            }
            return Err(Error::Hypothesis {
                hypothesis: "H3",
                detail: format!("f'' vanishes between {c0} and {c_plus}"),
            });
        }
    };
    if endpoint != chord_ok() {
        return Err(Error::Inconsistent(format!(
            "endpoint and chord Liu criteria disagree for ({c0}, {c_plus})"
        )));
    }
    Ok(endpoint)
}

/// `alpha = [f]/[c] + 1` with jumps taken as `value(c_plus) - value(c0)`.
fn alpha(fns: &DerivedFunctions, c0: f64, c_plus: f64) -> f64 {
    chord(fns, c0, c_plus) + 1.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShockSolution {
    pub u0: f64,
    pub speed: f64,
}

/// Velocity below an admissible shock and its slope, from Rankine–Hugoniot.
pub fn solve_shock(fns: &DerivedFunctions, c0: f64, c_plus: f64, u_plus: f64) -> Result<ShockSolution> {
    if !(u_plus > 0.0) {
        return Err(Error::Precondition(format!("u_plus must be positive, got {u_plus}")));
    }
    if !liu_admissible(fns, c0, c_plus)? {
        return Err(Error::Precondition(format!("({c0}, {c_plus}) is not an admissible shock")));
    }
    let a = alpha(fns, c0, c_plus);
    let (h0, hp) = (fns.h(c0).value, fns.h(c_plus).value);
    if a + hp <= 0.0 || a + h0 <= 0.0 {
        return Err(Error::Inconsistent(format!("non-positive shock denominator for ({c0}, {c_plus})")));
    }
    let u0 = u_plus * (a + h0) / (a + hp);
    let jf = fns.f(c_plus).value - fns.f(c0).value;
    let jc = c_plus - c0;
    let speed = jf / (u_plus * jc) + (1.0 + hp) / u_plus;
    let speed_below = jf / (u0 * jc) + (1.0 + h0) / u0;
    if (speed - speed_below).abs() > RH_TOL * speed.abs().max(1.0) || !(u0 > 0.0) {
        return Err(Error::Inconsistent(format!(
            "Rankine-Hugoniot sides disagree: {speed} vs {speed_below}"
        )));
    }
    Ok(ShockSolution { u0, speed })
}

/// `Φ(c) = ∫_{c0}^{c} f''/H`.
fn phi(fns: &DerivedFunctions, c0: f64, c: f64) -> Result<f64> {
    adaptive_simpson(|s| fns.f(s).d2 / fns.big_h(s).0, c0, c, 1e-12)
}

/// Centred rarefaction from `c0` (below) to `c_plus` (above).
pub fn solve_rarefaction(fns: &DerivedFunctions, c0: f64, c_plus: f64, u_plus: f64) -> Result<Rarefaction> {
    if !(u_plus > 0.0) {
        return Err(Error::Precondition(format!("u_plus must be positive, got {u_plus}")));
    }
    if c0 == c_plus {
        return Err(Error::Precondition("degenerate rarefaction: c0 == c_plus".into()));
    }
    if liu_admissible(fns, c0, c_plus)? {
        return Err(Error::Precondition(format!("({c0}, {c_plus}) is a shock, not a rarefaction")));
    }
    if !fns.fpp_sign().is_strict() && !f_second_sign_on(fns, c0, c_plus, LIU_SAMPLES).is_strict() {
        return Err(Error::Hypothesis {
            hypothesis: "H3",
            detail: format!("f'' vanishes between {c0} and {c_plus}: no lambda-contacts are built"),
        });
    }
    let invariant = u_plus * fns.g(c_plus).exp();
    let g0 = fns.g(c0).exp();
    let z_plus = fns.big_h(c_plus).0 / u_plus;
    let z0 = fns.big_h(c0).0 * g0 / invariant;
    let z0_alt = z_plus * (-phi(fns, c0, c_plus)?).exp();
    if (z0 - z0_alt).abs() > 1e-9 {
        return Err(Error::Inconsistent(format!("fan foot {z0} disagrees with exp(-Phi) form {z0_alt}")));
    }
    if !(0.0 < z0 && z0 < z_plus) {
        return Err(Error::Inconsistent(format!("fan slopes out of order: z0={z0} z_plus={z_plus}")));
    }
    Ok(Rarefaction { c0, c_plus, u0: invariant / g0, u_plus, z0, z_plus, invariant })
}

/// Slope of the fan at concentration `c`: `H(c) G(c) / W`.
pub fn fan_slope_at(fns: &DerivedFunctions, r: &Rarefaction, c: f64) -> f64 {
    fns.big_h(c).0 * fns.g(c).exp() / r.invariant
}

/// State on the ray `z` inside a centred rarefaction.
pub fn fan_state(fns: &DerivedFunctions, r: &Rarefaction, z: f64) -> Result<State> {
    if !(r.z0 <= z && z <= r.z_plus) {
        return Err(Error::Domain(format!("z={z} outside fan [{}, {}]", r.z0, r.z_plus)));
    }
    if z == r.z0 {
        return Ok(r.below());
    }
    if z == r.z_plus {
        return Ok(r.above());
    }
    // z(c) is monotone from z0 at c0 to z_plus at c_plus.
    let (mut lo, mut hi) = (r.c0, r.c_plus);
    while (hi - lo).abs() > FAN_BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if fan_slope_at(fns, r, mid) < z {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let c = 0.5 * (lo + hi);
    let u = r.invariant / fns.g(c).exp();
    let u_char = fns.big_h(c).0 / z;
    if (u - u_char).abs() > 1e-9 * u.max(1.0) {
        return Err(Error::Inconsistent(format!("fan state u={u} vs H/z={u_char} at z={z}")));
    }
    Ok(State { c, u })
}

/// One simple λ-wave joining `(c0, ·)` below to `(c_plus, u_plus)` above.
pub fn solve_boundary_rp(fns: &DerivedFunctions, c0: f64, c_plus: f64, u_plus: f64) -> Result<WaveFan> {
    solve_boundary_rp_at(fns, c0, c_plus, u_plus, (0.0, 0.0))
}

fn solve_boundary_rp_at(
    fns: &DerivedFunctions,
    c0: f64,
    c_plus: f64,
    u_plus: f64,
    datum: (f64, f64),
) -> Result<WaveFan> {
    State::new(c0, 1.0)?;
    let above = State::new(c_plus, u_plus)?;
    if c0 == c_plus {
        return Ok(WaveFan { datum, below: above, contact_u: u_plus, wave: LambdaWave::None });
    }
    if liu_admissible(fns, c0, c_plus)? {
        let s = solve_shock(fns, c0, c_plus, u_plus)?;
        let below = State { c: c0, u: s.u0 };
        Ok(WaveFan { datum, below, contact_u: s.u0, wave: LambdaWave::Shock(Shock { speed: s.speed, below, above }) })
    } else {
        let r = solve_rarefaction(fns, c0, c_plus, u_plus)?;
        Ok(WaveFan { datum, below: r.below(), contact_u: r.u0, wave: LambdaWave::Rarefaction(r) })
    }
}

/// Full Riemann problem: 0-contact on `t = t*` followed by one λ-wave.
pub fn solve_full_rp(fns: &DerivedFunctions, below: State, above: State, datum: (f64, f64)) -> Result<WaveFan> {
    State::new(below.c, below.u)?;
    if below == above {
        return Ok(WaveFan { datum, below, contact_u: below.u, wave: LambdaWave::None });
    }
    let mut fan = solve_boundary_rp_at(fns, below.c, above.c, above.u, datum)?;
    fan.below = below;
    Ok(fan)
}

/// `gamma(c_minus, c_plus) = u_minus / u_plus` across a shock from `c_minus`
/// (below) to `c_plus` (above).
pub fn gamma(fns: &DerivedFunctions, c_minus: f64, c_plus: f64) -> Result<f64> {
    if c_minus == c_plus {
        return Err(Error::Precondition("gamma needs two distinct concentrations".into()));
    }
    let a = alpha(fns, c_minus, c_plus);
    let den = a + fns.h(c_plus).value;
    if den <= 0.0 {
        return Err(Error::Inconsistent(format!("gamma denominator {den} <= 0")));
    }
    Ok((a + fns.h(c_minus).value) / den)
}

/// Orders a concentration pair as `(below, above)` of a Liu-admissible shock.
pub fn shock_orientation(fns: &DerivedFunctions, c_a: f64, c_b: f64) -> Result<(f64, f64)> {
    if liu_admissible(fns, c_a, c_b)? {
        Ok((c_a, c_b))
    } else if liu_admissible(fns, c_b, c_a)? {
        Ok((c_b, c_a))
    } else {
        Err(Error::Hypothesis {
            hypothesis: "H3",
            detail: format!("neither ordering of ({c_a}, {c_b}) is an admissible shock"),
        })
    }
}

/// Growth factor of the bottom velocity over one shock/rarefaction pair,
/// without any sign requirement on the result.
pub fn amplification_factor(fns: &DerivedFunctions, c_lo: f64, c_hi: f64) -> Result<f64> {
    if !(0.0 < c_lo && c_lo <= c_hi && c_hi < 1.0) {
        return Err(Error::Precondition(format!("need 0 < c_lo <= c_hi < 1, got ({c_lo}, {c_hi})")));
    }
    if c_lo == c_hi {
        return Ok(1.0);
    }
    let (below, above) = shock_orientation(fns, c_lo, c_hi)?;
    Ok(gamma(fns, below, above)? * (fns.g(below) - fns.g(above)).exp())
}

/// Amplification coefficient `R = gamma(c-, c+) G(c-) / G(c+)`, required to
/// be at least one.
pub fn amplification(fns: &DerivedFunctions, c_lo: f64, c_hi: f64) -> Result<f64> {
    let r = amplification_factor(fns, c_lo, c_hi)?;
    if r < 1.0 - 1e-12 {
        return Err(Error::Hypothesis {
            hypothesis: "H1",
            detail: format!("amplification R({c_lo}, {c_hi}) = {r} < 1"),
        });
    }
    Ok(r)
}
