use serde::{Deserialize, Serialize};

use super::Solution;
use crate::error::{Error, Result};
use crate::model::DerivedFunctions;
use crate::quad::{gauss_legendre, CumulativeIntegral, DEFAULT_TOLERANCE};
use crate::riemann::State;

/// Rectangles must start at or above this time; every emission is centred
/// on `t = 0`.
pub const MIN_RECT_T: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub xa: f64,
    pub xb: f64,
    pub ta: f64,
    pub tb: f64,
}

impl Rect {
    pub fn new(xa: f64, xb: f64, ta: f64, tb: f64) -> Result<Self> {
        let r = Rect { xa, xb, ta, tb };
        if !(xa < xb && ta < tb) || ![xa, xb, ta, tb].iter().all(|v| v.is_finite()) {
            return Err(Error::param("rect", format!("need xa < xb and ta < tb, got {r:?}")));
        }
        Ok(r)
    }

    fn check(&self, sol: &Solution) -> Result<()> {
        Rect::new(self.xa, self.xb, self.ta, self.tb)?;
        if self.ta < MIN_RECT_T {
            return Err(Error::Domain(format!("rectangle starts at t={} < {MIN_RECT_T}", self.ta)));
        }
        if self.xa < 0.0 || self.xb > sol.x_stop() || self.tb > sol.t_horizon() {
            return Err(Error::Domain(format!("rectangle {self:?} leaves the computed region")));
        }
        Ok(())
    }
}

/// Composite Gauss rule over constant pieces. Exact for piecewise constants;
/// kept in quadrature form so the node count is an honest parameter.
fn integrate_pieces<const N: usize>(pieces: &[(f64, f64, State)], n_quad: usize, f: impl Fn(State) -> [f64; N]) -> [f64; N] {
    let rule = gauss_legendre(n_quad);
    let mut acc = [0.0; N];
    for &(a, b, s) in pieces {
        let half = 0.5 * (b - a);
        let v = f(s);
        for &(_, w) in rule {
            for k in 0..N {
                acc[k] += half * w * v[k];
            }
        }
    }
    acc
}

fn check_quad(n_quad: usize) -> Result<()> {
    if !(1..=5).contains(&n_quad) {
        return Err(Error::param("n_quad", format!("must be in 1..=5, got {n_quad}")));
    }
    Ok(())
}

/// Boundary integral of the conserved quantities around `rect`:
/// `∮` of `(u, u c)` over the vertical sides and `(h, c + q1)` over the
/// horizontal ones. Zero up to round-off for an exact weak solution.
pub fn conservation_residual(fns: &DerivedFunctions, sol: &Solution, rect: Rect, n_quad: usize) -> Result<[f64; 2]> {
    rect.check(sol)?;
    check_quad(n_quad)?;
    let flux_x = |s: State| [s.u, s.u * s.c];
    let flux_t = |s: State| [fns.h(s.c).value, fns.flux_i(s.c)];
    edge_sum(sol, rect, n_quad, flux_x, flux_t)
}

fn edge_sum(
    sol: &Solution,
    rect: Rect,
    n_quad: usize,
    flux_x: impl Fn(State) -> [f64; 2],
    flux_t: impl Fn(State) -> [f64; 2],
) -> Result<[f64; 2]> {
    let cols = sol.columns(&[rect.xa, rect.xb])?;
    let left = integrate_pieces(&cols[0].pieces(rect.ta, rect.tb), n_quad, &flux_x);
    let right = integrate_pieces(&cols[1].pieces(rect.ta, rect.tb), n_quad, &flux_x);
    let rows = sol.rows_pieces(&[rect.ta, rect.tb], rect.xa, rect.xb)?;
    let bottom = integrate_pieces(&rows[0], n_quad, &flux_t);
    let top = integrate_pieces(&rows[1], n_quad, &flux_t);
    Ok([(right[0] - left[0]) + (top[0] - bottom[0]), (right[1] - left[1]) + (top[1] - bottom[1])])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntropyFunction {
    /// `c²`
    Square,
    /// `(c - 1/2)²`
    CenteredSquare,
    /// `c ln c`
    CLogC,
}

impl EntropyFunction {
    pub fn psi(self, c: f64) -> f64 {
        match self {
            EntropyFunction::Square => c * c,
            EntropyFunction::CenteredSquare => (c - 0.5) * (c - 0.5),
            EntropyFunction::CLogC => {
                if c <= 0.0 {
                    0.0
                } else {
                    c * c.ln()
                }
            }
        }
    }
}

/// Entropy flux `Q` with `Q' = h' ψ + H ψ'`, normalised by `Q(0) = 0`.
struct EntropyFlux<'a> {
    fns: &'a DerivedFunctions,
    psi: EntropyFunction,
    table: CumulativeIntegral,
}

impl<'a> EntropyFlux<'a> {
    fn new(fns: &'a DerivedFunctions, psi: EntropyFunction) -> Result<Self> {
        let table = CumulativeIntegral::build(|c| Self::integrand(fns, psi, c), 0.0, 1.0, 1024, DEFAULT_TOLERANCE)?;
        Ok(EntropyFlux { fns, psi, table })
    }

    fn integrand(fns: &DerivedFunctions, psi: EntropyFunction, c: f64) -> f64 {
        (fns.h(c).d1 - fns.big_h(c).1) * psi.psi(c)
    }

    fn eval(&self, c: f64) -> f64 {
        let (fns, psi) = (self.fns, self.psi);
        let hpsi = |c: f64| fns.big_h(c).0 * psi.psi(c);
        hpsi(c) - hpsi(0.0) + self.table.eval_exact(c, |s| Self::integrand(fns, psi, s))
    }
}

/// `∮ (u ψ(c), Q(c))` around `rect`; non-positive (up to round-off) across
/// admissible shocks, zero where the solution is smooth or a contact.
pub fn entropy_residual(fns: &DerivedFunctions, sol: &Solution, rect: Rect, psi: EntropyFunction, n_quad: usize) -> Result<f64> {
    rect.check(sol)?;
    check_quad(n_quad)?;
    let q = EntropyFlux::new(fns, psi)?;
    let r = edge_sum(sol, rect, n_quad, |s| [s.u * psi.psi(s.c), 0.0], |s| [q.eval(s.c), 0.0])?;
    Ok(r[0])
}
