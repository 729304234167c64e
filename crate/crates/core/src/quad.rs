//! Adaptive Simpson quadrature and a cumulative integral table built on it.
//!
//! The table stores `F(x_i) = ∫_a^{x_i} f` on a uniform grid. A lookup adds a
//! locally refined integral over the partial cell, so the cost of one
//! evaluation is independent of where `x` sits in `[a, b]`.

use crate::error::{Error, Result};

pub const DEFAULT_TOLERANCE: f64 = 1e-12;
pub const MAX_DEPTH: u32 = 40;

struct Panel {
    a: f64,
    m: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
}

impl Panel {
    fn new<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Self {
        let m = 0.5 * (a + b);
        let (fa, fm, fb) = (f(a), f(m), f(b));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        Panel { a, m, b, fa, fm, fb, whole }
    }

    fn split<F: Fn(f64) -> f64>(&self, f: &F) -> (Panel, Panel) {
        let lm = 0.5 * (self.a + self.m);
        let rm = 0.5 * (self.m + self.b);
        let (flm, frm) = (f(lm), f(rm));
        let left = Panel {
            a: self.a,
            m: lm,
            b: self.m,
            fa: self.fa,
            fm: flm,
            fb: self.fm,
            whole: (self.m - self.a) / 6.0 * (self.fa + 4.0 * flm + self.fm),
        };
        let right = Panel {
            a: self.m,
            m: rm,
            b: self.b,
            fa: self.fm,
            fm: frm,
            fb: self.fb,
            whole: (self.b - self.m) / 6.0 * (self.fm + 4.0 * frm + self.fb),
        };
        (left, right)
    }
}

fn refine<F: Fn(f64) -> f64>(f: &F, p: &Panel, tol: f64, depth: u32) -> std::result::Result<f64, f64> {
    let (l, r) = p.split(f);
    let sum = l.whole + r.whole;
    let diff = sum - p.whole;
    if diff.abs() <= 15.0 * tol {
        return Ok(sum + diff / 15.0);
    }
    if depth == 0 {
        return Err(diff.abs() / 15.0);
    }
    let left = refine(f, &l, 0.5 * tol, depth - 1);
    let right = refine(f, &r, 0.5 * tol, depth - 1);
    match (left, right) {
        (Ok(a), Ok(b)) => Ok(a + b),
        (Err(e), Ok(_)) | (Ok(_), Err(e)) => Err(e),
        (Err(e1), Err(e2)) => Err(e1 + e2),
    }
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
///
/// Reversed bounds give the negated integral.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if b < a {
        return adaptive_simpson(f, b, a, tol).map(|v| -v);
    }
    let p = Panel::new(&f, a, b);
    refine(&f, &p, tol, MAX_DEPTH).map_err(|error| Error::Quadrature { a, b, error })
}

/// Cumulative integral of a fixed integrand on a uniform grid over `[a, b]`.
#[derive(Debug, Clone)]
pub struct CumulativeIntegral {
    a: f64,
    b: f64,
    step: f64,
    values: Vec<f64>,
    /// Integrand at the nodes, for Hermite interpolation.
    slopes: Vec<f64>,
    tol: f64,
}

impl CumulativeIntegral {
    /// Builds the table with `intervals` cells, each integrated adaptively.
    pub fn build<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, intervals: usize, tol: f64) -> Result<Self> {
        if intervals == 0 || !(b > a) {
            return Err(Error::param("intervals", "need at least one cell on a non-empty range"));
        }
        let step = (b - a) / intervals as f64;
        let cell_tol = tol / intervals as f64;
        let mut values = Vec::with_capacity(intervals + 1);
        values.push(0.0);
        let mut acc = 0.0;
        let mut comp = 0.0;
        for i in 0..intervals {
            let lo = a + step * i as f64;
            let hi = if i + 1 == intervals { b } else { a + step * (i + 1) as f64 };
            let piece = adaptive_simpson(&f, lo, hi, cell_tol)?;
            // Neumaier summation keeps the running total at round-off level.
            let t = acc + piece;
            if acc.abs() >= piece.abs() {
                comp += (acc - t) + piece;
            } else {
                comp += (piece - t) + acc;
            }
            acc = t;
            values.push(acc + comp);
        }
        let slopes = (0..=intervals).map(|i| f(if i == intervals { b } else { a + step * i as f64 })).collect();
        Ok(CumulativeIntegral { a, b, step, values, slopes, tol })
    }

    pub fn intervals(&self) -> usize {
        self.values.len() - 1
    }

    fn cell(&self, x: f64) -> (usize, f64, f64) {
        let n = self.intervals();
        let i = (((x - self.a) / self.step).floor().max(0.0) as usize).min(n - 1);
        let lo = self.a + self.step * i as f64;
        let hi = if i + 1 == n { self.b } else { self.a + self.step * (i + 1) as f64 };
        (i, lo, hi)
    }

    /// `∫_a^x f` by cubic Hermite interpolation of the table. The error is
    /// `step^4 / 384` times the largest third derivative of `f` on the cell.
    pub fn eval(&self, x: f64) -> f64 {
        let x = x.clamp(self.a, self.b);
        let (i, lo, hi) = self.cell(x);
        let h = hi - lo;
        let s = (x - lo) / h;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * y0 + (s3 - 2.0 * s2 + s) * m0 + (-2.0 * s3 + 3.0 * s2) * y1 + (s3 - s2) * m1
    }

    /// `∫_a^x f` integrating the partial cell adaptively. The integrand must
    /// be the one the table was built with.
    pub fn eval_exact<F: Fn(f64) -> f64>(&self, x: f64, f: F) -> f64 {
        let x = x.clamp(self.a, self.b);
        let (i, lo, hi) = self.cell(x);
        // Integrate from the nearer grid node.
        if x - lo <= hi - x {
            self.values[i] + partial(&f, lo, x, self.tol)
        } else {
            self.values[i + 1] - partial(&f, x, hi, self.tol)
        }
    }
}

fn partial<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    // The whole cell converged when the table was built; a sub-cell of a
    // smooth integrand converges too, so the estimate is kept either way.
    match adaptive_simpson(f, a, b, tol * 1e-3) {
        Ok(v) => v,
        Err(_) => Panel::new(f, a, b).whole,
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` for `n` in `1..=5`.
pub fn gauss_legendre(n: usize) -> &'static [(f64, f64)] {
    const G1: [(f64, f64); 1] = [(0.0, 2.0)];
    const G2: [(f64, f64); 2] = [(-0.577_350_269_189_625_8, 1.0), (0.577_350_269_189_625_8, 1.0)];
    const G3: [(f64, f64); 3] = [
        (-0.774_596_669_241_483_4, 0.555_555_555_555_555_6),
        (0.0, 0.888_888_888_888_888_8),
        (0.774_596_669_241_483_4, 0.555_555_555_555_555_6),
    ];
    const G4: [(f64, f64); 4] = [
        (-0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
        (-0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
        (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
        (0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
    ];
    const G5: [(f64, f64); 5] = [
        (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
        (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
        (0.0, 0.568_888_888_888_888_9),
        (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
        (0.906_179_845_938_664, 0.236_926_885_056_189_1),
    ];
    match n {
        0 | 1 => &G1,
        2 => &G2,
        3 => &G3,
        4 => &G4,
        _ => &G5,
    }
}
