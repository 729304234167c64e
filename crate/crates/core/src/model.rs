//! Equilibrium isotherms and the scalar functions of the concentration that
//! the rest of the crate is built from.
//!
//! With `c = c1` and `c2 = 1 - c` the adsorbed concentrations reduce to two
//! functions `q1(c)`, `q2(c)`. Everything else follows from them:
//!
//! ```text
//! h = q1 + q2              total adsorbed amount (flux of u)
//! f = q1 - c h             drives genuine nonlinearity (sign of f'')
//! H = 1 + q1' - c h' >= 1  so that lambda = H(c) / u
//! g' = -h' / H, g(0) = 0   w = ln u + g(c), W = u G(c), G = exp(g)
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{CumulativeIntegral, DEFAULT_TOLERANCE};
use crate::riemann::State;

/// Number of cells in the cached table for `g`.
pub const G_TABLE_INTERVALS: usize = 4096;
/// Values at or below this magnitude count as vanishing in sign decisions.
pub const VANISH_THRESHOLD: f64 = 1e-12;
const MONOTONICITY_GRID: usize = 1025;

/// Value and first two derivatives of a scalar function at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    const fn new(value: f64, d1: f64, d2: f64) -> Self {
        Jet { value, d1, d2 }
    }
}

/// The built-in isotherm families.
///
/// Deserializes from a table such as
/// `{ kind = "inert-convex-quadratic", a = 1.0, b = 0.5 }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum IsothermModel {
    /// `q1 = a1 c`, `q2 = a2 (1 - c)`.
    Linear { a1: f64, a2: f64 },
    /// Inert first species, `q2 = a (1 - c) + b (1 - c)^2`.
    InertConvexQuadratic { a: f64, b: f64 },
    /// Inert first species, `q2 = Q K (1 - c) / (1 + K (1 - c))`.
    InertLangmuir { q: f64, k: f64 },
    /// Competitive Langmuir `qi = Qi Ki ci / (1 + K1 c1 + K2 c2)`.
    BinaryLangmuir { q1: f64, k1: f64, q2: f64, k2: f64 },
}

fn nonneg(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be a finite non-negative number, got {v}")))
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be a finite positive number, got {v}")))
    }
}

impl IsothermModel {
    pub fn linear(a1: f64, a2: f64) -> Result<Self> {
        IsothermModel::Linear { a1, a2 }.validated()
    }

    pub fn inert_convex_quadratic(a: f64, b: f64) -> Result<Self> {
        IsothermModel::InertConvexQuadratic { a, b }.validated()
    }

    pub fn inert_langmuir(q: f64, k: f64) -> Result<Self> {
        IsothermModel::InertLangmuir { q, k }.validated()
    }

    pub fn binary_langmuir(q1: f64, k1: f64, q2: f64, k2: f64) -> Result<Self> {
        IsothermModel::BinaryLangmuir { q1, k1, q2, k2 }.validated()
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            IsothermModel::Linear { .. } => "linear",
            IsothermModel::InertConvexQuadratic { .. } => "inert-convex-quadratic",
            IsothermModel::InertLangmuir { .. } => "inert-langmuir",
            IsothermModel::BinaryLangmuir { .. } => "binary-langmuir",
        }
    }

    /// Checks parameter ranges, then `q1' >= 0 >= q2'` and `q1, q2 >= 0` on a
    /// dense grid over `[0, 1]`.
    pub fn validated(self) -> Result<Self> {
        match self {
            IsothermModel::Linear { a1, a2 } => {
                nonneg("a1", a1)?;
                nonneg("a2", a2)?;
            }
            IsothermModel::InertConvexQuadratic { a, b } => {
                positive("a", a)?;
                nonneg("b", b)?;
            }
            IsothermModel::InertLangmuir { q, k } => {
                positive("q", q)?;
                positive("k", k)?;
            }
            IsothermModel::BinaryLangmuir { q1, k1, q2, k2 } => {
                nonneg("q1", q1)?;
                nonneg("k1", k1)?;
                nonneg("q2", q2)?;
                nonneg("k2", k2)?;
            }
        }
        for i in 0..MONOTONICITY_GRID {
            let c = i as f64 / (MONOTONICITY_GRID - 1) as f64;
            let (a, b) = (self.q1(c), self.q2(c));
            if a.d1 < -VANISH_THRESHOLD || b.d1 > VANISH_THRESHOLD {
                return Err(Error::Hypothesis {
                    hypothesis: "monotone isotherms",
                    detail: format!("q1'={} q2'={} at c={c}", a.d1, b.d1),
                });
            }
            if a.value < -VANISH_THRESHOLD || b.value < -VANISH_THRESHOLD {
                return Err(Error::Hypothesis {
                    hypothesis: "non-negative isotherms",
                    detail: format!("q1={} q2={} at c={c}", a.value, b.value),
                });
            }
        }
        Ok(self)
    }

    pub fn q1(&self, c: f64) -> Jet {
        match *self {
            IsothermModel::Linear { a1, .. } => Jet::new(a1 * c, a1, 0.0),
            IsothermModel::InertConvexQuadratic { .. } | IsothermModel::InertLangmuir { .. } => {
                Jet::new(0.0, 0.0, 0.0)
            }
            IsothermModel::BinaryLangmuir { q1, k1, k2, .. } => {
                let d = k1 - k2;
                let den = 1.0 + k2 + d * c;
                let s = q1 * k1;
                Jet::new(
                    s * c / den,
                    s * (1.0 + k2) / (den * den),
                    -2.0 * s * (1.0 + k2) * d / (den * den * den),
                )
            }
        }
    }

    pub fn q2(&self, c: f64) -> Jet {
        let y = 1.0 - c;
        match *self {
            IsothermModel::Linear { a2, .. } => Jet::new(a2 * y, -a2, 0.0),
            IsothermModel::InertConvexQuadratic { a, b } => {
                Jet::new(a * y + b * y * y, -a - 2.0 * b * y, 2.0 * b)
            }
            IsothermModel::InertLangmuir { q, k } => {
                let e = 1.0 + k * y;
                Jet::new(q * k * y / e, -q * k / (e * e), -2.0 * q * k * k / (e * e * e))
            }
            IsothermModel::BinaryLangmuir { k1, q2, k2, .. } => {
                let d = k1 - k2;
                let den = 1.0 + k2 + d * c;
                let s = q2 * k2;
                Jet::new(
                    s * y / den,
                    -s * (1.0 + k1) / (den * den),
                    2.0 * s * (1.0 + k1) * d / (den * den * den),
                )
            }
        }
    }
}

/// Sign of a sampled quantity at one point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of(v: f64) -> Sign {
        if v > VANISH_THRESHOLD {
            Sign::Positive
        } else if v < -VANISH_THRESHOLD {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }
}

/// `G`, `G'` and the sign of `G''` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GValue {
    pub value: f64,
    pub slope: f64,
    pub curvature_sign: Sign,
}

/// All scalar functions derived from one isotherm model.
///
/// Immutable after construction; the `g` table is built eagerly.
#[derive(Debug, Clone)]
pub struct DerivedFunctions {
    model: IsothermModel,
    g_table: Option<CumulativeIntegral>,
    fpp_sign: SignClass,
}

impl DerivedFunctions {
    /// Validates the model and builds the `g` table (closed form for the
    /// linear kind).
    pub fn new(model: IsothermModel) -> Result<Self> {
        Self::with_tolerance(model, DEFAULT_TOLERANCE)
    }

    /// Like [`DerivedFunctions::new`] with a custom absolute tolerance for
    /// the `g` quadrature.
    pub fn with_tolerance(model: IsothermModel, tolerance: f64) -> Result<Self> {
        let model = model.validated()?;
        if !(tolerance > 0.0 && tolerance <= 1e-6) {
            return Err(Error::param("tolerance", format!("must lie in (0, 1e-6], got {tolerance}")));
        }
        let g_table = match model {
            IsothermModel::Linear { .. } => None,
            _ => Some(Self::build_table(&model, G_TABLE_INTERVALS, tolerance)?),
        };
        Ok(Self::assemble(model, g_table))
    }

    /// Like [`DerivedFunctions::new`] but always evaluates `g` by quadrature,
    /// even where a closed form exists.
    pub fn new_tabulated(model: IsothermModel, intervals: usize) -> Result<Self> {
        let model = model.validated()?;
        let g_table = Some(Self::build_table(&model, intervals, DEFAULT_TOLERANCE)?);
        Ok(Self::assemble(model, g_table))
    }

    fn assemble(model: IsothermModel, g_table: Option<CumulativeIntegral>) -> Self {
        let mut fns = DerivedFunctions { model, g_table, fpp_sign: SignClass::VanishesSomewhere };
        fns.fpp_sign = f_second_sign_on(&fns, 0.0, 1.0, MONOTONICITY_GRID);
        fns
    }

    /// Sign class of `f''` over all of `[0, 1]`.
    pub fn fpp_sign(&self) -> SignClass {
        self.fpp_sign
    }

    fn build_table(model: &IsothermModel, intervals: usize, tolerance: f64) -> Result<CumulativeIntegral> {
        CumulativeIntegral::build(|c| g_integrand(model, c), 0.0, 1.0, intervals, tolerance)
    }

    pub fn model(&self) -> &IsothermModel {
        &self.model
    }

    pub fn q1(&self, c: f64) -> Jet {
        self.model.q1(c)
    }

    pub fn q2(&self, c: f64) -> Jet {
        self.model.q2(c)
    }

    /// `h = q1 + q2` with derivatives.
    pub fn h(&self, c: f64) -> Jet {
        let (a, b) = (self.model.q1(c), self.model.q2(c));
        Jet::new(a.value + b.value, a.d1 + b.d1, a.d2 + b.d2)
    }

    /// `f = q1 - c h` with derivatives.
    pub fn f(&self, c: f64) -> Jet {
        let q1 = self.model.q1(c);
        let h = self.h(c);
        Jet::new(
            q1.value - c * h.value,
            q1.d1 - h.value - c * h.d1,
            q1.d2 - 2.0 * h.d1 - c * h.d2,
        )
    }

    /// Second component of the flux, `I(c) = c + q1(c)`.
    pub fn flux_i(&self, c: f64) -> f64 {
        c + self.model.q1(c).value
    }

    /// `(H, H')` with `H = 1 + q1' - c h'`.
    pub fn big_h(&self, c: f64) -> (f64, f64) {
        let q1 = self.model.q1(c);
        let h = self.h(c);
        (1.0 + q1.d1 - c * h.d1, q1.d2 - h.d1 - c * h.d2)
    }

    pub fn g_prime(&self, c: f64) -> f64 {
        g_integrand(&self.model, c)
    }

    /// `g(c) = -∫_0^c h'/H`, normalised by `g(0) = 0`.
    pub fn g(&self, c: f64) -> f64 {
        match (&self.g_table, self.model) {
            (Some(t), _) => t.eval(c),
            (None, IsothermModel::Linear { a1, a2 }) => ((a2 - a1) * c / (1.0 + a1)).ln_1p(),
            (None, _) => unreachable!("non-linear models always carry a table"),
        }
    }

    /// `G = exp(g)`, `G' = g' G`, and the sign of `G''` from the closed form
    /// `G'' = exp(g)/H^2 (-q1'' - q2'' - q2'' q1' + q2' q1'')`.
    pub fn big_g(&self, c: f64) -> GValue {
        let value = self.g(c).exp();
        GValue { value, slope: self.g_prime(c) * value, curvature_sign: Sign::of(self.gpp_factor(c)) }
    }

    /// The bracket in the closed form of `G''`; same sign as `G''`.
    pub fn gpp_factor(&self, c: f64) -> f64 {
        let (a, b) = (self.model.q1(c), self.model.q2(c));
        -a.d2 - b.d2 - b.d2 * a.d1 + b.d1 * a.d2
    }

    /// `G''` itself, from the closed form.
    pub fn gpp(&self, c: f64) -> f64 {
        let h = self.big_h(c).0;
        self.g(c).exp() / (h * h) * self.gpp_factor(c)
    }

    /// `(c, w, W)` with `w = ln u + g(c)` and `W = u G(c)`.
    pub fn riemann_invariants(&self, s: State) -> (f64, f64, f64) {
        let w = s.u.ln() + self.g(s.c);
        (s.c, w, s.u * self.g(s.c).exp())
    }

    /// `W = u G(c)`.
    pub fn w_invariant(&self, s: State) -> f64 {
        s.u * self.g(s.c).exp()
    }

    /// Non-zero eigenvalue `lambda = H(c) / u`.
    pub fn lambda(&self, s: State) -> f64 {
        self.big_h(s.c).0 / s.u
    }
}

fn g_integrand(model: &IsothermModel, c: f64) -> f64 {
    let (a, b) = (model.q1(c), model.q2(c));
    let hp = a.d1 + b.d1;
    -hp / (1.0 + a.d1 - c * hp)
}

/// How a sampled quantity behaves over `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignClass {
    StrictlyNegative,
    StrictlyPositive,
    VanishesSomewhere,
}

impl SignClass {
    fn classify(values: impl IntoIterator<Item = f64>) -> SignClass {
        let (mut neg, mut pos, mut zero) = (false, false, false);
        for v in values {
            match Sign::of(v) {
                Sign::Negative => neg = true,
                Sign::Positive => pos = true,
                Sign::Zero => zero = true,
            }
        }
        match (neg, pos, zero) {
            (true, false, false) => SignClass::StrictlyNegative,
            (false, true, false) => SignClass::StrictlyPositive,
            _ => SignClass::VanishesSomewhere,
        }
    }

    pub fn is_strict(self) -> bool {
        self != SignClass::VanishesSomewhere
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub min: f64,
    pub max: f64,
}

impl Range {
    fn of(values: impl IntoIterator<Item = f64>) -> Range {
        values.into_iter().fold(Range { min: f64::INFINITY, max: f64::NEG_INFINITY }, |r, v| Range {
            min: r.min.min(v),
            max: r.max.max(v),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extrema {
    pub big_h: Range,
    pub big_g: Range,
    pub abs_h_prime: Range,
    pub abs_f_second: Range,
}

/// Verdicts on the four structural hypotheses for one model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub model: IsothermModel,
    pub h1_sign_gpp: SignClass,
    pub h2_sign_hp: SignClass,
    pub h3_sign_fpp: SignClass,
    pub h1_pass: bool,
    pub h2_pass: bool,
    pub h3_pass: bool,
    /// True when the system is *not* in the Temple class.
    pub h4_pass: bool,
    pub h4_temple: crate::scenario::TempleVerdict,
    pub extrema: Extrema,
    pub samples: usize,
}

/// Decides (H1)–(H3) by dense sampling and (H4) by Temple classification.
pub fn check_hypotheses(fns: &DerivedFunctions, n_samples: usize) -> Result<HypothesisReport> {
    if n_samples < 64 {
        return Err(Error::param("n_samples", format!("need at least 64, got {n_samples}")));
    }
    let grid: Vec<f64> = (0..n_samples).map(|i| i as f64 / (n_samples - 1) as f64).collect();
    let h1 = SignClass::classify(grid.iter().map(|&c| fns.gpp_factor(c)));
    let h2 = SignClass::classify(grid.iter().map(|&c| fns.h(c).d1));
    let h3 = SignClass::classify(grid.iter().map(|&c| fns.f(c).d2));
    let extrema = Extrema {
        big_h: Range::of(grid.iter().map(|&c| fns.big_h(c).0)),
        big_g: Range::of(grid.iter().map(|&c| fns.g(c).exp())),
        abs_h_prime: Range::of(grid.iter().map(|&c| fns.h(c).d1.abs())),
        abs_f_second: Range::of(grid.iter().map(|&c| fns.f(c).d2.abs())),
    };
    let temple = crate::scenario::classify_temple(fns, crate::scenario::DEFAULT_TEMPLE_GRID)?;
    Ok(HypothesisReport {
        model: *fns.model(),
        h1_sign_gpp: h1,
        h2_sign_hp: h2,
        h3_sign_fpp: h3,
        h1_pass: h1 == SignClass::StrictlyNegative,
        h2_pass: h2.is_strict(),
        h3_pass: h3.is_strict(),
        h4_pass: temple.verdict == crate::scenario::TempleClass::NotTemple,
        h4_temple: temple,
        extrema,
        samples: n_samples,
    })
}

/// Sign class of `f''` on a sub-range, sampled at `n` points including the ends.
pub fn f_second_sign_on(fns: &DerivedFunctions, lo: f64, hi: f64, n: usize) -> SignClass {
    let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let n = n.max(2);
    SignClass::classify((0..n).map(|i| fns.f(lo + (hi - lo) * i as f64 / (n - 1) as f64).d2))
}

/// Sign class of `h'` on a sub-range.
pub fn h_prime_sign_on(fns: &DerivedFunctions, lo: f64, hi: f64, n: usize) -> SignClass {
    let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let n = n.max(2);
    SignClass::classify((0..n).map(|i| fns.h(lo + (hi - lo) * i as f64 / (n - 1) as f64).d1))
}

/// Sign class of `G''` over `[0, 1]`.
pub fn gpp_sign_class(fns: &DerivedFunctions, n: usize) -> SignClass {
    let n = n.max(2);
    SignClass::classify((0..n).map(|i| fns.gpp_factor(i as f64 / (n - 1) as f64)))
}

/// Extremes of `G` over `[0, 1]` sampled at `n` points.
pub fn big_g_range(fns: &DerivedFunctions, n: usize) -> Range {
    let n = n.max(2);
    Range::of((0..n).map(|i| fns.g(i as f64 / (n - 1) as f64).exp()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lin() -> DerivedFunctions {
        DerivedFunctions::new(IsothermModel::linear(0.0, 1.0).unwrap()).unwrap()
    }

    fn cvx() -> DerivedFunctions {
        DerivedFunctions::new(IsothermModel::inert_convex_quadratic(1.0, 0.5).unwrap()).unwrap()
    }

    fn lng() -> DerivedFunctions {
        DerivedFunctions::new(IsothermModel::inert_langmuir(1.0, 1.0).unwrap()).unwrap()
    }

    // Reference values from 30-digit quadrature and the analytic antiderivative
    // g = ½ ln(1 + 2c - c²) + (1/(2√2)) ln((√2 + c - 1)/(√2 - c + 1)) - const.
    const CVX_G_02: f64 = 0.323_602_584_339_676_2;
    const CVX_G_08: f64 = 0.859_022_694_001_692_8;
    const CVX_BIG_G_08: f64 = 2.360_852_290_776_622;

    #[test]
    fn make_model_examples() {
        let m = lin();
        assert_eq!(m.q1(0.3).value, 0.0);
        assert_eq!(m.q2(0.3).value, 0.7);
        assert!((cvx().q2(0.2).value - 1.12).abs() < 1e-15);
        let l = lng();
        assert_eq!(l.q2(0.0).value, 0.5);
        for c in [0.1, 0.5, 0.9] {
            assert!((l.q2(c).value - (1.0 - c) / (2.0 - c)).abs() < 1e-15);
        }
    }

    #[test]
    fn make_model_rejects_bad_params() {
        assert!(IsothermModel::linear(-1.0, 1.0).is_err());
        assert!(IsothermModel::inert_convex_quadratic(0.0, 0.5).is_err());
        assert!(IsothermModel::inert_langmuir(1.0, f64::NAN).is_err());
        assert!(IsothermModel::binary_langmuir(1.0, -0.1, 1.0, 1.0).is_err());
    }

    #[test]
    fn h_examples() {
        let j = lin().h(0.5);
        assert_eq!((j.value, j.d1, j.d2), (0.5, -1.0, 0.0));
        let j = cvx().h(0.2);
        assert!((j.value - 1.12).abs() < 1e-15 && (j.d1 + 1.8).abs() < 1e-15 && j.d2 == 1.0);
        for m in [lin(), cvx(), lng()] {
            assert_eq!(m.h(0.0).value, m.q1(0.0).value + m.q2(0.0).value);
        }
    }

    #[test]
    fn f_examples() {
        let j = lin().f(0.2);
        assert!((j.value + 0.16).abs() < 1e-15 && (j.d2 - 2.0).abs() < 1e-15);
        let j = cvx().f(0.8);
        assert!((j.value + 0.176).abs() < 1e-15 && (j.d2 - 1.6).abs() < 1e-14);
        for m in [lin(), cvx(), lng()] {
            assert_eq!(m.f(0.0).value, m.q1(0.0).value);
        }
    }

    #[test]
    fn big_h_examples() {
        assert_eq!(lin().big_h(0.5).0, 1.5);
        assert!((cvx().big_h(0.8).0 - 1.96).abs() < 1e-15);
    }

    #[test]
    fn g_examples() {
        assert!((lin().g(0.5) - 1.5f64.ln()).abs() < 1e-10);
        assert!((cvx().g(0.2) - CVX_G_02).abs() < 1e-12);
        assert!((cvx().g(0.8) - CVX_G_08).abs() < 1e-12);
        assert_eq!(cvx().g(0.0), 0.0);
        assert_eq!(lin().g(0.0), 0.0);
    }

    #[test]
    fn big_g_examples() {
        let v = lin().big_g(0.5);
        assert!((v.value - 1.5).abs() < 1e-12);
        assert_eq!(v.curvature_sign, Sign::Zero);
        let v = cvx().big_g(0.8);
        assert!((v.value - CVX_BIG_G_08).abs() < 1e-11);
        assert_eq!(v.curvature_sign, Sign::Negative);
        for c in [0.0, 0.3, 0.7, 1.0] {
            assert_eq!(lng().big_g(c).curvature_sign, Sign::Positive);
        }
    }

    #[test]
    fn invariants_and_lambda() {
        let (c, w, big_w) = lin().riemann_invariants(State { c: 0.0, u: 1.0 });
        assert_eq!((c, w, big_w), (0.0, 0.0, 1.0));
        let (_, _, big_w) = lin().riemann_invariants(State { c: 0.5, u: 2.0 });
        assert!((big_w - 3.0).abs() < 1e-12);
        let (_, _, big_w) = cvx().riemann_invariants(State { c: 0.2, u: 1.0 });
        assert!((big_w - CVX_G_02.exp()).abs() < 1e-11);
        assert!((big_w - 1.38206).abs() < 1e-4);

        let m = cvx();
        assert!((m.lambda(State { c: 0.2, u: 1.0 }) - 1.36).abs() < 1e-14);
        assert!((m.lambda(State { c: 0.8, u: 0.590909 }) - 3.31692).abs() < 1e-5);
        let s = State { c: 0.4, u: 0.7 };
        assert!((m.lambda(State { c: 0.4, u: 3.0 * 0.7 }) - m.lambda(s) / 3.0).abs() < 1e-15);
    }

    #[test]
    fn hypothesis_reports() {
        let r = check_hypotheses(&cvx(), 1025).unwrap();
        assert!(r.h1_pass && r.h2_pass && r.h3_pass && r.h4_pass);
        assert!(r.extrema.abs_h_prime.min >= 1.0 - 1e-12);
        assert!(r.extrema.abs_f_second.min >= 1.0 - 1e-12);

        let r = check_hypotheses(&lin(), 1025).unwrap();
        assert_eq!(r.h1_sign_gpp, SignClass::VanishesSomewhere);
        assert!(!r.h1_pass && !r.h4_pass);

        let r = check_hypotheses(&lng(), 1025).unwrap();
        assert_eq!(r.h1_sign_gpp, SignClass::StrictlyPositive);
        assert!(!r.h1_pass);

        assert!(check_hypotheses(&cvx(), 10).is_err());
    }

    #[test]
    fn report_verdicts_match_extrema() {
        for m in [lin(), cvx(), lng()] {
            let r = check_hypotheses(&m, 257).unwrap();
            assert!(r.extrema.big_h.min >= 1.0);
            assert_eq!(
                r.h3_sign_fpp == SignClass::VanishesSomewhere,
                r.extrema.abs_f_second.min <= VANISH_THRESHOLD
            );
            assert_eq!(
                r.h2_sign_hp == SignClass::VanishesSomewhere,
                r.extrema.abs_h_prime.min <= VANISH_THRESHOLD
            );
        }
    }

    #[test]
    fn binary_langmuir_with_equal_affinities_is_linear() {
        let m = DerivedFunctions::new(IsothermModel::binary_langmuir(1.0, 2.0, 0.5, 2.0).unwrap()).unwrap();
        for c in [0.0, 0.4, 1.0] {
            assert_eq!(m.q1(c).d2, 0.0);
            assert_eq!(m.q2(c).d2, 0.0);
        }
        assert_eq!(gpp_sign_class(&m, 65), SignClass::VanishesSomewhere);
    }
}
