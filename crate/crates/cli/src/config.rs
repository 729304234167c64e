use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use toml::{Table, Value};
use wavefront_core::IsothermModel;

use crate::CliError;

pub const DEFAULT_OUT_DIR: &str = "wavefront-out";
pub const OUT_ENV: &str = "WAVEFRONT_OUT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    CheckModel,
    Riemann,
    Simulate,
    Temple,
    Blowup,
    CompareFv,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::CheckModel => "check-model",
            Command::Riemann => "riemann",
            Command::Simulate => "simulate",
            Command::Temple => "temple",
            Command::Blowup => "blowup",
            Command::CompareFv => "compare-fv",
        }
    }
}

/// `[scenario]`: the alternating blow-up scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioSpec {
    pub c_lo: f64,
    pub c_hi: f64,
    pub u0: f64,
    pub x_inf: f64,
    pub ratio: f64,
    pub n_pairs: usize,
    pub delta: f64,
    pub t_max: f64,
    /// Defaults to halfway between the last emission point and `x_inf`.
    pub x_stop: Option<f64>,
    pub max_events: usize,
    /// Pair counts for `blowup`.
    pub n_list: Vec<usize>,
}

impl Default for ScenarioSpec {
    fn default() -> Self {
        ScenarioSpec {
            c_lo: 0.2,
            c_hi: 0.8,
            u0: 1.0,
            x_inf: 1.0,
            ratio: 0.97,
            n_pairs: 6,
            delta: 5e-3,
            t_max: 10.0,
            x_stop: None,
            max_events: wavefront_core::fronttrack::DEFAULT_MAX_EVENTS,
            n_list: vec![25, 50, 100],
        }
    }
}

/// `[riemann]`: `c0` is the concentration on `t = 0`, `(c_plus, u_plus)`
/// the state entering at `x = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RiemannSpec {
    pub c0: f64,
    pub c_plus: f64,
    pub u_plus: f64,
}

/// `[fv]`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FvSpec {
    pub dt: f64,
    pub x_slice: f64,
    /// Defaults to `[0, t_max]`.
    pub t_range: Option<[f64; 2]>,
    pub cfl: f64,
}

impl Default for FvSpec {
    fn default() -> Self {
        FvSpec { dt: 1e-3, x_slice: 1.0, t_range: None, cfl: wavefront_core::fvref::DEFAULT_CFL }
    }
}

/// `[numerics]`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Numerics {
    /// Absolute tolerance of the `g` quadrature.
    pub tolerance: f64,
    /// Sample count for the hypothesis checks.
    pub samples: usize,
    pub temple_grid: usize,
    /// Relative tolerance of the plateau check in `simulate`.
    pub growth_tol: f64,
}

impl Default for Numerics {
    fn default() -> Self {
        Numerics { tolerance: 1e-12, samples: 1025, temple_grid: 32, growth_tol: 1e-8 }
    }
}

/// `[output]`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
    /// Grid of `fields.csv`: points in `t` over `[0, t_max]` and in `x` over `[0, x_stop]`.
    pub fields_nt: usize,
    pub fields_nx: usize,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec { dir: None, fields_nt: 11, fields_nx: 11 }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    model: Option<IsothermModel>,
    #[serde(default)]
    scenario: ScenarioSpec,
    riemann: Option<RiemannSpec>,
    #[serde(default)]
    fv: FvSpec,
    #[serde(default)]
    numerics: Numerics,
    #[serde(default)]
    output: OutputSpec,
}

/// Values given on the command line; they win over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub model_kind: Option<String>,
    /// `name=value` model parameters.
    pub params: Vec<(String, f64)>,
    /// `(section, key, value)`.
    pub values: Vec<(&'static str, &'static str, Value)>,
    pub out_dir: Option<PathBuf>,
}

impl Overrides {
    pub fn set(&mut self, section: &'static str, key: &'static str, value: impl Into<Value>) {
        self.values.push((section, key, value.into()));
    }
}

/// A fully validated invocation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunPlan {
    pub command: Command,
    pub model: IsothermModel,
    pub scenario: ScenarioSpec,
    pub riemann: Option<RiemannSpec>,
    pub fv: FvSpec,
    pub numerics: Numerics,
    pub output: OutputSpec,
    pub out_dir: PathBuf,
}

fn invalid(key: &str, why: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("invalid value for `{key}`: {why}"))
}

fn section<'a>(table: &'a mut Table, name: &str) -> Result<&'a mut Table, CliError> {
    table
        .entry(name)
        .or_insert_with(|| Value::Table(Table::new()))
        .as_table_mut()
        .ok_or_else(|| CliError::Config(format!("`{name}` must be a table")))
}

/// Reads `path` (if any), applies `overrides` and validates the result.
pub fn parse_config(command: Command, path: Option<&Path>, overrides: &Overrides) -> Result<RunPlan, CliError> {
    let mut table = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
            // Deserialize straight from the text first so errors carry line and column.
            toml::from_str::<FileConfig>(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            text.parse::<Table>().map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
        }
        None => Table::new(),
    };

    if let Some(kind) = &overrides.model_kind {
        let mut m = Table::new();
        m.insert("kind".into(), Value::String(kind.clone()));
        table.insert("model".into(), Value::Table(m));
    }
    if !overrides.params.is_empty() {
        let m = section(&mut table, "model")?;
        for (k, v) in &overrides.params {
            m.insert(k.clone(), Value::Float(*v));
        }
    }
    for (sec, key, value) in &overrides.values {
        section(&mut table, sec)?.insert((*key).into(), value.clone());
    }

    let file: FileConfig = table.try_into().map_err(|e: toml::de::Error| CliError::Config(e.to_string().trim_end().replace('\n', " ")))?;
    let model = file
        .model
        .ok_or_else(|| CliError::Config("missing `model`: give a [model] table or --model".into()))?
        .validated()?;

    let out_dir = overrides
        .out_dir
        .clone()
        .or_else(|| file.output.dir.clone())
        .or_else(|| std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));

    let plan = RunPlan {
        command,
        model,
        scenario: file.scenario,
        riemann: file.riemann,
        fv: file.fv,
        numerics: file.numerics,
        output: file.output,
        out_dir,
    };
    validate(&plan)?;
    Ok(plan)
}

fn validate(plan: &RunPlan) -> Result<(), CliError> {
    let s = &plan.scenario;
    let unit = |key: &str, v: f64| if (0.0..=1.0).contains(&v) { Ok(()) } else { Err(invalid(key, format!("{v} is outside [0, 1]"))) };
    let positive = |key: &str, v: f64| {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(invalid(key, format!("{v} is not a positive finite number")))
        }
    };
    unit("scenario.c_lo", s.c_lo)?;
    unit("scenario.c_hi", s.c_hi)?;
    if s.c_lo >= s.c_hi {
        return Err(invalid("scenario.c_hi", format!("must exceed c_lo = {}", s.c_lo)));
    }
    positive("scenario.u0", s.u0)?;
    positive("scenario.x_inf", s.x_inf)?;
    positive("scenario.t_max", s.t_max)?;
    positive("scenario.delta", s.delta)?;
    if !(s.ratio > 0.0 && s.ratio < 1.0) {
        return Err(invalid("scenario.ratio", format!("{} is outside (0, 1)", s.ratio)));
    }
    if s.n_pairs == 0 {
        return Err(invalid("scenario.n_pairs", "must be at least 1"));
    }
    if let Some(x) = s.x_stop {
        positive("scenario.x_stop", x)?;
    }
    if s.max_events == 0 {
        return Err(invalid("scenario.max_events", "must be at least 1"));
    }
    if plan.command == Command::Blowup && (s.n_list.is_empty() || s.n_list.contains(&0)) {
        return Err(invalid("scenario.n_list", "needs at least one positive pair count"));
    }
    if let Some(r) = &plan.riemann {
        unit("riemann.c0", r.c0)?;
        unit("riemann.c_plus", r.c_plus)?;
        positive("riemann.u_plus", r.u_plus)?;
    } else if matches!(plan.command, Command::Riemann | Command::CompareFv) {
        return Err(CliError::Config("missing `riemann`: give c0, c_plus and u_plus".into()));
    }
    let fv = &plan.fv;
    positive("fv.dt", fv.dt)?;
    positive("fv.x_slice", fv.x_slice)?;
    if !(fv.cfl > 0.0 && fv.cfl <= 1.0) {
        return Err(invalid("fv.cfl", format!("{} is outside (0, 1]", fv.cfl)));
    }
    if let Some([a, b]) = fv.t_range {
        if !(0.0 <= a && a < b && b <= s.t_max) {
            return Err(invalid("fv.t_range", format!("need 0 <= {a} < {b} <= t_max = {}", s.t_max)));
        }
    }
    let n = &plan.numerics;
    if !(n.tolerance > 0.0 && n.tolerance <= 1e-6) {
        return Err(invalid("numerics.tolerance", format!("{} is outside (0, 1e-6]", n.tolerance)));
    }
    if n.samples < 64 {
        return Err(invalid("numerics.samples", "must be at least 64"));
    }
    if n.temple_grid < 3 {
        return Err(invalid("numerics.temple_grid", "must be at least 3"));
    }
    positive("numerics.growth_tol", n.growth_tol)?;
    if plan.output.fields_nt < 2 || plan.output.fields_nx < 2 {
        return Err(invalid("output.fields_nt/fields_nx", "need at least 2 points per axis"));
    }
    Ok(())
}
