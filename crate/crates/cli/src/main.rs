use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wavefront_psa::{execute, parse_config, CliError, Command, Overrides};

#[derive(Parser)]
#[command(name = "wavefront-psa", version, about = "Riemann solvers, front tracking and blow-up experiments for the PSA system")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Decide the structural hypotheses for a model and print the report.
    CheckModel {
        #[command(flatten)]
        common: Common,
        /// Sample count for the sign checks.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Solve one boundary Riemann problem.
    Riemann {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        data: RiemannArgs,
    },
    /// Front-tracking run of the alternating scenario.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Points in t of the fields.csv grid.
        #[arg(long)]
        fields_nt: Option<usize>,
        /// Points in x of the fields.csv grid.
        #[arg(long)]
        fields_nx: Option<usize>,
    },
    /// Temple-class classification.
    Temple {
        #[command(flatten)]
        common: Common,
        /// Concentration grid size.
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Growth of the bottom velocity for several pair counts.
    Blowup {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Comma-separated pair counts.
        #[arg(long, value_delimiter = ',')]
        n_list: Option<Vec<usize>>,
    },
    /// Godunov finite-volume run against the front-tracking and exact solutions.
    CompareFv {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        data: RiemannArgs,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        x_slice: Option<f64>,
        /// `t_a,t_b`
        #[arg(long, value_delimiter = ',')]
        t_range: Option<Vec<f64>>,
        #[arg(long)]
        cfl: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        max_events: Option<usize>,
    },
}

#[derive(Args)]
struct Common {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (default: $WAVEFRONT_OUT, then ./wavefront-out).
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Model kind: linear, inert-convex-quadratic, inert-langmuir, binary-langmuir.
    #[arg(long)]
    model: Option<String>,
    /// Model parameter as NAME=VALUE; repeatable.
    #[arg(long = "param", value_parser = parse_param)]
    params: Vec<(String, f64)>,
    /// Absolute tolerance of the g quadrature.
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Args)]
struct RiemannArgs {
    /// Concentration on t = 0.
    #[arg(long)]
    c0: Option<f64>,
    /// Concentration entering at x = 0.
    #[arg(long)]
    c_plus: Option<f64>,
    /// Velocity entering at x = 0.
    #[arg(long)]
    u_plus: Option<f64>,
}

#[derive(Args)]
struct ScenarioArgs {
    #[arg(long)]
    c_lo: Option<f64>,
    #[arg(long)]
    c_hi: Option<f64>,
    #[arg(long)]
    u0: Option<f64>,
    #[arg(long)]
    x_inf: Option<f64>,
    #[arg(long)]
    ratio: Option<f64>,
    #[arg(long)]
    n_pairs: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    x_stop: Option<f64>,
    #[arg(long)]
    max_events: Option<usize>,
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got `{s}`"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("parameter `{k}`: {e}"))?;
    Ok((k.trim().to_string(), v))
}

fn int(v: usize) -> toml::Value {
    toml::Value::Integer(i64::try_from(v).unwrap_or(i64::MAX))
}

impl Common {
    fn into_overrides(self, o: &mut Overrides) -> Option<PathBuf> {
        o.model_kind = self.model;
        o.params = self.params;
        o.out_dir = self.out_dir;
        if let Some(v) = self.tolerance {
            o.set("numerics", "tolerance", v);
        }
        self.config
    }
}

impl RiemannArgs {
    fn apply(self, o: &mut Overrides) {
        for (key, v) in [("c0", self.c0), ("c_plus", self.c_plus), ("u_plus", self.u_plus)] {
            if let Some(v) = v {
                o.set("riemann", key, v);
            }
        }
    }
}

impl ScenarioArgs {
    fn apply(self, o: &mut Overrides) {
        let floats = [
            ("c_lo", self.c_lo),
            ("c_hi", self.c_hi),
            ("u0", self.u0),
            ("x_inf", self.x_inf),
            ("ratio", self.ratio),
            ("delta", self.delta),
            ("t_max", self.t_max),
            ("x_stop", self.x_stop),
        ];
        for (key, v) in floats {
            if let Some(v) = v {
                o.set("scenario", key, v);
            }
        }
        if let Some(n) = self.n_pairs {
            o.set("scenario", "n_pairs", int(n));
        }
        if let Some(n) = self.max_events {
            o.set("scenario", "max_events", int(n));
        }
    }
}

fn plan_from(sub: Sub) -> (Command, Option<PathBuf>, Overrides) {
    let mut o = Overrides::default();
    let (command, config) = match sub {
        Sub::CheckModel { common, samples } => {
            if let Some(n) = samples {
                o.set("numerics", "samples", int(n));
            }
            (Command::CheckModel, common.into_overrides(&mut o))
        }
        Sub::Riemann { common, data } => {
            data.apply(&mut o);
            (Command::Riemann, common.into_overrides(&mut o))
        }
        Sub::Simulate { common, scenario, fields_nt, fields_nx } => {
            scenario.apply(&mut o);
            if let Some(n) = fields_nt {
                o.set("output", "fields_nt", int(n));
            }
            if let Some(n) = fields_nx {
                o.set("output", "fields_nx", int(n));
            }
            (Command::Simulate, common.into_overrides(&mut o))
        }
        Sub::Temple { common, grid } => {
            if let Some(n) = grid {
                o.set("numerics", "temple_grid", int(n));
            }
            (Command::Temple, common.into_overrides(&mut o))
        }
        Sub::Blowup { common, scenario, n_list } => {
            scenario.apply(&mut o);
            if let Some(list) = n_list {
                o.set("scenario", "n_list", toml::Value::Array(list.into_iter().map(int).collect()));
            }
            (Command::Blowup, common.into_overrides(&mut o))
        }
        Sub::CompareFv { common, data, dt, x_slice, t_range, cfl, delta, t_max, max_events } => {
            data.apply(&mut o);
            for (key, v) in [("dt", dt), ("x_slice", x_slice), ("cfl", cfl)] {
                if let Some(v) = v {
                    o.set("fv", key, v);
                }
            }
            if let Some(r) = t_range {
                o.set("fv", "t_range", toml::Value::Array(r.into_iter().map(toml::Value::Float).collect()));
            }
            for (key, v) in [("delta", delta), ("t_max", t_max)] {
                if let Some(v) = v {
                    o.set("scenario", key, v);
                }
            }
            if let Some(n) = max_events {
                o.set("scenario", "max_events", int(n));
            }
            (Command::CompareFv, common.into_overrides(&mut o))
        }
    };
    (command, config, o)
}

fn run(cli: Cli) -> Result<String, CliError> {
    let (command, config, overrides) = plan_from(cli.command);
    let plan = parse_config(command, config.as_deref(), &overrides)?;
    Ok(execute(&plan)?.json)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(json) => {
            let mut out = std::io::stdout().lock();
            if out.write_all(json.as_bytes()).and_then(|_| out.flush()).is_err() {
                return ExitCode::from(3);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("wavefront-psa: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
