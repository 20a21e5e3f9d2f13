//! `elastica-mkdv`: deterministic command-line front end.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use elastica_mkdv::flow::{RhsMode, Scheme};

use config::{Format, RunConfig, TolOverrides};
use error::CliError;
use output::Output;

#[derive(Parser, Debug)]
#[command(name = "elastica-mkdv", version, about = "Plane loops, curvature flows and series identities")]
struct Cli {
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (default `out`).
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    /// Output formats to emit, comma separated (default: all).
    #[arg(long, global = true, value_delimiter = ',')]
    format: Option<Vec<Format>>,
    /// Seed for randomized checks.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build K_1..K_n with commutator checks.
    Hierarchy {
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Integrate a hierarchy flow on a loop.
    Simulate(SimulateArgs),
    /// Energy, winding, closure and projective identities of a loop.
    Invariants(LoopArgs),
    /// Faber polynomials, Grunsky matrix and Schwarzian check.
    Faber(FaberArgs),
    /// Isometry residuals of deformation fields on a loop.
    DeformCheck {
        #[command(flatten)]
        lp: LoopArgs,
        /// Number of extra random isometric fields to check.
        #[arg(long)]
        random_fields: Option<usize>,
        #[arg(long)]
        residual_tol: Option<f64>,
    },
    /// Periodic elastica curvature by Newton iteration from a guess.
    Elastica {
        #[command(flatten)]
        lp: LoopArgs,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<f64>,
        #[arg(long)]
        residual_tol: Option<f64>,
    },
    /// Inverse-function bridge between a loop chart and its Laurent chart.
    Bridge {
        #[command(flatten)]
        lp: LoopArgs,
        /// Rational Taylor coefficients a_1, a_2, … of Z(s)/Z'(0).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        a: Option<Vec<String>>,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        truncated: bool,
        /// Check the Miura bridge to KdV instead.
        #[arg(long)]
        kdv: bool,
        #[arg(long)]
        residual_tol: Option<f64>,
    },
}

#[derive(Args, Debug)]
struct LoopArgs {
    /// Loop spec JSON.
    #[arg(long, short)]
    input: Option<PathBuf>,
    /// Grid size.
    #[arg(short = 'N', long = "grid")]
    grid: Option<usize>,
    #[arg(long)]
    tol_unit: Option<f64>,
    #[arg(long)]
    tol_mean: Option<f64>,
    #[arg(long)]
    tol_wind: Option<f64>,
    #[arg(long)]
    tol_identity: Option<f64>,
    #[arg(long)]
    k_floor: Option<f64>,
    #[arg(long)]
    closure_tol: Option<f64>,
}

impl LoopArgs {
    fn apply(self, cfg: &mut RunConfig) {
        cfg.input = self.input;
        cfg.grid = self.grid;
        cfg.closure_tol = self.closure_tol;
        cfg.tolerances = TolOverrides {
            unit: self.tol_unit,
            mean: self.tol_mean,
            wind: self.tol_wind,
            identity: self.tol_identity,
            k_floor: self.k_floor,
        };
    }
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    lp: LoopArgs,
    /// Flow index n (1 is the parameter shift, 2 is mKdV).
    #[arg(short = 'n', long = "flow")]
    n: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    /// Final time.
    #[arg(short = 'T', long = "t-end")]
    t_end: Option<f64>,
    #[arg(long, value_parser = parse_mode)]
    mode: Option<RhsMode>,
    #[arg(long, value_parser = parse_scheme)]
    scheme: Option<Scheme>,
    #[arg(long)]
    record_every: Option<usize>,
    /// Co-evolve the loop itself, not only its curvature.
    #[arg(long)]
    immersion: bool,
    /// Run one simulation per time step, in parallel.
    #[arg(long, value_delimiter = ',')]
    sweep_dt: Option<Vec<f64>>,
    #[arg(long)]
    energy_tol: Option<f64>,
    #[arg(long)]
    mean_drift_tol: Option<f64>,
}

#[derive(Args, Debug)]
struct FaberArgs {
    /// `{"a": [...], "order": N}` file.
    #[arg(long, short)]
    input: Option<PathBuf>,
    /// Coefficients a_1, a_2, … as rationals.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    a: Option<Vec<String>>,
    /// Highest Faber polynomial and Schwarzian check order.
    #[arg(long, short = 'N')]
    order: Option<usize>,
    /// Grunsky matrix size (default: order).
    #[arg(long, short = 'M')]
    grunsky_order: Option<usize>,
    /// Treat the list as a truncated series rather than a finite chart.
    #[arg(long)]
    truncated: bool,
    /// Emit P_n with symbolic coefficients a_k.
    #[arg(long)]
    symbolic: bool,
}

fn parse_enum<T: serde::de::DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_owned())).map_err(|e| e.to_string())
}

fn parse_mode(s: &str) -> Result<RhsMode, String> {
    parse_enum(s)
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    parse_enum(s)
}

fn flag(b: bool) -> Option<bool> {
    b.then_some(true)
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Hierarchy { .. } => "hierarchy",
            Command::Simulate(_) => "simulate",
            Command::Invariants(_) => "invariants",
            Command::Faber(_) => "faber",
            Command::DeformCheck { .. } => "deform-check",
            Command::Elastica { .. } => "elastica",
            Command::Bridge { .. } => "bridge",
        }
    }

    fn into_flags(self) -> RunConfig {
        let mut c = RunConfig::default();
        match self {
            Command::Hierarchy { n_max } => c.n_max = n_max,
            Command::Simulate(s) => {
                s.lp.apply(&mut c);
                c.n = s.n;
                c.dt = s.dt;
                c.t_end = s.t_end;
                c.mode = s.mode;
                c.scheme = s.scheme;
                c.record_every = s.record_every;
                c.immersion = flag(s.immersion);
                c.sweep_dt = s.sweep_dt;
                c.energy_tol = s.energy_tol;
                c.mean_drift_tol = s.mean_drift_tol;
            }
            Command::Invariants(lp) => lp.apply(&mut c),
            Command::Faber(f) => {
                c.input = f.input;
                c.a = f.a;
                c.order = f.order;
                c.grunsky_order = f.grunsky_order;
                c.truncated = flag(f.truncated);
                c.symbolic = flag(f.symbolic);
            }
            Command::DeformCheck {
                lp,
                random_fields,
                residual_tol,
            } => {
                lp.apply(&mut c);
                c.random_fields = random_fields;
                c.residual_tol = residual_tol;
            }
            Command::Elastica {
                lp,
                lambda,
                mu,
                residual_tol,
            } => {
                lp.apply(&mut c);
                c.lambda = lambda;
                c.mu = mu;
                c.residual_tol = residual_tol;
            }
            Command::Bridge {
                lp,
                a,
                order,
                truncated,
                kdv,
                residual_tol,
            } => {
                lp.apply(&mut c);
                c.a = a;
                c.order = order;
                c.truncated = flag(truncated);
                c.kdv = flag(kdv);
                c.residual_tol = residual_tol;
            }
        }
        c
    }
}

fn run(cli: Cli) -> Result<serde_json::Value, CliError> {
    let base = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let name = cli.command.name();
    let mut flags = cli.command.into_flags();
    flags.out = cli.out;
    flags.formats = cli.format;
    flags.seed = cli.seed;
    let cfg = base.overridden_by(flags);

    let out = Output::create(&cfg.out_dir())?;
    out.manifest(name, &cfg)?;
    match name {
        "hierarchy" => commands::hierarchy(&cfg, &out),
        "simulate" => commands::simulate(&cfg, &out),
        "invariants" => commands::invariants(&cfg, &out),
        "faber" => commands::faber(&cfg, &out),
        "deform-check" => commands::deform_check(&cfg, &out),
        "elastica" => commands::elastica(&cfg, &out),
        _ => commands::bridge(&cfg, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(report) => {
            print!("{}", elastica_mkdv::io::to_json_string(&report));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
