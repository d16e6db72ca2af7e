use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use spinsat::analysis::{BackboneKind, EnergyKind};
use spinsat::anneal::FlipMode;
use spinsat::ising::GadgetMode;
use spinsat::pipeline::{self, BatchOutcome, GenOptions, RunConfig};

#[derive(Parser)]
#[command(
    name = "spinsat",
    version,
    about = "SAT to Ising compilation, annealing and structural analysis"
)]
struct Cli {
    /// TOML config, or a manifest.json from an earlier run. Flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write node/edge coefficient tables for each formula.
    Compile(Common),
    /// Decide satisfiability and print a model.
    Solve(Common),
    /// Enumerate models and report backbones.
    Backbone(Common),
    /// Anneal each formula and write its trajectory.
    Anneal(Common),
    /// Full batch: logic analysis, compilation, annealing and summaries.
    Run(Common),
    /// Aggregate statistics and correlations from a summary CSV.
    Report {
        summary: PathBuf,
        #[arg(long, env = "SPINSAT_OUT_DIR", default_value = ".")]
        out_dir: PathBuf,
        #[arg(long, value_enum, default_value_t = EnergyArg::Logic)]
        energy: EnergyArg,
        #[arg(long, value_enum, default_value_t = BackboneArg::Capped)]
        backbone: BackboneArg,
    },
    /// Generate random 3-SAT instances.
    Gen {
        #[arg(short = 'n', long, default_value_t = 20)]
        vars: usize,
        #[arg(short = 'm', long, default_value_t = 91)]
        clauses: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Redraw until the formula is satisfiable.
        #[arg(long)]
        satisfiable: bool,
        #[arg(long, default_value = "rand3sat-")]
        prefix: String,
        #[arg(long, env = "SPINSAT_OUT_DIR", default_value = ".")]
        out_dir: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum EnergyArg {
    Logic,
    Hamiltonian,
}

impl From<EnergyArg> for EnergyKind {
    fn from(e: EnergyArg) -> Self {
        match e {
            EnergyArg::Logic => EnergyKind::Logic,
            EnergyArg::Hamiltonian => EnergyKind::Hamiltonian,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BackboneArg {
    Capped,
    Exact,
}

impl From<BackboneArg> for BackboneKind {
    fn from(b: BackboneArg) -> Self {
        match b {
            BackboneArg::Capped => BackboneKind::Capped,
            BackboneArg::Exact => BackboneKind::Exact,
        }
    }
}

#[derive(Args)]
struct Common {
    /// DIMACS files or directories of *.cnf files.
    inputs: Vec<PathBuf>,
    #[arg(long, env = "SPINSAT_OUT_DIR")]
    out_dir: Option<PathBuf>,
    /// Base seed; each file gets base + hash(file name).
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    t0: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    /// One flip attempt per spin per step instead of one per step.
    #[arg(long)]
    sweeps: bool,
    /// Penalty factor for the cubic gadget.
    #[arg(long)]
    k_factor: Option<f64>,
    /// Model enumeration cap.
    #[arg(long)]
    cap: Option<usize>,
    /// Use the gadget exactly as published (not ground-state exact).
    #[arg(long)]
    paper_literal_gadget: bool,
    /// Accept a clause count that disagrees with the header.
    #[arg(long)]
    lenient: bool,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    bins: Option<usize>,
    /// Temperature window for the power-law fit, as LO,HI.
    #[arg(long, value_parser = parse_window)]
    beta_window: Option<(f64, f64)>,
    #[arg(long, value_enum)]
    energy: Option<EnergyArg>,
    #[arg(long, value_enum)]
    backbone: Option<BackboneArg>,
}

fn parse_window(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected LO,HI")?;
    let lo: f64 = a.trim().parse().map_err(|_| format!("bad number `{a}`"))?;
    let hi: f64 = b.trim().parse().map_err(|_| format!("bad number `{b}`"))?;
    Ok((lo, hi))
}

impl Common {
    fn apply(self, mut cfg: RunConfig) -> RunConfig {
        if !self.inputs.is_empty() {
            cfg.inputs = self.inputs;
        }
        if let Some(v) = self.out_dir {
            cfg.out_dir = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.t0 {
            cfg.t0 = v;
        }
        if let Some(v) = self.alpha {
            cfg.alpha = v;
        }
        if let Some(v) = self.steps {
            cfg.steps = v;
        }
        if self.sweeps {
            cfg.flips = FlipMode::Sweep;
        }
        if let Some(v) = self.k_factor {
            cfg.k_factor = v;
        }
        if let Some(v) = self.cap {
            cfg.cap = v;
        }
        if self.paper_literal_gadget {
            cfg.gadget = GadgetMode::PaperLiteral;
        }
        cfg.lenient |= self.lenient;
        if let Some(v) = self.jobs {
            cfg.jobs = v;
        }
        if let Some(v) = self.bins {
            cfg.bins = v;
        }
        if let Some(v) = self.beta_window {
            cfg.beta_window = v;
        }
        if let Some(v) = self.energy {
            cfg.energy = v.into();
        }
        if let Some(v) = self.backbone {
            cfg.backbone = v.into();
        }
        cfg
    }
}

fn finish(outcome: &BatchOutcome) -> ExitCode {
    for (name, err) in &outcome.failures {
        eprintln!("{name}: {err}");
    }
    if outcome.completed.is_empty() && outcome.failures.is_empty() {
        eprintln!("no input formulas");
    }
    if outcome.success() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn run(cli: Cli) -> spinsat::Result<ExitCode> {
    let base = match &cli.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    let code = match cli.command {
        Command::Compile(c) => finish(&pipeline::cmd_compile(&c.apply(base))?),
        Command::Solve(c) => {
            let (text, outcome) = pipeline::cmd_solve(&c.apply(base))?;
            print!("{text}");
            finish(&outcome)
        }
        Command::Backbone(c) => {
            let (text, outcome) = pipeline::cmd_backbone(&c.apply(base))?;
            print!("{text}");
            finish(&outcome)
        }
        Command::Anneal(c) => finish(&pipeline::cmd_anneal(&c.apply(base))?),
        Command::Run(c) => {
            let cfg = c.apply(base);
            let outcome = pipeline::cmd_run(&cfg)?;
            println!(
                "{} instances completed, {} failed; outputs in {}",
                outcome.completed.len(),
                outcome.failures.len(),
                cfg.out_dir.display()
            );
            finish(&outcome)
        }
        Command::Report {
            summary,
            out_dir,
            energy,
            backbone,
        } => {
            let report = pipeline::cmd_report(&summary, &out_dir, energy.into(), backbone.into())?;
            print!("{}", report.text);
            ExitCode::SUCCESS
        }
        Command::Gen {
            vars,
            clauses,
            seed,
            count,
            satisfiable,
            prefix,
            out_dir,
        } => {
            let files = pipeline::cmd_gen(&GenOptions {
                num_vars: vars,
                num_clauses: clauses,
                seed,
                count,
                satisfiable,
                prefix,
                out_dir,
            })?;
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
    };
    Ok(code)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
