use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use molshape::UnitMode;
use molshape_cli::commands::read_file;
use molshape_cli::{
    cmd_minimize, cmd_modes, cmd_symmetry, cmd_verify_paper, InputError, RunOptions, RunReport, SpecInput,
};

/// Stationary points, point groups, strata and normal modes of model
/// nuclear potentials.
#[derive(Parser)]
#[command(name = "molshape", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Number of multistart searches.
    #[arg(long, global = true, default_value_t = 64)]
    starts: usize,
    /// Gradient-norm tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Override the unit system of the spec file.
    #[arg(long, global = true, value_enum)]
    units: Option<Units>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Multiply the elementary charge by this factor (SI negative control).
    #[arg(long, global = true)]
    perturb_constants: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Units {
    #[value(name = "SI", alias = "si")]
    Si,
    Reduced,
}

#[derive(Subcommand)]
enum Command {
    /// Catalog stationary points with point groups and strata.
    Minimize {
        /// Spec JSON file, or builtin:NAME.
        spec: String,
    },
    /// Normal modes at every minimum found.
    Modes {
        /// Spec JSON file, or builtin:NAME.
        spec: String,
    },
    /// Symmetry analysis of a centered configuration.
    Symmetry {
        /// Spec JSON file, or builtin:NAME.
        spec: String,
        /// Configuration JSON file.
        config: PathBuf,
    },
    /// Run the verification suite on built-in models.
    VerifyPaper {
        /// Run only these checks, by name or number.
        #[arg(long, value_delimiter = ',')]
        only: Option<Vec<String>>,
    },
}

fn run(cli: &Cli) -> Result<RunReport, InputError> {
    let c = &cli.common;
    let mut opts = RunOptions {
        seed: c.seed,
        starts: c.starts,
        tol: c.tol,
        units: c.units.map(|u| match u {
            Units::Si => UnitMode::Si,
            Units::Reduced => UnitMode::Reduced,
        }),
        only: None,
        perturb_constants: c.perturb_constants,
    };
    match &cli.command {
        Command::Minimize { spec } => cmd_minimize(&SpecInput::load(spec)?, &opts),
        Command::Modes { spec } => cmd_modes(&SpecInput::load(spec)?, &opts),
        Command::Symmetry { spec, config } => cmd_symmetry(&SpecInput::load(spec)?, &read_file(config)?, &opts),
        Command::VerifyPaper { only } => {
            opts.only = only.clone();
            cmd_verify_paper(&opts)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if report.command == "verify-paper" {
        for k in &report.checks {
            eprintln!("{} {}: {}", if k.pass { "PASS" } else { "FAIL" }, k.name, k.detail);
        }
    }
    let text = report.to_json();
    match &cli.common.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text + "\n") {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => println!("{text}"),
    }
    ExitCode::from(report.exit_code() as u8)
}
