use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod input;
mod table;

/// Finite groups, tables of marks and equivariant networks.
#[derive(Debug, Parser)]
#[command(name = "eqv", version, about, long_about = None, after_help = EXIT_CODES)]
struct Cli {
    #[command(flatten)]
    caps: CapArgs,
    #[command(subcommand)]
    command: Command,
}

const EXIT_CODES: &str = "Exit codes: 0 ok, 1 failure (verify mismatch, other errors), 2 malformed input, \
3 group or lattice cap exceeded, 4 explicit product cap exceeded, 5 unfaithful class or input.";

#[derive(Debug, Args)]
struct CapArgs {
    /// Largest group order to enumerate
    #[arg(long, global = true, env = "EQV_ORDER_CAP", default_value_t = 10_080)]
    order_cap: usize,
    /// Largest group order for subgroup-lattice enumeration
    #[arg(long, global = true, env = "EQV_LATTICE_CAP", default_value_t = 2_000)]
    lattice_cap: usize,
    /// Largest point count of an explicit product G-set
    #[arg(long, global = true, env = "EQV_EXPLICIT_CAP", default_value_t = 10_000_000)]
    explicit_cap: usize,
}

impl CapArgs {
    fn caps(&self) -> eqv_core::Caps {
        eqv_core::Caps { order: self.order_cap, lattice: self.lattice_cap, explicit_points: self.explicit_cap }
    }
}

/// A group given as a JSON spec file or a builtin name.
#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct GroupArg {
    /// Group spec JSON: {"name": .., "degree": n, "generators": [[..], ..]}
    spec: Option<PathBuf>,
    /// Builtin group: cyclic:n, dihedral:n, symmetric:n or alternating:n
    #[arg(long)]
    builtin: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Order, orbits and properties of the defining action
    Group {
        #[command(flatten)]
        group: GroupArg,
        /// Print JSON instead of text
        #[arg(long)]
        json: bool,
    },
    /// Table of marks (JSON; pretty table when --out is given and there are at most 12 classes)
    Marks {
        #[command(flatten)]
        group: GroupArg,
        /// Write the JSON here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Orbit decomposition of a power of a coset space
    Decompose {
        #[command(flatten)]
        group: GroupArg,
        /// Conjugacy class of the stabilizer, by label or index
        #[arg(long)]
        subgroup_class: String,
        /// Diagonal power
        #[arg(long, default_value_t = 1)]
        power: usize,
        /// Also decompose the explicit product and require agreement
        #[arg(long)]
        explicit: bool,
        /// Report the smallest power with a regular orbit
        #[arg(long)]
        regular_order: bool,
    },
    /// Parameter-sharing pattern between two actions
    Pattern {
        #[command(flatten)]
        group: GroupArg,
        /// Input action: natural, trivial:n, regular, coset:<class>, power:<d>
        #[arg(long = "in", default_value = "natural")]
        input: String,
        /// Output action, same syntax as --in
        #[arg(long = "out-action", default_value = "natural")]
        output: String,
        /// Write the pattern JSON here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write a seeded random instance {matrix, bias} to this file
        #[arg(long)]
        instantiate: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check a weight matrix for equivariance
    Verify {
        /// JSON file holding {"matrix": [[..]], "bias": [..]} or a bare matrix
        matrix: PathBuf,
        #[command(flatten)]
        group: GroupArg,
        #[arg(long = "in", default_value = "natural")]
        input: String,
        #[arg(long = "out-action", default_value = "natural")]
        output: String,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Train a regular-hidden-layer equivariant net on a builtin target
    Fit(commands::FitArgs),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let caps = cli.caps.caps();
    let result = match cli.command {
        Command::Group { group, json } => commands::group(&group, &caps, json),
        Command::Marks { group, out } => commands::marks(&group, &caps, out.as_deref()),
        Command::Decompose { group, subgroup_class, power, explicit, regular_order } => {
            commands::decompose(&group, &caps, &subgroup_class, power, explicit, regular_order)
        }
        Command::Pattern { group, input, output, out, instantiate, seed } => {
            commands::pattern(&group, &caps, &input, &output, out.as_deref(), instantiate.as_deref(), seed)
        }
        Command::Verify { matrix, group, input, output, tol } => {
            commands::verify(&matrix, &group, &caps, &input, &output, tol)
        }
        Command::Fit(args) => commands::fit(&args, &caps),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(input::exit_code(&err))
        }
    }
}
