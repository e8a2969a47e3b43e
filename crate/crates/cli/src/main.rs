//! `polymat`: command-line front end.
//!
//! Exit codes: 0 on success or a true answer, 1 when the answer is
//! mathematically negative (invalid input polymatroid, MMRV violation,
//! non-realization, unqualified set, failed reproduction), 2 on usage or
//! load errors.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "polymat", version, about = "Polymatroid and matroid workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Args, Clone, Debug)]
pub struct Common {
    /// Input file (`-` for stdin)
    #[arg(long = "in", value_name = "FILE")]
    pub input: PathBuf,
    /// Write the result here instead of stdout
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Comparison tolerance for float-mode ranks
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
}

#[derive(Subcommand)]
pub enum Command {
    /// Check monotonicity and submodularity; exit 1 on any violation
    Validate(Common),
    /// Dual polymatroid
    Dual(Common),
    /// Tight part: remove every element's private information
    Tighten(Common),
    /// Entropy vector (bits) of a joint distribution file
    Entropy(Common),
    /// Left-hand side of the MMRV inequality; exit 1 if negative
    Mmrv {
        #[command(flatten)]
        common: Common,
        /// Five labels playing the roles a,b,c,d,e (default: the ground set in order)
        #[arg(long)]
        roles: Option<String>,
    },
    /// Split an element into two of ranks ALPHA1 + ALPHA2 = rank(element)
    Split {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        element: String,
        /// ALPHA1,ALPHA2
        #[arg(long)]
        alphas: String,
        /// Labels of the two parts (default: <element>1,<element>2)
        #[arg(long)]
        labels: Option<String>,
    },
    /// Principal extension of an element by a new element
    Extend {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        element: String,
        #[arg(long)]
        alpha: String,
        /// Label of the new element (default: <element>')
        #[arg(long)]
        label: Option<String>,
    },
    /// Helgason expansion of an integer polymatroid into a matroid
    Expand {
        #[command(flatten)]
        common: Common,
        /// Work with the dual of the expansion
        #[arg(long)]
        dual: bool,
        /// Rank of a selection such as "a:12,b:3" or "a_1,b_2"
        #[arg(long)]
        rank: Option<String>,
        /// MMRV on block unions with these roles; exit 1 if negative
        #[arg(long)]
        roles: Option<String>,
        /// Emit the expansion as a dense rank file (at most 20 elements)
        #[arg(long)]
        dense: bool,
    },
    /// Circuits of a matroid, or its circuit-connectivity classes
    Circuits {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        classes: bool,
    },
    /// Matroid port at a secret element
    Port {
        #[command(flatten)]
        common: Common,
        /// Secret element (a base label, or an expanded element like a_1 with --expanded)
        #[arg(long)]
        secret: String,
        /// Use the Helgason expansion of the input instead of the input itself
        #[arg(long)]
        expanded: bool,
        /// With --expanded: use the dual expansion
        #[arg(long)]
        dual: bool,
        /// Membership query; exit 1 if the set is not qualified
        #[arg(long)]
        query: Option<String>,
    },
    /// Dual of an access structure file
    AccessDual(Common),
    /// Whether a polymatroid realizes an access structure; exit 1 if not
    Realizes {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        secret: String,
        #[arg(long, value_name = "FILE")]
        access: PathBuf,
    },
    /// Largest share-to-secret ratio; with --access also checks important participants
    Sigma {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        secret: String,
        #[arg(long, value_name = "FILE")]
        access: Option<PathBuf>,
    },
    /// Re-derive the five-variable counterexample from the bundled fixtures
    Reproduce {
        /// Run a single step (1-10)
        #[arg(long)]
        step: Option<u8>,
        /// Read fixtures from this directory instead of the bundled copies
        #[arg(long, value_name = "DIR")]
        data: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(commands::error_code(&e))
        }
    }
}
