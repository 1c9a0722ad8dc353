//! Command-line front end: parse and evaluate terms under any effect,
//! run the abstract machine, compile open terms to S/K form, and drive
//! the law suites.
//!
//! Exit codes: 0 success (checks: all verdicts exact), 1 check failure,
//! 2 fuel exhausted, 3 parse error, 4 stuck term or configuration
//! error, 5 checks passed with probe-sampled verdicts.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;

#[derive(Parser)]
#[command(name = "mca", version, about = "effectful combinatory algebras with law checkers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug, Default)]
struct ConfigArgs {
    /// Configuration file (key/value format; see the README)
    #[arg(long)]
    config: Option<String>,
    /// Effect backend: partial | power | state | cps | reader
    #[arg(long)]
    effect: Option<String>,
    /// Modality: partial | inf-only | power-angelic | power-demonic |
    /// power-inf-only | state-angelic | state-demonic | cps | reader
    #[arg(long)]
    modality: Option<String>,
    /// Application budget per evaluation
    #[arg(long)]
    fuel: Option<u64>,
    /// Initial state for the state effect
    #[arg(long)]
    state0: Option<u64>,
    /// Probe states: `0..8` or a space-separated list
    #[arg(long)]
    probes: Option<String>,
    /// Pole entries, comma-separated: `token NAME`, `code TERM`, `all-codes`
    #[arg(long)]
    pole: Option<String>,
    /// Parameter tables, semicolon-separated `name{TERM:1,default:0}` items
    #[arg(long)]
    params: Option<String>,
    /// Separator: all | pure | pl | pure+PRIM+..
    #[arg(long)]
    separator: Option<String>,
    /// Seed for sample generation
    #[arg(long)]
    seed: Option<u64>,
    /// Map fuel exhaustion to the empty computation (partial/power only)
    #[arg(long)]
    timeout_as_bottom: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a closed term under the configured effect
    Eval {
        #[command(flatten)]
        cfg: ConfigArgs,
        term: String,
    },
    /// Run the eval/apply stack machine on a closed term
    Machine {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Print every machine state instead of just the final code
        #[arg(long)]
        trace: bool,
        term: String,
    },
    /// Bracket-abstract an open term with n+1 free levels into S/K form
    Compile {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// The abstraction degree n: the term may use levels 0..=n
        n: u32,
        term: String,
    },
    /// Run a law suite and report verdicts
    Check {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// mca | sk | heyting | modality | frame | consistency | tripos | assembly
        suite: String,
        /// Instances per law (suite-specific default otherwise)
        #[arg(long)]
        budget: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    // evaluation nests in proportion to the budget; give it room
    let code = mca::with_deep_stack(move || match cli.command {
        Command::Eval { cfg, term } => commands::cmd_eval(&cfg, &term),
        Command::Machine { cfg, trace, term } => commands::cmd_machine(&cfg, trace, &term),
        Command::Compile { cfg, n, term } => commands::cmd_compile(&cfg, n, &term),
        Command::Check { cfg, suite, budget } => commands::cmd_check(&cfg, &suite, budget),
    });
    ExitCode::from(code)
}
