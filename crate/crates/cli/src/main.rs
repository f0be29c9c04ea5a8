//! `chsh-zn`: command-line access to the games, strategies, certificates and checks.
//!
//! Every command prints a JSON report on stdout. Exit status is 0 when all
//! checks in the report pass, 1 when one fails or the command cannot finish,
//! and 2 on a usage error.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use commands::{BcsSystem, Certificate, CliError, ValueRoute};

#[derive(Debug, Parser)]
#[command(name = "chsh-zn", version, about = "Generalized CHSH games over Z_n")]
struct Cli {
    /// Seed for the randomized checks.
    #[arg(long, global = true, env = "CHSH_ZN_SEED", default_value_t = 0)]
    seed: u64,
    /// Print compact instead of indented JSON.
    #[arg(long, global = true)]
    compact: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Nonlocal game models.
    #[command(subcommand)]
    Game(GameCmd),
    /// The canonical strategies S_n.
    #[command(subcommand)]
    Strategy(StrategyCmd),
    /// Bias operators of the canonical strategies.
    #[command(subcommand)]
    Bias(BiasCmd),
    /// The groups generated by the canonical observables.
    #[command(subcommand)]
    Group(GroupCmd),
    /// Sum-of-squares certificates.
    #[command(subcommand)]
    Sos(SosCmd),
    /// State-dependent relations of optimal strategies.
    #[command(subcommand)]
    Relations(RelationsCmd),
    /// Binary constraint systems.
    #[command(subcommand)]
    Bcs(BcsCmd),
    /// NPA moment problems.
    #[command(subcommand)]
    Npa(NpaCmd),
    /// Psi-representations induced by the canonical strategies.
    #[command(subcommand)]
    Psirep(PsirepCmd),
}

#[derive(Debug, Subcommand)]
enum GameCmd {
    /// Exact classical value of the mod-n game by exhaustive search.
    Classical {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 0)]
        m1: u32,
        #[arg(long, default_value_t = 1)]
        m2: u32,
        /// Largest number of deterministic strategy pairs to try.
        #[arg(long, default_value_t = chsh_zn::game::DEFAULT_BUDGET)]
        budget: u64,
    },
}

#[derive(Debug, Args)]
struct Range {
    #[arg(long, default_value_t = 2)]
    n_min: u32,
    #[arg(long, default_value_t = 40)]
    n_max: u32,
    /// Write the table as CSV here instead of embedding it in the report.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum StrategyCmd {
    /// Winning probability of S_n in G_n.
    Value {
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value_t = ValueRoute::Direct)]
        via: ValueRoute,
    },
    /// Table of (n, value, entropy ratio).
    Entropy(Range),
}

#[derive(Debug, Subcommand)]
enum BiasCmd {
    /// Top of the spectrum of B_n on the canonical observables.
    Spectrum {
        #[arg(long)]
        n: u32,
    },
    /// Table of top eigenvalues and predicted values.
    Table(Range),
}

#[derive(Debug, Subcommand)]
enum GroupCmd {
    /// Enumerate <A0, A1> and <B0, B1> exactly.
    Enumerate {
        #[arg(long)]
        n: u32,
        /// Write the multiplication table as CSV.
        #[arg(long)]
        table_out: Option<PathBuf>,
        /// Include every element in the report.
        #[arg(long)]
        elements: bool,
    },
    /// Enumerate the normal-form words and check they are distinct.
    NormalForm {
        #[arg(long)]
        n: u32,
    },
}

#[derive(Debug, Subcommand)]
enum SosCmd {
    /// Check a certificate on seeded random observables.
    Verify {
        #[arg(long, value_enum)]
        cert: Certificate,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
}

#[derive(Debug, Subcommand)]
enum RelationsCmd {
    /// Evaluate every derived relation on S_n and on a random strategy.
    Check {
        #[arg(long, default_value_t = 3)]
        n: u32,
    },
}

#[derive(Debug, Args)]
struct BcsFlags {
    /// Verify the operator solutions and the strategies they induce (default).
    #[arg(long)]
    check: bool,
    /// Compute the quantities separating the two glued solutions.
    #[arg(long)]
    witness: bool,
    /// Write the constraint system in text form.
    #[arg(long)]
    system_out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum BcsCmd {
    /// The 3x3 magic square.
    MagicSquare(BcsFlags),
    /// Two magic squares sharing one six-variable constraint.
    Glued(BcsFlags),
}

#[derive(Debug, Subcommand)]
enum NpaCmd {
    /// Build the moment problem and write it in sparse SDPA format.
    Export {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 0)]
        m1: u32,
        #[arg(long, default_value_t = 1)]
        m2: u32,
        #[arg(long, default_value_t = 1)]
        level: u32,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
enum PsirepCmd {
    /// Check f_A and f_B on every pair of group elements.
    Check {
        #[arg(long)]
        n: u32,
    },
}

fn run(cli: &Cli) -> Result<report::RunReport, CliError> {
    let seed = cli.seed;
    match &cli.command {
        Command::Game(GameCmd::Classical { n, m1, m2, budget }) => commands::game_classical(*n, *m1, *m2, *budget),
        Command::Strategy(StrategyCmd::Value { n, via }) => commands::strategy_value(*n, *via),
        Command::Strategy(StrategyCmd::Entropy(r)) => commands::strategy_entropy(r.n_min, r.n_max, r.out.as_deref()),
        Command::Bias(BiasCmd::Spectrum { n }) => commands::bias_spectrum_cmd(*n),
        Command::Bias(BiasCmd::Table(r)) => commands::bias_table(r.n_min, r.n_max, r.out.as_deref()),
        Command::Group(GroupCmd::Enumerate { n, table_out, elements }) => {
            commands::group_enumerate(*n, table_out.as_deref(), *elements)
        }
        Command::Group(GroupCmd::NormalForm { n }) => commands::group_normal_form(*n),
        Command::Sos(SosCmd::Verify { cert, trials }) => commands::sos_verify(*cert, *trials, seed),
        Command::Relations(RelationsCmd::Check { n }) => commands::relations_check(*n, seed),
        Command::Bcs(BcsCmd::MagicSquare(f)) => {
            commands::bcs(BcsSystem::MagicSquare, f.check, f.witness, f.system_out.as_deref())
        }
        Command::Bcs(BcsCmd::Glued(f)) => commands::bcs(BcsSystem::Glued, f.check, f.witness, f.system_out.as_deref()),
        Command::Npa(NpaCmd::Export { n, m1, m2, level, out }) => commands::npa_export(*n, *m1, *m2, *level, out),
        Command::Psirep(PsirepCmd::Check { n }) => commands::psirep_check(*n),
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on unknown commands and bad flags.
    let cli = Cli::parse();
    let start = Instant::now();
    match run(&cli) {
        Ok(mut report) => {
            report.wall_time = start.elapsed().as_secs_f64();
            let text = if cli.compact {
                serde_json::to_string(&report)
            } else {
                serde_json::to_string_pretty(&report)
            };
            println!("{}", text.expect("reports serialize"));
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(e @ CliError::Run(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
