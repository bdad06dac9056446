//! `bidual`: command-line front end for the duality engines.
//!
//! Exit codes: 0 success, 1 counterexample found, 2 input or usage error,
//! 3 cap or timeout.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use bidual::caps::Caps;
use bidual::Error;

#[derive(Parser, Debug)]
#[command(name = "bidual", version, about = "Finite natural dualities over two-element templates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Report format; only JSON is a stable interface.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Cap overrides `name=value,...`, applied after DUALITY_CAPS.
    #[arg(long, global = true)]
    pub caps: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check ⋈ axioms on a bea, family or biconvexity document.
    CheckAxioms {
        #[arg(long = "in")]
        input: PathBuf,
        /// Comma-separated axioms (default: all that apply).
        #[arg(long, value_delimiter = ',')]
        axioms: Vec<String>,
    },
    /// Compute the dual of a structure or ⋈-oracle.
    Dual {
        #[arg(long = "in")]
        input: PathBuf,
        /// Catalog name, ultimate variant, or path to a structure document.
        #[arg(long)]
        template: String,
        /// Template for the dual side (default: the matching ultimate variant).
        #[arg(long)]
        e_template: Option<String>,
        /// Where to write the dual as a document.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that evaluation into the second dual is an isomorphism.
    Reflexivity {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        template: String,
        #[arg(long)]
        e_template: Option<String>,
    },
    /// Find a halfspace containing `a` and missing `b`.
    Separate {
        #[arg(long = "in")]
        input: PathBuf,
        /// Comma-separated element indices.
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
    },
    /// Run a verification suite over generated instances.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 4)]
        max_size: usize,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Generate a corpus as JSON lines with a metadata header.
    Gen {
        #[arg(long, value_enum)]
        class: GenClass,
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of random instances.
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Every labelled instance (posets, semilattices, lattices; size at
        /// most 4) or the minimal betweenness.
        #[arg(long)]
        exhaustive: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Priestley,
    Stone,
    Hms,
    Biconvex,
    Pasch,
    Betweenness,
    Ultimate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenClass {
    Poset,
    Semilattice,
    Dlattice,
    Family,
    Betweenness,
    Biconvexity,
}

/// What a command found, for the exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Counterexample,
    Capped,
}

fn exit_for_error(e: &Error) -> u8 {
    if e.is_cap() {
        3
    } else {
        2
    }
}

fn caps_from_env(cli: &Cli) -> Result<Caps, Error> {
    let mut caps = Caps::default();
    if let Ok(spec) = std::env::var("DUALITY_CAPS") {
        caps = caps.with_overrides(&spec)?;
    }
    if let Some(spec) = &cli.caps {
        caps = caps.with_overrides(spec)?;
    }
    Ok(caps)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = caps_from_env(&cli).and_then(|caps| commands::run(&cli, &caps));
    match result {
        Ok(report) => {
            if let Err(e) = output::emit(&cli, &report) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(match report.verdict {
                Verdict::Pass => 0,
                Verdict::Counterexample => 1,
                Verdict::Capped => 3,
            })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_for_error(&e))
        }
    }
}
