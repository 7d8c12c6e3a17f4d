//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "namebench", version, about = "Exact checks for names of subsets of ω over the Cantor measure algebra")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// Seed for randomized cases.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Evaluation window.
    #[arg(long, global = true)]
    pub window: Option<u64>,
    /// Chain horizon T for the ap1 and splice suites.
    #[arg(long, global = true)]
    pub depth: Option<u32>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// json or tsv.
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// Profinite thread: zero, int:<m>, fact:<d1,d2,..> or res:<r1,r2,..>.
    #[arg(long, global = true)]
    pub thread: Option<String>,
    /// Key-value config file; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct NameArg {
    /// Inline name or JSON.
    #[arg(long, conflicts_with = "name_file", required_unless_present = "name_file")]
    pub name: Option<String>,
    /// File holding one name.
    #[arg(long)]
    pub name_file: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a verification suite, or `all`.
    Suite { id: String },
    /// Solovay measures of names.
    #[command(subcommand)]
    Solovay(SolovayCmd),
    /// Borel–Cantelli verdicts for independent families.
    #[command(subcommand)]
    Bc(BcCmd),
    /// Diagonalize a decreasing list of names.
    Ap1 {
        /// File with one name per line, or a JSON list.
        #[arg(long)]
        names: PathBuf,
    },
    /// Fullness, the sets C_n, and splicing.
    #[command(subcommand)]
    Canjar(CanjarCmd),
    /// Single evaluations with provenance.
    #[command(subcommand)]
    Eval(EvalCmd),
}

#[derive(Debug, Subcommand)]
pub enum SolovayCmd {
    /// Density of an analyzable name.
    Density {
        #[command(flatten)]
        name: NameArg,
    },
    /// lim_k λ(M(k) ∩ B) for a clopen B.
    TailLimit {
        #[command(flatten)]
        name: NameArg,
        #[arg(long)]
        clopen: String,
    },
    /// The 2^n sliding names M_s with |s| = n.
    Partition {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum BcCmd {
    /// Divergent or convergent, with a certificate table.
    Verdict {
        #[arg(long)]
        schedule: String,
        #[arg(long)]
        set: String,
    },
    /// λ of the join of fresh blocks over k ∈ X, n < k ≤ N.
    PrefixJoin {
        #[arg(long)]
        schedule: String,
        #[arg(long)]
        set: String,
        #[arg(long)]
        n: u64,
        #[arg(long = "N")]
        big_n: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum CanjarCmd {
    /// Is the join over X of M(k) full below p.
    Full {
        #[command(flatten)]
        name: NameArg,
        #[arg(long)]
        p: String,
        #[arg(long)]
        set: String,
    },
    /// Check membership in C_n up to N.
    Cn {
        #[command(flatten)]
        name: NameArg,
        #[arg(long)]
        p: String,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        set: String,
        #[arg(long = "N")]
        big_n: u64,
    },
    /// Splice names along a partition of ω into intervals.
    Splice {
        #[arg(long)]
        cuts: String,
        #[arg(long)]
        names: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum EvalCmd {
    /// lim_k λ(M(k) ∩ B).
    TailLimit {
        #[command(flatten)]
        name: NameArg,
        #[arg(long)]
        clopen: String,
    },
    /// Density of an analyzable name.
    Density {
        #[command(flatten)]
        name: NameArg,
    },
    /// ν(M) along the thread.
    Nu {
        #[command(flatten)]
        name: NameArg,
    },
    /// Borel–Cantelli verdict.
    Bc {
        #[arg(long)]
        schedule: String,
        #[arg(long)]
        set: String,
    },
    /// Fullness verdict with certificate.
    Full {
        #[command(flatten)]
        name: NameArg,
        #[arg(long)]
        p: String,
        #[arg(long)]
        set: String,
    },
}
