use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

/// Construct, verify, bound and simulate placement delivery arrays.
#[derive(Parser, Debug)]
#[command(name = "pda-workbench", version)]
struct Cli {
    #[command(flatten)]
    config: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Seed for packet payloads and sampled demands.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Node budget for exact searches.
    #[arg(long, global = true, default_value_t = 100_000_000)]
    pub node_budget: u64,
    /// Output format (each command has its own default).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads; 0 or unset uses every core.
    #[arg(long, global = true, env = "PDA_THREADS")]
    pub threads: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Partition,
    Bipartite,
    Mn,
    Grouping,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchModeArg {
    Canonical,
    Exhaustive,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FillMethod {
    Exact,
    Greedy,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FillOrder {
    RowMajor,
    DegreeDesc,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a PDA from one of the built-in families.
    Construct {
        #[arg(value_enum)]
        family: Family,
        #[arg(long)]
        q: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        a: Option<usize>,
        #[arg(long)]
        b: Option<usize>,
        #[arg(long)]
        h: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        t: Option<usize>,
        /// Write the PDA here instead of stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Check a PDA file against the axioms.
    Verify {
        /// PDA file; stdin when omitted or `-`.
        input: Option<PathBuf>,
    },
    /// Lower-bound the number of signals for a placement.
    Bound {
        /// PDA or placement file; stdin when omitted or `-`.
        input: Option<PathBuf>,
        /// exact, greedy, brute, or ordered:<partition|bipartite|grouping>.
        #[arg(long, default_value = "exact")]
        method: String,
        /// Evaluate this comma-separated user ordering instead.
        #[arg(long, conflicts_with = "method")]
        order: Option<String>,
        /// Largest K handled exactly.
        #[arg(long, default_value_t = 20)]
        max_users: usize,
    },
    /// Minimise the exact bound over all placements with given (K, F, Z).
    Search {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        f: usize,
        #[arg(long)]
        z: usize,
        #[arg(long, value_enum, default_value = "canonical")]
        mode: SearchModeArg,
        /// Maximum number of placements enumerated.
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
        /// Write the witness placement here.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Run placement, delivery and decoding on random payloads.
    Simulate {
        input: Option<PathBuf>,
        /// Library size N (defaults to K).
        #[arg(long)]
        files: Option<usize>,
        /// Comma-separated 1-based demand vector.
        #[arg(long, conflicts_with_all = ["sweep", "sample"])]
        demand: Option<String>,
        /// Try all N^K demand vectors.
        #[arg(long, conflicts_with = "sample")]
        sweep: bool,
        /// Try this many seeded random demand vectors.
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long, default_value_t = pda_workbench::sim::DEFAULT_PACKET_LEN)]
        packet_len: usize,
        /// Write the JSON transcript of the (single) demand here.
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
    /// Assign symbols to a placement.
    Fill {
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "exact")]
        method: FillMethod,
        /// Vertex order for the greedy method.
        #[arg(long, value_enum, default_value = "degree-desc")]
        order: FillOrder,
        /// Colouring nodes explored by the exact method.
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Partition-family ratio table as CSV.
    Table {
        #[arg(long, default_value = "partition")]
        family: String,
        #[arg(long, default_value = "2,3,4,5", value_delimiter = ',')]
        q_list: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        m_min: usize,
        #[arg(long, default_value_t = 5)]
        m_max: usize,
        /// Run the exact engine when (m+1)q is at most this.
        #[arg(long, default_value_t = 12)]
        exact_cap: usize,
    },
    /// Check the closed forms against direct enumeration.
    Formulas,
}

/// How a command failed; maps onto the exit code.
#[derive(Debug)]
pub enum Failure {
    /// Verification or bound failure: exit 1.
    Check(String),
    /// Bad arguments or parameters: exit 2.
    Usage(String),
    /// A search ran out of budget: exit 3. The partial result was printed.
    Budget,
}

impl From<pda_workbench::Error> for Failure {
    fn from(e: pda_workbench::Error) -> Self {
        use pda_workbench::Error as E;
        match e {
            E::InvalidParams(_) | E::InvalidOrdering(_) | E::Overflow(_) => Failure::Usage(e.to_string()),
            _ => Failure::Check(e.to_string()),
        }
    }
}

pub fn read_input(path: Option<&Path>) -> Result<String, Failure> {
    match path {
        None => read_stdin(),
        Some(p) if p == Path::new("-") => read_stdin(),
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", p.display()))),
    }
}

fn read_stdin() -> Result<String, Failure> {
    let mut s = String::new();
    std::io::stdin()
        .read_to_string(&mut s)
        .map_err(|e| Failure::Usage(format!("cannot read stdin: {e}")))?;
    Ok(s)
}

pub fn write_file(path: &Path, content: &str) -> Result<(), Failure> {
    std::fs::write(path, content)
        .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.config.threads.filter(|&n| n > 0) {
        // Only fails if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let mut out = String::new();
    let result = commands::run(&cli.config, cli.command, &mut out);
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(out.as_bytes());
    let _ = stdout.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Budget) => {
            eprintln!("error: budget exhausted; the result above is not exact");
            ExitCode::from(3)
        }
    }
}
