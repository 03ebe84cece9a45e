use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod io;

use commands::CliError;

#[derive(Parser, Debug)]
#[command(name = "unitdist", version, about = "Planar point sets with many unit distances from CM fields")]
struct Cli {
    /// Working precision in bits for certified enclosures.
    #[arg(long, global = true, env = "UDF_PRECISION_BITS", default_value_t = 256)]
    precision: u32,

    /// Keep wall-clock timings in the JSON output (otherwise they are zeroed).
    #[arg(long, global = true)]
    timings: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a point set and its report.
    Generate(GenerateArgs),
    /// Count unit distances in a CSV point set.
    Count(CountArgs),
    /// Exponent ledger for a prime set T and a split prime p.
    Exponent(ExponentArgs),
    /// Golod-Shafarevich bookkeeping for T and S.
    GsCheck(GsArgs),
    /// Primes splitting completely in the multiquadratic field of T.
    FindSplitPrimes(SplitArgs),
    /// Representations as a sum of two squares in a totally real field.
    R2(R2Args),
    /// The square-grid baseline.
    Grid(GridArgs),
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    /// Preset name (q, gaussian, qsqrt-5, qsqrt-23, qsqrt5, qi-sqrt5) or a field JSON file.
    #[arg(long)]
    pub field: String,
    /// Rational primes whose conjugate-free primes above feed the pigeonhole step.
    #[arg(long = "prime", value_delimiter = ',')]
    pub primes: Vec<u64>,
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    #[arg(long = "R", default_value = "2")]
    pub r: String,
    #[arg(long, default_value = "1")]
    pub scale: String,
    /// Explicit translate in basis coordinates, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub translate: Option<String>,
    /// Number of Halton translates to try besides 0.
    #[arg(long, default_value_t = 0)]
    pub translates: u32,
    /// Complex place used for the planar projection.
    #[arg(long, default_value_t = 0)]
    pub projection: usize,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long)]
    pub allow_small_r: bool,
    #[arg(long)]
    pub no_svg: bool,
    /// Principality search slack as a rational.
    #[arg(long)]
    pub slack: Option<String>,
    /// Unit enlargement steps in principality searches.
    #[arg(long)]
    pub depth: Option<u32>,
}

#[derive(Args, Debug)]
pub struct CountArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// hashed, brute, or exact (exact needs --field and coordinate columns).
    #[arg(long, default_value = "hashed")]
    pub method: String,
    #[arg(long, default_value_t = 1e-9)]
    pub eps: f64,
    #[arg(long)]
    pub field: Option<String>,
    /// Cross-check against brute force (on random subsets for large inputs).
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, default_value_t = 100)]
    pub oracle_subsets: usize,
    #[arg(long, default_value_t = 2000)]
    pub oracle_size: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct ExponentArgs {
    #[arg(long = "T", allow_hyphen_values = true)]
    pub t: String,
    #[arg(long)]
    pub p: u64,
}

#[derive(Args, Debug)]
pub struct GsArgs {
    #[arg(long = "T", allow_hyphen_values = true)]
    pub t: String,
    /// Finite primes of S; the infinite place is always included.
    #[arg(long = "S", default_value = "")]
    pub s: String,
    #[arg(long)]
    pub p_split: Option<u64>,
}

#[derive(Args, Debug)]
pub struct SplitArgs {
    #[arg(long = "T", allow_hyphen_values = true)]
    pub t: String,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long = "require-1-mod-4")]
    pub require_1_mod_4: bool,
    #[arg(long, default_value_t = unitdist_core::gscalc::DEFAULT_PRIME_CAP)]
    pub cap: u64,
}

#[derive(Args, Debug)]
pub struct R2Args {
    /// Basis coordinates of alpha, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: String,
    #[arg(long, default_value = "q")]
    pub field: String,
    /// Box bound for the search; derived from alpha when absent.
    #[arg(long)]
    pub bound: Option<String>,
}

#[derive(Args, Debug)]
pub struct GridArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = commands::Context { precision: cli.precision, timings: cli.timings };
    let res = ctx.check().and_then(|_| match &cli.command {
        Command::Generate(a) => commands::generate(&ctx, a),
        Command::Count(a) => commands::count(&ctx, a),
        Command::Exponent(a) => commands::exponent(&ctx, a),
        Command::GsCheck(a) => commands::gs_check(&ctx, a),
        Command::FindSplitPrimes(a) => commands::find_split_primes(&ctx, a),
        Command::R2(a) => commands::r2(&ctx, a),
        Command::Grid(a) => commands::grid(&ctx, a),
    });
    match res {
        Ok(out) => {
            println!("{}", serde_json::to_string_pretty(&out.json).expect("json"));
            for w in &out.failures {
                eprintln!("bound failed: {w}");
            }
            ExitCode::from(if out.failures.is_empty() { 0 } else { 1 })
        }
        Err(e) => {
            if let CliError::Reported(json, _) = &e {
                println!("{}", serde_json::to_string_pretty(json).expect("json"));
            }
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
