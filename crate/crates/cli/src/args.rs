use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sigma2::decider::{DEFAULT_MAX_SIZE, DEFAULT_MAX_VARS};
use sigma2::ksf::{BinaryString, Real, StringVector};

#[derive(Parser, Debug)]
#[command(
    name = "sigma2",
    version,
    about = "Decide Σ₂ sentences about degree structures and explore the forcing kernel"
)]
pub struct Cli {
    /// Output format for verdicts on standard output.
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    pub format: Format,

    /// Not supported: every algorithm here is deterministic.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Human,
    #[value(alias = "structured")]
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide a sentence `E x̄. A ȳ. body`.
    Decide(DecideArgs),
    /// Parse a sentence and print its syntax tree.
    Parse { sentence: String },
    /// Finite upper semilattices.
    #[command(subcommand)]
    Usl(UslCommand),
    /// The forcing kernel.
    #[command(subcommand)]
    Ksf(KsfCommand),
}

#[derive(Args, Debug)]
pub struct DecideArgs {
    pub sentence: String,
    /// Bound on the number of variables.
    #[arg(long, env = "SIGMA2_MAX_VARS", default_value_t = DEFAULT_MAX_VARS as u64, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_vars: u64,
    /// Bound on carrier sizes.
    #[arg(long, env = "SIGMA2_MAX_SIZE", default_value_t = DEFAULT_MAX_SIZE as u64, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_size: u64,
    /// Degree structure named in the report; the verdict is the same for all three.
    #[arg(long, value_enum, default_value_t = Structure::Turing)]
    pub structure: Structure,
    /// Also write the structured report to this file.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Structure {
    Turing,
    Arithmetic,
    Hyperarithmetic,
}

impl Structure {
    pub fn name(self) -> &'static str {
        match self {
            Structure::Turing => "turing",
            Structure::Arithmetic => "arithmetic",
            Structure::Hyperarithmetic => "hyperarithmetic",
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum UslCommand {
    /// List the labeled diagrams generated by k elements.
    Enum {
        #[arg(short = 'k', long)]
        generators: usize,
        #[arg(long, env = "SIGMA2_MAX_SIZE", default_value_t = DEFAULT_MAX_SIZE as u64, value_parser = clap::value_parser!(u64).range(1..))]
        max_size: u64,
    },
    /// Check a USL file against the semilattice axioms.
    Check { file: PathBuf },
}

#[derive(Args, Debug, Clone)]
pub struct ModeArgs {
    /// Plain forcing, or the restriction computing B along A.
    #[arg(long, value_enum, default_value_t = ModeKind::P)]
    pub mode: ModeKind,
    /// The real A for `--mode Q`, as prefix:period.
    #[arg(long = "A", value_name = "REAL")]
    pub a: Option<Real>,
    /// The real B for `--mode Q`, as prefix:period.
    #[arg(long = "B", value_name = "REAL")]
    pub b: Option<Real>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeKind {
    #[value(name = "P", alias = "p")]
    P,
    #[value(name = "Q", alias = "q")]
    Q,
}

#[derive(Args, Debug, Clone)]
pub struct EnvArgs {
    /// Oracle-machine programs, separated by lines `---`.
    #[arg(long)]
    pub program: Option<PathBuf>,
    /// A parameter real for `pre(σ, NAME)` atoms.
    #[arg(long = "param", value_name = "NAME=REAL", value_parser = parse_param)]
    pub params: Vec<(String, Real)>,
}

fn parse_param(s: &str) -> Result<(String, Real), String> {
    let (name, real) = s.split_once('=').ok_or_else(|| format!("expected NAME=prefix:period, got {s:?}"))?;
    Ok((name.trim().to_string(), real.parse().map_err(|e| format!("{e}"))?))
}

pub fn parse_bits(s: &str) -> Result<BinaryString, String> {
    match s {
        "ε" => Ok(BinaryString::empty()),
        _ => s.parse().map_err(|_| format!("not a bit string: {s:?}")),
    }
}

#[derive(Args, Debug, Clone, Default)]
pub struct BoundsArgs {
    /// JSON file with any of the bound fields; flags below override it.
    #[arg(long)]
    pub bounds: Option<PathBuf>,
    #[arg(long)]
    pub max_new_axioms: Option<usize>,
    #[arg(long)]
    pub max_use_len: Option<usize>,
    #[arg(long)]
    pub max_reals: Option<usize>,
    #[arg(long)]
    pub max_steps: Option<u64>,
    #[arg(long)]
    pub max_input: Option<u64>,
    #[arg(long)]
    pub oracle_len: Option<u64>,
    #[arg(long)]
    pub max_instances: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum TreeKind {
    /// Vectors essential to refuting a conjunction of families.
    #[value(name = "T", alias = "t")]
    T,
    /// Vectors essential to splitting a computation.
    #[value(name = "U", alias = "u")]
    U,
}

#[derive(Subcommand, Debug)]
pub enum KsfCommand {
    /// Check a condition file: functionality, use-monotonicity, distinct reals.
    Validate { file: PathBuf },
    /// Whether the condition in Q extends the one in P.
    Extends {
        p: PathBuf,
        q: PathBuf,
        #[command(flatten)]
        mode: ModeArgs,
    },
    /// Whether a condition forces a quantifier-free sentence.
    Force {
        condition: PathBuf,
        psi: String,
        #[command(flatten)]
        mode: ModeArgs,
        #[command(flatten)]
        env: EnvArgs,
    },
    /// Find reals that, added to a functional, force a sentence.
    DecideForce {
        phi: PathBuf,
        psi: String,
        #[command(flatten)]
        mode: ModeArgs,
        #[command(flatten)]
        env: EnvArgs,
    },
    /// Print the generic oracle a condition determines: 1, 0 or ?.
    Oracle {
        condition: PathBuf,
        #[arg(long, default_value_t = 64)]
        len: usize,
        #[command(flatten)]
        mode: ModeArgs,
    },
    /// Search for a split of program e below a functional.
    Split {
        phi: PathBuf,
        #[arg(short, long, default_value_t = 0)]
        e: u64,
        /// The parameter real C read at even oracle positions.
        #[arg(short, long, default_value = ":0")]
        c: Real,
        #[command(flatten)]
        mode: ModeArgs,
        #[command(flatten)]
        env: EnvArgs,
        #[command(flatten)]
        bounds: BoundsArgs,
    },
    /// Whether a string vector survives the bounded refutation search.
    Essential {
        phi: PathBuf,
        /// The vector, as (s1,s2,...).
        #[arg(long)]
        tau: StringVector,
        /// JSON target: {"Conjuncts": [...]} or {"Splits": {"e": n, "c": {...}}}.
        #[arg(long)]
        target: PathBuf,
        #[command(flatten)]
        mode: ModeArgs,
        #[command(flatten)]
        env: EnvArgs,
        #[command(flatten)]
        bounds: BoundsArgs,
    },
    /// Vectors at a given depth whose truncations all survive.
    Tree {
        #[arg(value_enum)]
        kind: TreeKind,
        phi: PathBuf,
        #[arg(short, long, default_value_t = 1)]
        k: usize,
        #[arg(long)]
        depth: usize,
        /// Conjunct families for T.
        #[arg(long)]
        target: Option<PathBuf>,
        /// Program index for U.
        #[arg(short, long, default_value_t = 0)]
        e: u64,
        /// The parameter real C for U.
        #[arg(short, long, default_value = ":0")]
        c: Real,
        #[command(flatten)]
        mode: ModeArgs,
        #[command(flatten)]
        env: EnvArgs,
        #[command(flatten)]
        bounds: BoundsArgs,
    },
    /// The reals a chain of vectors converges to.
    Path {
        /// Vectors of increasing depth, each extending the last by one bit.
        #[arg(required = true)]
        chain: Vec<StringVector>,
        /// One period for all components, or one per component.
        #[arg(long = "period", required = true, value_parser = parse_bits)]
        periods: Vec<BinaryString>,
        #[command(flatten)]
        mode: ModeArgs,
    },
    /// Axiom codes.
    #[command(subcommand)]
    Codec(CodecCommand),
}

#[derive(Subcommand, Debug)]
pub enum CodecCommand {
    Encode {
        x: u64,
        y: u8,
        #[arg(value_parser = parse_bits)]
        sigma: BinaryString,
    },
    Decode {
        n: u64,
    },
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_and_bits() {
        let (name, r) = parse_param("C=1:0").unwrap();
        assert_eq!(name, "C");
        assert_eq!(r, "1:0".parse::<Real>().unwrap());
        assert!(parse_param("C").is_err());
        assert_eq!(parse_bits("ε").unwrap(), BinaryString::empty());
        assert!(parse_bits("012").is_err());
    }

    #[test]
    fn command_line_shape() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
        let cli = Cli::try_parse_from(["sigma2", "ksf", "path", "(0)", "--period", "1", "--format", "json"]).unwrap();
        assert_eq!(cli.format, Format::Json);
        assert!(Cli::try_parse_from(["sigma2", "ksf", "path", "(0)"]).is_err());
    }
}
