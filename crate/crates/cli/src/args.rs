use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use heunrwe::{BcKind, Branch, Family, InfinityBranch, OriginRoot};

#[derive(Debug, Parser)]
#[command(
    name = "heunrwe",
    version,
    about = "Bi-confluent Heun potentials, inverse-square-root spectra and their relativistic counterparts"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the report to FILE instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,

    /// Unit system: natural (ħ = m = c = 1) or SI.
    #[arg(long, global = true, value_enum, default_value_t = UnitChoice::Natural)]
    pub units: UnitChoice,

    /// Particle mass in kg (SI units only; defaults to the electron mass).
    #[arg(long, global = true)]
    pub mass: Option<f64>,

    /// Particle charge in C (SI units only; defaults to the elementary charge).
    #[arg(long, global = true)]
    pub charge: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum UnitChoice {
    Natural,
    Si,
}

impl fmt::Display for UnitChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UnitChoice::Natural => "natural",
            UnitChoice::Si => "si",
        })
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the bi-confluent Heun function and its derivative.
    BchEval(BchEvalArgs),
    /// Power-series coefficients of the bi-confluent Heun function.
    BchCoefficients(BchCoefficientsArgs),
    /// Accessory parameters q for which the series is a polynomial of degree n.
    QValues(QValuesArgs),
    /// Spectra of the inverse-square-root potential and the energy maps.
    #[command(subcommand)]
    Spectrum(SpectrumCommand),
    /// Numerov shooting eigenvalues.
    Oracle(OracleArgs),
    /// Reduce a potential to the bi-confluent Heun equation and check the result.
    Reduce(ReduceArgs),
    /// Potential catalog, coordinate transforms and scalar/vector potentials.
    #[command(subcommand)]
    Potential(PotentialCommand),
    /// Print the JSON schema of the report format.
    Schema,
    /// Check a report file against the schema.
    Validate {
        #[arg(value_name = "FILE")]
        file: PathBuf,
    },
}

#[derive(Debug, Clone, Args)]
pub struct BchParamArgs {
    #[arg(long)]
    pub gamma: f64,
    #[arg(long)]
    pub delta: f64,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub q: f64,
}

#[derive(Debug, Args)]
pub struct BchEvalArgs {
    #[command(flatten)]
    pub params: BchParamArgs,
    /// Evaluation points, comma separated.
    #[arg(long, required = true, value_delimiter = ',')]
    pub z: Vec<f64>,
    #[arg(long, default_value_t = 1e-12)]
    pub rel_tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_terms: usize,
}

#[derive(Debug, Args)]
pub struct BchCoefficientsArgs {
    #[command(flatten)]
    pub params: BchParamArgs,
    #[arg(long, default_value_t = 10)]
    pub count: usize,
}

#[derive(Debug, Args)]
pub struct QValuesArgs {
    #[arg(long)]
    pub gamma: f64,
    #[arg(long)]
    pub delta: f64,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long)]
    pub n: usize,
}

/// Inclusive range of levels written `a..b`, or a single level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LevelRange {
    pub start: usize,
    pub end: usize,
}

impl LevelRange {
    pub fn iter(&self) -> impl Iterator<Item = usize> {
        self.start..=self.end
    }
}

impl FromStr for LevelRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|e| format!("invalid level '{t}': {e}"))
        };
        let (start, end) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.strip_prefix('=').unwrap_or(b))?),
            None => {
                let n = parse(s)?;
                (n, n)
            }
        };
        if start == 0 {
            return Err("levels are labeled from 1".into());
        }
        if end < start {
            return Err(format!("empty range {start}..{end}"));
        }
        Ok(Self { start, end })
    }
}

impl fmt::Display for LevelRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BcChoice {
    Quasipoly,
    Dirichlet,
    Custom,
}

impl From<BcChoice> for BcKind {
    fn from(b: BcChoice) -> Self {
        match b {
            BcChoice::Quasipoly => BcKind::Quasipoly,
            BcChoice::Dirichlet => BcKind::Dirichlet,
            BcChoice::Custom => BcKind::Custom,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct BcArgs {
    #[arg(long, value_enum, default_value_t = BcChoice::Quasipoly)]
    pub bc: BcChoice,
    /// Maslov index for `--bc custom`.
    #[arg(long)]
    pub maslov: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BranchChoice {
    Plus,
    Minus,
}

impl From<BranchChoice> for Branch {
    fn from(b: BranchChoice) -> Self {
        match b {
            BranchChoice::Plus => Branch::Plus,
            BranchChoice::Minus => Branch::Minus,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum SpectrumCommand {
    /// Levels of V0/√x.
    Isr {
        #[arg(long)]
        v0: f64,
        #[arg(long, default_value = "1..5")]
        n: LevelRange,
        #[command(flatten)]
        bc: BcArgs,
        /// Cross-check quasi-polynomial levels against polynomial termination.
        #[arg(long)]
        check: bool,
    },
    /// Relativistic levels for characteristic length d.
    Rwe {
        #[arg(long)]
        d: f64,
        #[arg(long, default_value = "1..5")]
        n: LevelRange,
        #[command(flatten)]
        bc: BcArgs,
    },
    /// Smallest admissible quantum number for λ̃/d.
    N0 {
        /// The ratio λ̃/d.
        #[arg(long)]
        ratio: f64,
        #[command(flatten)]
        bc: BcArgs,
    },
    /// Schrödinger energy to relativistic energy.
    ToRwe {
        #[arg(long)]
        energy: f64,
        #[arg(long, value_enum, default_value_t = BranchChoice::Minus)]
        branch: BranchChoice,
    },
    /// Relativistic energy to Schrödinger energy.
    ToSchrodinger {
        #[arg(long)]
        w: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OraclePotential {
    /// V0/√x on the half line with ψ(0) = 0.
    Isr,
    /// mω²x²/2 on the full line.
    Harmonic,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, value_enum)]
    pub potential: OraclePotential,
    #[arg(long, default_value_t = -1.0)]
    pub v0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    #[arg(long, default_value_t = 3)]
    pub n_max: usize,
    #[arg(long)]
    pub x_max: Option<f64>,
    #[arg(long)]
    pub grid_points: Option<usize>,
    #[arg(long)]
    pub e_lo: Option<f64>,
    #[arg(long)]
    pub e_hi: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Include eigenfunction samples (at most 500 per level).
    #[arg(long)]
    pub wavefunctions: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SpecArgs {
    /// Family exponent m1: -1, -1/2, 0, 1/2 or 1.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_family)]
    pub family: Family,
    #[arg(long, default_value_t = 0.0)]
    pub v0: f64,
    #[arg(long, default_value_t = 0.0)]
    pub v1: f64,
    #[arg(long, default_value_t = 0.0)]
    pub v2: f64,
    #[arg(long, default_value_t = 0.0)]
    pub v3: f64,
    #[arg(long, default_value_t = 0.0)]
    pub v4: f64,
    #[arg(long, default_value_t = 0.0)]
    pub x0: f64,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse::<Family>().map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OriginChoice {
    Upper,
    Lower,
}

impl From<OriginChoice> for OriginRoot {
    fn from(o: OriginChoice) -> Self {
        match o {
            OriginChoice::Upper => OriginRoot::Upper,
            OriginChoice::Lower => OriginRoot::Lower,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InfinityChoice {
    Decaying,
    Growing,
}

impl From<InfinityChoice> for InfinityBranch {
    fn from(i: InfinityChoice) -> Self {
        match i {
            InfinityChoice::Decaying => InfinityBranch::Decaying,
            InfinityChoice::Growing => InfinityBranch::Growing,
        }
    }
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long)]
    pub energy: f64,
    #[arg(long, value_enum, default_value_t = OriginChoice::Upper)]
    pub origin: OriginChoice,
    #[arg(long, value_enum, default_value_t = InfinityChoice::Decaying)]
    pub infinity: InfinityChoice,
    /// Residual grid size (log spaced).
    #[arg(long, default_value_t = 200)]
    pub grid_points: usize,
    /// Residual grid bounds as offsets from x0; defaults depend on the family.
    #[arg(long)]
    pub x_lo: Option<f64>,
    #[arg(long)]
    pub x_hi: Option<f64>,
    /// Points at which to tabulate ψ and ψ', comma separated.
    #[arg(long, value_delimiter = ',')]
    pub x: Vec<f64>,
}

#[derive(Debug, Subcommand)]
pub enum PotentialCommand {
    /// V(x) for a family member.
    Eval {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, required = true, value_delimiter = ',')]
        x: Vec<f64>,
    },
    /// z(x) and dz/dx for a family.
    Transform {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_family)]
        family: Family,
        #[arg(long, required = true, value_delimiter = ',')]
        x: Vec<f64>,
    },
    /// Scalar potential q0·φ that reproduces V together with q0²A².
    Scalar {
        #[arg(long)]
        v: f64,
        #[arg(long, default_value_t = 0.0)]
        a2: f64,
        #[arg(long, value_enum, default_value_t = BranchChoice::Plus)]
        branch: BranchChoice,
    },
    /// Schrödinger potential from q0·φ and q0²A².
    FromScalar {
        #[arg(long)]
        phi: f64,
        #[arg(long, default_value_t = 0.0)]
        a2: f64,
    },
    /// q0²A² of the pure vector potential reproducing V < 0.
    Vector {
        #[arg(long)]
        v: f64,
    },
    /// Scalar potential generating the inverse-square-root well of length d.
    IsrScalar {
        #[arg(long)]
        d: f64,
        #[arg(long, required = true, value_delimiter = ',')]
        x: Vec<f64>,
        #[arg(long, value_enum, default_value_t = BranchChoice::Plus)]
        branch: BranchChoice,
    },
    /// Strength V0 of the inverse-square-root well of length d.
    IsrSpec {
        #[arg(long)]
        d: f64,
    },
    /// Characteristic length d of V0/√x.
    IsrLength {
        #[arg(long)]
        v0: f64,
    },
}
