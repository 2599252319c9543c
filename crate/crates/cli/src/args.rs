use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "gtmm", version, about = "Group-theoretic matrix multiplication: verify, build, bound, multiply")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Work budget for exhaustive checks (elementary group operations).
    #[arg(long, global = true, default_value_t = gtmm_core::product::DEFAULT_BUDGET)]
    pub budget: u64,
    /// Worker threads for parallel checks (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a product property or a puzzle property.
    Verify(VerifyArgs),
    /// Build a named construction.
    Build(BuildArgs),
    /// Compute an exponent bound.
    Bound(BoundArgs),
    /// Multiply integer matrices through the group algebra.
    Matmul(MatmulArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyKind {
    Tpp,
    Dpp,
    Sdpp,
    Stpp,
    Usp,
    StrongUsp,
    LocalUsp,
    LocalStrongUsp,
    ChartUsp,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum PuzzleMethod {
    /// Exhaustive for small puzzles, otherwise the two-symbol subgroup test.
    Auto,
    Exhaustive,
    Structural,
    /// The literal triple quantifier (tiny puzzles only).
    Definition,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub kind: VerifyKind,
    /// Subset family JSON (product properties).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Puzzle file: one row per line over 1/2/3, '#' comments.
    #[arg(long)]
    pub puzzle: Option<PathBuf>,
    /// Chart JSON for chart-usp (default: the local USP chart over Cyc_3).
    #[arg(long)]
    pub chart: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = PuzzleMethod::Auto)]
    pub method: PuzzleMethod,
}

#[derive(Args, Debug)]
pub struct BuildArgs {
    /// One of the construction names listed by `gtmm build --help`.
    #[arg(value_parser = clap::builder::PossibleValuesParser::new(gtmm_core::construct::CONSTRUCTION_NAMES))]
    pub name: String,
    /// Comma-separated key=value integers, e.g. `k=3,m=6`.
    #[arg(long, action = clap::ArgAction::Append)]
    pub params: Vec<String>,
    /// Source puzzle for usp-to-tpp, lsusp-to-stpp and chart-to-stpp.
    #[arg(long)]
    pub puzzle: Option<PathBuf>,
    /// Source chart for chart-to-stpp.
    #[arg(long)]
    pub chart: Option<PathBuf>,
    /// Run the matching checker on the result.
    #[arg(long)]
    pub verify: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundForm {
    /// Headline figures, recomputed.
    Table,
    Tpp,
    Asi,
    Sdpp,
    SdppAsymptotic,
    AlphaBeta,
    StrongUsp,
    Capacity,
    Chart,
    ChartScan,
    Section2,
    Section2Scan,
    StppExample,
    StppExampleScan,
    WreathPower,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    pub form: BoundForm,
    /// Comma-separated key=value pairs; see the README for each form.
    #[arg(long, action = clap::ArgAction::Append)]
    pub params: Vec<String>,
    /// Take the shape (tpp) or the sizes (strong-usp) from a construction
    /// file, verifying it first.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Puzzle file for the strong-usp form.
    #[arg(long)]
    pub puzzle: Option<PathBuf>,
    /// Mark the bound conditional on an unverified construction.
    #[arg(long)]
    pub conditional: bool,
}

#[derive(Args, Debug)]
pub struct MatmulArgs {
    /// Triple or family JSON (a bare object or a `gtmm build` report).
    #[arg(long)]
    pub construction: PathBuf,
    /// Left factor CSV, one per triple; random if omitted.
    #[arg(long, action = clap::ArgAction::Append)]
    pub a: Vec<PathBuf>,
    /// Right factor CSV, one per triple; random if omitted.
    #[arg(long, action = clap::ArgAction::Append)]
    pub b: Vec<PathBuf>,
    /// Product CSV destinations, one per triple.
    #[arg(long, action = clap::ArgAction::Append)]
    pub c: Vec<PathBuf>,
    /// Compare every product with the naive product.
    #[arg(long)]
    pub check: bool,
    /// Skip the product-property check; results are labeled "unchecked premise".
    #[arg(long)]
    pub assume_verified: bool,
    /// Bound on random entries when factors are generated.
    #[arg(long, default_value_t = 1000)]
    pub entry_bound: i64,
}
