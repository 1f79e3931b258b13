//! Command-line front end: each scan in the library is a subcommand
//! emitting a machine-readable table, so identical configurations and
//! seeds reproduce identical bytes.  Exit codes: 0 success, 1
//! computation or invariant failure, 2 usage error.

mod render;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use motzkinlab::combinatorics::SectorLabel;
use motzkinlab::dyckwalk::walk_gap;
use motzkinlab::eigensolve::gap_scan;
use motzkinlab::entanglement::{entropy, schmidt_spectrum};
use motzkinlab::hamiltonian::Variant;
use motzkinlab::supertree::{build_supertree, edge_load, ParentRule};
use motzkinlab::unbalanced::sector_energy;
use motzkinlab::verify::{check, Profile, CHECK_COUNT};

use render::{write_output, Cell, Table, VERSION};

/// Default residual tolerance for iterative eigensolves.
const DEFAULT_TOL: f64 = 1e-11;

/// Default seed for solver starting vectors.
const DEFAULT_SEED: u64 = 17;

#[derive(Parser)]
#[command(
    name = "motzkinlab",
    version,
    about = "Spectral scans and combinatorial certificates for a frustration-free spin-1 chain"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lowest levels and spectral gap per chain length, with a power-law fit.
    Gap(GapArgs),
    /// Half-cut entanglement entropy and its offset from the half-log term.
    Entropy(EntropyArgs),
    /// Exact half-cut Schmidt coefficients as reduced rationals.
    Schmidt(SchmidtArgs),
    /// Pattern-walk spectra and the gap identity residual per chain length.
    Walk(WalkArgs),
    /// Level sizes and parent-map summary of the pattern tree.
    Supertree(SupertreeArgs),
    /// Canonical-path congestion certificates against the true walk gap.
    Edgeload(EdgeloadArgs),
    /// Lowest energy of one unbalanced sector block.
    Sector(SectorArgs),
    /// Invariant battery; exits 0 only when every check passes.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct OutputOpts {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write output to this path (atomically) instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct SolveOpts {
    /// Residual tolerance for iterative eigensolves.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Seed for solver starting vectors.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Full,
    Simplified,
    Bulk,
    Eps,
}

#[derive(Args)]
struct GapArgs {
    /// Smallest chain length in the scan.
    #[arg(long, value_name = "N")]
    n_min: usize,
    /// Largest chain length in the scan.
    #[arg(long, value_name = "N")]
    n_max: usize,
    /// Hamiltonian variant to scan.
    #[arg(long, value_enum, default_value_t = VariantArg::Full)]
    variant: VariantArg,
    /// Bulk-term weight; requires --variant eps.
    #[arg(long, value_name = "X")]
    eps: Option<f64>,
    #[command(flatten)]
    solve: SolveOpts,
    #[command(flatten)]
    output: OutputOpts,
}

#[derive(Args)]
struct EntropyArgs {
    /// Single even chain length.
    #[arg(long, value_name = "N", conflicts_with_all = ["n_min", "n_max"])]
    n: Option<usize>,
    /// Smallest chain length; even lengths in the range are scanned.
    #[arg(long, value_name = "N", requires = "n_max")]
    n_min: Option<usize>,
    /// Largest chain length.
    #[arg(long, value_name = "N", requires = "n_min")]
    n_max: Option<usize>,
    #[command(flatten)]
    output: OutputOpts,
}

#[derive(Args)]
struct SchmidtArgs {
    /// Even chain length.
    #[arg(long, value_name = "N")]
    n: usize,
    #[command(flatten)]
    output: OutputOpts,
}

#[derive(Args)]
struct WalkArgs {
    /// Smallest chain length.
    #[arg(long, value_name = "N", default_value_t = 2)]
    n_min: usize,
    /// Largest chain length.
    #[arg(long, value_name = "N")]
    n_max: usize,
    #[command(flatten)]
    output: OutputOpts,
}

#[derive(Args)]
struct SupertreeArgs {
    /// Deepest pattern level to build.
    #[arg(long, value_name = "K")]
    k_max: usize,
    #[command(flatten)]
    output: OutputOpts,
}

#[derive(Args)]
struct EdgeloadArgs {
    /// Smallest chain length.
    #[arg(long, value_name = "N", default_value_t = 2)]
    n_min: usize,
    /// Largest chain length.
    #[arg(long, value_name = "N")]
    n_max: usize,
    #[command(flatten)]
    output: OutputOpts,
}

#[derive(Args)]
struct SectorArgs {
    /// Chain length.
    #[arg(long, value_name = "N")]
    n: usize,
    /// Unmatched closing letters.
    #[arg(long, value_name = "P")]
    p: usize,
    /// Unmatched opening letters.
    #[arg(long, value_name = "Q")]
    q: usize,
    /// Hamiltonian variant for the sector block.
    #[arg(long, value_enum, default_value_t = VariantArg::Simplified)]
    variant: VariantArg,
    /// Bulk-term weight; requires --variant eps.
    #[arg(long, value_name = "X")]
    eps: Option<f64>,
    #[command(flatten)]
    solve: SolveOpts,
    #[command(flatten)]
    output: OutputOpts,
}

#[derive(Args)]
struct VerifyArgs {
    /// Which battery to run: the fast smoke sizes or the full sizes.
    #[arg(long, value_enum, default_value_t = Suite::All)]
    suite: Suite,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Fast,
    All,
}

enum CliError {
    Usage(String),
    Lib(motzkinlab::Error),
    Io(std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Lib(motzkinlab::Error::InvalidInput(_)) => 2,
            CliError::Lib(_) | CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<motzkinlab::Error> for CliError {
    fn from(e: motzkinlab::Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn resolve_variant(arg: VariantArg, eps: Option<f64>) -> Result<Variant, CliError> {
    match (arg, eps) {
        (VariantArg::Eps, Some(x)) => Ok(Variant::Eps(x)),
        (VariantArg::Eps, None) => Err(CliError::Usage(
            "--variant eps requires --eps".into(),
        )),
        (_, Some(_)) => Err(CliError::Usage(
            "--eps only applies to --variant eps".into(),
        )),
        (VariantArg::Full, None) => Ok(Variant::Full),
        (VariantArg::Simplified, None) => Ok(Variant::Simplified),
        (VariantArg::Bulk, None) => Ok(Variant::Bulk),
    }
}

fn variant_column(v: Variant) -> String {
    match v {
        Variant::Full => "full".into(),
        Variant::Simplified => "simplified".into(),
        Variant::Bulk => "bulk".into(),
        Variant::Move => "move".into(),
        Variant::Interaction => "interaction".into(),
        Variant::Eps(x) => format!("eps({x})"),
    }
}

fn cmd_gap(a: &GapArgs) -> Result<Table, CliError> {
    if a.n_min > a.n_max {
        return Err(CliError::Usage(format!(
            "empty range [{}, {}]",
            a.n_min, a.n_max
        )));
    }
    let variant = resolve_variant(a.variant, a.eps)?;
    let fit = gap_scan(a.n_min, a.n_max, variant, a.solve.tol, a.solve.seed)?;
    let mut table = Table::new(
        "gap",
        vec!["n", "lambda1", "lambda2", "gap", "sector_p", "sector_q", "residual"],
    );
    for p in &fit.points {
        table.row(vec![
            Cell::count(p.n),
            Cell::float(p.lambda1),
            Cell::float(p.lambda2),
            Cell::float(p.gap),
            Cell::count(p.sector.p),
            Cell::count(p.sector.q),
            Cell::float(p.residual),
        ]);
    }
    if fit.points.len() >= 2 {
        table.extra(
            "fit",
            serde_json::json!({
                "slope": fit.slope,
                "intercept": fit.intercept,
                "rms_residual": fit.rms_residual,
                "first_excited_one_unmatched": fit.first_excited_one_unmatched,
            }),
        );
    }
    Ok(table)
}

fn cmd_entropy(a: &EntropyArgs) -> Result<Table, CliError> {
    let lengths: Vec<usize> = match (a.n, a.n_min, a.n_max) {
        (Some(n), None, None) => vec![n],
        (None, Some(lo), Some(hi)) => {
            if lo > hi {
                return Err(CliError::Usage(format!("empty range [{lo}, {hi}]")));
            }
            let evens: Vec<usize> = (lo..=hi).filter(|v| v % 2 == 0).collect();
            if evens.is_empty() {
                return Err(CliError::Usage(format!(
                    "no even lengths in [{lo}, {hi}]"
                )));
            }
            evens
        }
        _ => {
            return Err(CliError::Usage(
                "pass either --n or both --n-min and --n-max".into(),
            ))
        }
    };
    let mut table = Table::new("entropy", vec!["n", "s_bits", "c_n"]);
    for n in lengths {
        let point = entropy(n)?;
        table.row(vec![
            Cell::count(point.n),
            Cell::float(point.s_bits),
            Cell::float(point.c_n),
        ]);
    }
    Ok(table)
}

fn cmd_schmidt(a: &SchmidtArgs) -> Result<Table, CliError> {
    let spectrum = schmidt_spectrum(a.n)?;
    let mut table = Table::new("schmidt", vec!["m", "probability"]);
    for m in 0..spectrum.rank() {
        let c = spectrum.coefficient(m).expect("m ranges over the rank");
        table.row(vec![
            Cell::count(m),
            Cell::text(format!("{}/{}", c.numer(), c.denom())),
        ]);
    }
    table.extra("rank", serde_json::json!(spectrum.rank()));
    Ok(table)
}

fn cmd_walk(a: &WalkArgs) -> Result<Table, CliError> {
    if a.n_min > a.n_max {
        return Err(CliError::Usage(format!(
            "empty range [{}, {}]",
            a.n_min, a.n_max
        )));
    }
    let mut table = Table::new(
        "walk",
        vec![
            "n",
            "dim",
            "lambda2_p",
            "gap_p",
            "lambda2_heff",
            "identity_residual",
            "min_insert_prob",
            "min_remove_prob",
        ],
    );
    for n in a.n_min..=a.n_max {
        let g = walk_gap(n)?;
        table.row(vec![
            Cell::count(g.n),
            Cell::count(g.dim),
            Cell::float(g.lambda2_p),
            Cell::float(g.gap_p),
            Cell::float(g.lambda2_heff),
            Cell::float(g.identity_residual),
            Cell::float(g.min_insert_prob),
            Cell::float(g.min_remove_prob),
        ]);
    }
    Ok(table)
}

fn cmd_supertree(a: &SupertreeArgs) -> Result<Table, CliError> {
    let tree = build_supertree(a.k_max)?;
    let mut table = Table::new("supertree", vec!["level", "patterns"]);
    let mut total = 0usize;
    for k in 0..=a.k_max {
        let size = tree.level_size(k);
        total += size;
        table.row(vec![Cell::count(k), Cell::count(size)]);
    }
    table.extra(
        "summary",
        serde_json::json!({
            "total_patterns": total,
            "max_children_matching": tree.max_children(ParentRule::Matching),
            "max_children_recursive": tree.max_children(ParentRule::Recursive),
            "parent_rule_divergences": tree.divergence_count(),
        }),
    );
    Ok(table)
}

fn cmd_edgeload(a: &EdgeloadArgs) -> Result<Table, CliError> {
    if a.n_min > a.n_max {
        return Err(CliError::Usage(format!(
            "empty range [{}, {}]",
            a.n_min, a.n_max
        )));
    }
    let mut table = Table::new(
        "edgeload",
        vec!["n", "dim", "rho", "max_path_len", "gap_bound", "true_gap"],
    );
    for n in a.n_min..=a.n_max {
        let load = edge_load(n, ParentRule::Matching)?;
        table.row(vec![
            Cell::count(load.n),
            Cell::count(load.dim),
            Cell::float(load.rho),
            Cell::count(load.max_path_len),
            Cell::float(load.gap_bound),
            Cell::float(load.true_gap),
        ]);
    }
    Ok(table)
}

fn cmd_sector(a: &SectorArgs) -> Result<Table, CliError> {
    let variant = resolve_variant(a.variant, a.eps)?;
    let energy = sector_energy(
        a.n,
        SectorLabel::new(a.p, a.q),
        variant,
        a.solve.tol,
        a.solve.seed,
    )?;
    let mut table = Table::new(
        "sector",
        vec!["n", "p", "q", "variant", "lambda1", "dim"],
    );
    table.row(vec![
        Cell::count(energy.n),
        Cell::count(energy.label.p),
        Cell::count(energy.label.q),
        Cell::text(variant_column(variant)),
        Cell::float(energy.lambda1),
        Cell::count(energy.dim),
    ]);
    Ok(table)
}

fn cmd_verify(a: &VerifyArgs) -> Result<ExitCode, CliError> {
    let (profile, name) = match a.suite {
        Suite::Fast => (Profile::Fast, "fast"),
        Suite::All => (Profile::Full, "all"),
    };
    println!("# motzkinlab {VERSION} verify suite={name}");
    let mut failed: Vec<&'static str> = Vec::new();
    for id in 1..=CHECK_COUNT {
        let report = check(id, profile)?;
        println!("{report}");
        if !report.passed {
            failed.push(report.name);
        }
    }
    if failed.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("motzkinlab: failed checks: {}", failed.join(", "));
        Ok(ExitCode::from(1))
    }
}

fn run(cli: &Cli) -> Result<ExitCode, CliError> {
    let (table, output) = match &cli.command {
        Command::Gap(a) => (cmd_gap(a)?, &a.output),
        Command::Entropy(a) => (cmd_entropy(a)?, &a.output),
        Command::Schmidt(a) => (cmd_schmidt(a)?, &a.output),
        Command::Walk(a) => (cmd_walk(a)?, &a.output),
        Command::Supertree(a) => (cmd_supertree(a)?, &a.output),
        Command::Edgeload(a) => (cmd_edgeload(a)?, &a.output),
        Command::Sector(a) => (cmd_sector(a)?, &a.output),
        Command::Verify(a) => return cmd_verify(a),
    };
    let text = match output.format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    };
    write_output(output.out.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

/// The computation itself is single-threaded, so any positive cap is
/// already honored; the variable is still validated so typos fail
/// loudly instead of silently changing nothing.
fn validate_threads_env() -> Result<(), String> {
    match std::env::var("MOTZKINLAB_THREADS") {
        Err(std::env::VarError::NotPresent) => Ok(()),
        Err(std::env::VarError::NotUnicode(_)) => {
            Err("MOTZKINLAB_THREADS is not valid unicode".into())
        }
        Ok(s) => match s.parse::<usize>() {
            Ok(t) if t >= 1 => Ok(()),
            _ => Err(format!(
                "MOTZKINLAB_THREADS must be a positive integer, got {s:?}"
            )),
        },
    }
}

fn main() -> ExitCode {
    if let Err(msg) = validate_threads_env() {
        eprintln!("motzkinlab: {msg}");
        return ExitCode::from(2);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("motzkinlab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
