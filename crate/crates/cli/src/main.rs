//! `bibrace`: reproduce the structure tables and query individual algebras.
//!
//! Exit status: 0 success, 1 property or comparison failure, 2 usage or
//! malformed input, 3 resource limits and checkpoint problems.

mod output;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bibrace::algebra::{self, AlternatingAlgebra};
use bibrace::census::CensusFile;
use bibrace::counting::{self, SequenceMethod};
use bibrace::orbits::{
    self, Census, CensusOptions, CheckpointPolicy, GeneratorSet, Layer, OrbitOptions, RunStatus,
    DEFAULT_CHECKPOINT_INTERVAL,
};
use bibrace::published::{self, Comparison, Verdict};
use bibrace::spaces::SkewSpace;
use bibrace::{Error, ExecPolicy};
use clap::{Args, Parser, Subcommand, ValueEnum};

use output::{class_rows, Format, Report};

#[derive(Parser, Debug)]
#[command(name = "bibrace", version, about = "Count and classify binary alternating algebras (binary bibraces)")]
struct Cli {
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct RunConfig {
    /// Worker threads for parallel kernels.
    #[arg(long, global = true, env = "BIBRACE_WORKERS", value_parser = clap::value_parser!(u32).range(1..))]
    workers: Option<u32>,
    /// Memory budget for orbit searches, in MiB.
    #[arg(long, global = true, default_value_t = 2048, value_parser = clap::value_parser!(u64).range(1..))]
    memory_budget: u64,
    /// Generating set of GL(m, 2) used by orbit searches.
    #[arg(long, global = true, value_enum, default_value_t = Generators::Transvections)]
    generators: Generators,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Generators {
    Transvections,
    Pair,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Counts of algebras per (m, d): t, s and s·t.
    Tables {
        #[arg(long, value_parser = clap::value_parser!(u64).range(3..=8))]
        upto_n: u64,
        /// Algorithm for s; `both` runs the two and requires agreement.
        #[arg(long, value_enum, default_value_t = Method::BruteForce)]
        method: Method,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Compare with the published table (report on stderr).
        #[arg(long)]
        check_paper: bool,
    },
    /// Isomorphism classes of nondegenerate algebras with parameters (m, d).
    Classify {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// For m = 6, d = 2: recompute the planes instead of reading the stored census.
        #[arg(long)]
        live: bool,
        #[arg(long)]
        check_paper: bool,
    },
    /// Orbit partition of all 2-dimensional subspaces of Λ_m.
    Census {
        #[arg(long, value_parser = clap::value_parser!(u64).range(3..=6))]
        m: u64,
        /// Save progress to this file.
        #[arg(long, conflicts_with = "resume")]
        checkpoint: Option<PathBuf>,
        /// Continue the run saved in this checkpoint (and keep saving to it).
        #[arg(long)]
        resume: Option<PathBuf>,
        /// Node expansions between checkpoints.
        #[arg(long, default_value_t = DEFAULT_CHECKPOINT_INTERVAL)]
        checkpoint_interval: u64,
        /// Suspend after this many further expansions (exit status 3).
        #[arg(long)]
        stop_after: Option<u64>,
        /// Also write the class table in the stored-census format.
        #[arg(long)]
        save_table: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Exhaustively checks the bibrace and algebra axioms for an algebra file.
    VerifyBibrace {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Decides isomorphism of two algebra files (exit 1 when not isomorphic).
    Iso {
        first: PathBuf,
        second: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Rank sequence of a subspace of Λ_m.
    Ranks {
        #[command(flatten)]
        space: SpaceArg,
        /// Also list the rank sequences of all j-dimensional subspaces.
        #[arg(long)]
        sub: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Congruence class of a subspace: size, representative, stabilizer order.
    Orbit {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Method {
    BruteForce,
    BySubspace,
    Both,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = true)]
struct SpaceArg {
    /// Whole space as `m:k:hex,hex,…`.
    #[arg(long, conflicts_with_all = ["m", "basis"])]
    space: Option<String>,
    #[arg(long, requires = "basis")]
    m: Option<usize>,
    /// Comma-separated hex-encoded generators (with --m).
    #[arg(long, requires = "m")]
    basis: Option<String>,
}

impl SpaceArg {
    fn parse(&self) -> bibrace::Result<SkewSpace> {
        match (&self.space, self.m, &self.basis) {
            (Some(s), _, _) => SkewSpace::parse(s),
            (None, Some(m), Some(b)) => SkewSpace::parse_basis(m, b),
            _ => Err(Error::Parse("give --space or both --m and --basis".into())),
        }
    }
}

/// Failure carrying its exit status.
#[derive(Debug)]
enum Failure {
    /// A checked property or comparison did not hold; details already printed.
    Property(String),
    Lib(Error),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Property(_) => 1,
            Failure::Lib(e) => match e {
                Error::MemoryBudget { .. } | Error::Checkpoint(_) | Error::Io(_) | Error::Infeasible(_) => 3,
                _ => 2,
            },
            Failure::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Property(msg) => write!(f, "{msg}"),
            Failure::Lib(Error::Infeasible(msg)) => write!(f, "infeasible: {msg}"),
            Failure::Lib(e) => write!(f, "{e}"),
            Failure::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.run.workers {
        bibrace::exec::init_workers(n as usize);
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = std::io::stdout().flush();
            eprintln!("bibrace: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn policy(run: &RunConfig) -> ExecPolicy {
    if run.workers == Some(1) {
        ExecPolicy::Sequential
    } else {
        ExecPolicy::Parallel
    }
}

fn orbit_options(run: &RunConfig) -> OrbitOptions {
    OrbitOptions {
        policy: policy(run),
        generators: match run.generators {
            Generators::Transvections => GeneratorSet::Transvections,
            Generators::Pair => GeneratorSet::Pair,
        },
        memory_budget: run.memory_budget.saturating_mul(1 << 20),
    }
}

fn run(cli: &Cli) -> CmdResult {
    let run = &cli.run;
    match &cli.command {
        Command::Tables { upto_n, method, format, check_paper } => {
            cmd_tables(*upto_n as usize, *method, *format, *check_paper, policy(run))
        }
        Command::Classify { m, d, format, live, check_paper } => {
            cmd_classify(*m, *d, *format, *live, *check_paper, &orbit_options(run))
        }
        Command::Census { m, checkpoint, resume, checkpoint_interval, stop_after, save_table, format } => cmd_census(
            *m as usize,
            CensusArgs {
                checkpoint: checkpoint.clone().or_else(|| resume.clone()),
                resume: resume.is_some(),
                interval: *checkpoint_interval,
                stop_after: *stop_after,
                save_table: save_table.clone(),
            },
            *format,
            &orbit_options(run),
        ),
        Command::VerifyBibrace { file, format } => cmd_verify(file, *format, policy(run)),
        Command::Iso { first, second, format } => cmd_iso(first, second, *format),
        Command::Ranks { space, sub, format } => cmd_ranks(&space.parse()?, *sub, *format),
        Command::Orbit { space, format } => cmd_orbit(&space.parse()?, *format, &orbit_options(run)),
    }
}

/// Prints comparisons to stderr; fails if any is a genuine mismatch.
fn report_comparisons(cmp: &[Comparison]) -> CmdResult {
    let mut err = std::io::stderr().lock();
    for c in cmp {
        let verdict = match c.verdict {
            Verdict::Match => "ok",
            Verdict::Mismatch => "MISMATCH",
            Verdict::KnownDiscrepancy => "differs (published entry known to be inconsistent)",
            Verdict::NotCompared => "not compared",
            Verdict::Missing => "MISSING",
        };
        writeln!(
            err,
            "[{}] {}: published {} computed {} -> {verdict}",
            c.table,
            c.item,
            c.published.as_deref().unwrap_or("-"),
            c.computed.as_deref().unwrap_or("-")
        )?;
    }
    let failures = cmp.iter().filter(|c| c.is_failure()).count();
    if failures > 0 {
        return Err(Failure::Property(format!("{failures} value(s) differ from the published tables")));
    }
    Ok(())
}

fn cmd_tables(n_max: usize, method: Method, format: Format, check: bool, policy: ExecPolicy) -> CmdResult {
    let rows = match method {
        Method::BruteForce => counting::table1(n_max, SequenceMethod::BruteForce, policy)?,
        Method::BySubspace => counting::table1(n_max, SequenceMethod::BySubspace, policy)?,
        Method::Both => {
            let brute = counting::table1(n_max, SequenceMethod::BruteForce, policy)?;
            let by_subspace = counting::table1(n_max, SequenceMethod::BySubspace, policy)?;
            let differing: Vec<String> = brute
                .iter()
                .zip(&by_subspace)
                .filter(|(a, b)| a.s != b.s)
                .map(|(a, b)| format!("(m={}, d={}): {} vs {}", a.m, a.d, a.s, b.s))
                .collect();
            if !differing.is_empty() {
                output::tables(&brute, format)?;
                return Err(Failure::Property(format!("counting methods disagree at {}", differing.join(", "))));
            }
            brute
        }
    };
    output::tables(&rows, format)?;
    if check {
        report_comparisons(&published::compare_table1(&rows, n_max))?;
    }
    Ok(())
}

fn cmd_classify(m: usize, d: usize, format: Format, live: bool, check: bool, opts: &OrbitOptions) -> CmdResult {
    let classification = if m == 6 && d == 2 && !live {
        stored_classification()?
    } else {
        orbits::classify(m, d, opts)?
    };
    let summary = Report::Summary { classes: classification.n_classes, primitive: classification.n_primitive };
    output::classes(&class_rows(&classification.classes, Some(d)), Some(summary), format)?;
    eprintln!("classes: {}, primitive: {}", classification.n_classes, classification.n_primitive);
    if check {
        report_comparisons(&[published::compare_table2(&classification)])?;
    }
    Ok(())
}

/// `(6, 2)` from the stored plane census plus a live search for lines.
fn stored_classification() -> Result<orbits::Classification, Failure> {
    let opts = OrbitOptions::default();
    let mut classes = orbits::partition(6, 1, Layer::Nondegenerate, &opts)?;
    let planes = bibrace::census::lambda6_planes()?;
    classes.extend(planes.classes.iter().filter(|c| c.nondegenerate).cloned());
    let n_primitive = classes.iter().filter(|c| c.dim() == 2).count();
    Ok(orbits::Classification { m: 6, d: 2, n_classes: classes.len(), n_primitive, classes })
}

struct CensusArgs {
    checkpoint: Option<PathBuf>,
    resume: bool,
    interval: u64,
    stop_after: Option<u64>,
    save_table: Option<PathBuf>,
}

fn cmd_census(m: usize, args: CensusArgs, format: Format, opts: &OrbitOptions) -> CmdResult {
    let policy = args.checkpoint.clone().map(|path| CheckpointPolicy { path, interval: args.interval.max(1) });
    let classes = if args.stop_after.is_some() {
        let path = policy.as_ref().map(|p| p.path.clone());
        let mut census = match (&path, args.resume) {
            (Some(p), true) => Census::resume_2dim(m, p, opts)?,
            _ => {
                let mut c = Census::new(m, 2, Layer::All, opts)?;
                if let Some(p) = &path {
                    c.lock(p)?;
                }
                c
            }
        };
        match census.run(args.stop_after, policy.as_ref(), &mut |c| progress(c))? {
            RunStatus::Complete => census.classes()?,
            RunStatus::Suspended => {
                return Err(Failure::Lib(Error::Checkpoint(format!(
                    "census suspended after {} expansions ({} classes, {} spaces so far){}",
                    census.expansions(),
                    census.classes_found(),
                    census.visited(),
                    match &path {
                        Some(p) => format!("; resume with --resume {}", p.display()),
                        None => "; no checkpoint was requested".into(),
                    }
                ))))
            }
        }
    } else {
        let opts = CensusOptions { orbit: *opts, checkpoint: policy, resume: args.resume };
        orbits::census_2dim_with(m, &opts, &mut |c| progress(c))?
    };
    if let Some(path) = &args.save_table {
        let json = serde_json::to_string_pretty(&CensusFile::from_classes(m, 2, &classes)).map_err(Error::from)?;
        std::fs::write(path, json + "\n")?;
    }
    let comparison = if m == 6 { published::compare_census(&classes) } else { Vec::new() };
    output::census(&class_rows(&classes, None), &comparison, format)?;
    if m == 6 {
        report_comparisons(&comparison)?;
    }
    Ok(())
}

fn progress(c: &orbits::OrbitClass) {
    eprintln!("class {} {} size {}", c.representative, c.rank_seq, c.cardinality);
}

fn cmd_verify(file: &Path, format: Format, policy: ExecPolicy) -> CmdResult {
    let r = AlternatingAlgebra::load(file)?;
    let bibrace = algebra::check_bibrace(&r, policy)?;
    let alternating = algebra::check_alternating_nilpotent(&r, policy);
    let roundtrip = algebra::product_roundtrip(&r);
    let ann = r.annihilator();
    let sq = r.square();
    let square_in_ann = sq.is_subspace_of(&ann);
    let square_dim_ok = sq.dim() == r.defining_span().dim();
    output::verify(&r, &bibrace, alternating, roundtrip, ann.dim(), sq.dim(), format)?;
    let mut failed = Vec::new();
    if !bibrace.is_bibrace() {
        failed.push("bibrace identities");
    }
    if !alternating {
        failed.push("alternating/nilpotency laws");
    }
    if !roundtrip {
        failed.push("product recovery from the circle operation");
    }
    if !square_in_ann {
        failed.push("R² ⊆ Ann(R)");
    }
    if !square_dim_ok {
        failed.push("dim R² = dim of the defining span");
    }
    if r.is_nondegenerate() && ann.dim() != r.d() {
        failed.push("Ann(R) = 0 ⊕ W for nondegenerate R");
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Property(format!("failed: {}", failed.join(", "))))
    }
}

fn cmd_iso(first: &Path, second: &Path, format: Format) -> CmdResult {
    let r1 = AlternatingAlgebra::load(first)?;
    let r2 = AlternatingAlgebra::load(second)?;
    let result = algebra::are_isomorphic(&r1, &r2)?;
    output::iso(&result, format)?;
    if result.isomorphic {
        Ok(())
    } else {
        Err(Failure::Property("not isomorphic".into()))
    }
}

fn cmd_ranks(s: &SkewSpace, sub: Option<usize>, format: Format) -> CmdResult {
    if s.dim() == 0 {
        return Err(Error::Precondition("the zero space has an empty rank sequence".into()).into());
    }
    let profiles = match sub {
        Some(j) if j == 0 || j > s.dim() => {
            return Err(Error::Precondition(format!("--sub must lie in 1..={}", s.dim())).into())
        }
        Some(j) => Some(s.subspace_rank_profiles(j)),
        None => None,
    };
    output::ranks(s, &s.rank_sequence(), profiles.as_ref(), format)?;
    Ok(())
}

fn cmd_orbit(s: &SkewSpace, format: Format, opts: &OrbitOptions) -> CmdResult {
    let class = orbits::orbit_of(s, opts)?;
    output::classes(&class_rows(std::slice::from_ref(&class), None), None, format)?;
    Ok(())
}
