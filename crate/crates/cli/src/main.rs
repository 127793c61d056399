use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use coxrep_core::cover::CoveredGraph;
use coxrep_core::graph::CoxeterGraph;
use coxrep_core::pipeline::{self, BuildOptions, PipelineError};
use coxrep_core::rep::Family;
use coxrep_core::verify::SuiteConfig;

#[derive(Parser)]
#[command(
    name = "coxrep",
    version,
    about = "Exact infinite-dimensional representations of Coxeter groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Pi1,
    Cover,
    Pgl,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::Pi1 => Family::Pi1,
            FamilyArg::Cover => Family::Cover,
            FamilyArg::Pgl => Family::Pgl,
        }
    }
}

#[derive(clap::Args)]
struct RepArgs {
    file: PathBuf,
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Core window `W` (pi1, pgl).
    #[arg(long)]
    window: Option<usize>,
    /// Core depth `D` (cover).
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    buffer: Option<usize>,
    /// First special edge, traversed from the first vertex to the second.
    #[arg(long, num_args = 2, value_names = ["TAIL", "HEAD"])]
    edge1: Option<Vec<String>>,
    #[arg(long, num_args = 2, value_names = ["TAIL", "HEAD"])]
    edge2: Option<Vec<String>>,
    /// Distinguished edge `s1 s2` of the covering family.
    #[arg(long, num_args = 2, value_names = ["S1", "S2"])]
    special: Option<Vec<String>>,
    #[arg(long, default_value_t = SuiteConfig::default().seed)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Summarize a graph and recommend a construction.
    Analyze { file: PathBuf },
    /// Build a representation and run the verification suite.
    Verify {
        #[command(flatten)]
        rep: RepArgs,
        /// Write the JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Flip the sign of one table entry before verifying.
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Dump the generator action tables.
    Build {
        #[command(flatten)]
        rep: RepArgs,
    },
    /// Dump the truncated universal covering.
    Cover {
        file: PathBuf,
        #[arg(long, num_args = 2, value_names = ["S1", "S2"], required = true)]
        edge: Vec<String>,
        #[arg(long)]
        depth: usize,
    },
}

/// Input or usage problems; exit code 2.
struct InputError(anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.into())
    }
}

fn load(path: &Path) -> Result<(String, CoxeterGraph), InputError> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let g = CoxeterGraph::parse(&text).with_context(|| format!("parsing {}", path.display()))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok((name, g))
}

fn pair(v: &Option<Vec<String>>) -> Option<(String, String)> {
    v.as_ref().map(|p| (p[0].clone(), p[1].clone()))
}

fn options(args: &RepArgs) -> BuildOptions {
    BuildOptions {
        family: args.family.into(),
        window: args.window,
        depth: args.depth,
        buffer: args.buffer,
        edge1: pair(&args.edge1),
        edge2: pair(&args.edge2),
        special: pair(&args.special),
    }
}

fn build(args: &RepArgs) -> Result<(String, pipeline::Built), InputError> {
    let (name, g) = load(&args.file)?;
    let built = pipeline::build(&g, &options(args), args.seed)
        .map_err(|e: PipelineError| InputError(e.into()))?;
    Ok((name, built))
}

fn run(cli: Cli) -> Result<ExitCode, InputError> {
    match cli.command {
        Command::Analyze { file } => {
            let (_, g) = load(&file)?;
            print!("{}", pipeline::analyze(&g)?.render());
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            rep,
            json,
            inject_fault,
        } => {
            let (name, mut built) = build(&rep)?;
            if inject_fault {
                let first = built.rep.core_indices()[0];
                built.rep.corrupt_sign(0, &first);
            }
            let report = pipeline::report_for(&name, &built, &SuiteConfig { seed: rep.seed });
            if let Some(out) = json {
                fs::write(&out, report.to_json())
                    .with_context(|| format!("writing {}", out.display()))?;
            }
            print!("{}", report.summary());
            Ok(if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Build { rep } => {
            let (_, built) = build(&rep)?;
            print!("{}", built.rep.dump());
            Ok(ExitCode::SUCCESS)
        }
        Command::Cover { file, edge, depth } => {
            let (_, g) = load(&file)?;
            let cover = CoveredGraph::build(&g, g.vertex(&edge[0])?, g.vertex(&edge[1])?, depth)?;
            print!("{}", cover.dump());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(InputError(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
