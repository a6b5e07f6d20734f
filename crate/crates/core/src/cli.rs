//! Command-line driver: `trrg`, `tester`, `cases` and `run` subcommands.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::determinize::{DeterministicModel, DeterminizeError};
use crate::dot::{emit_decorated, emit_model, emit_tester, parse_model_text, DotError};
use crate::graph::{TesterGraph, Witness};
use crate::harness::{run_suite, ChoicePolicy, SuiteSummary};
use crate::model::{validate_model, TimedModel};
use crate::refusal::decorate;
use crate::testcase::{concretize_all, format_cases, parse_cases, select_cases, Strategy, TimedTestCase};
use crate::tester::{build_tester, completeness_check};
use crate::trrg::build_trrg_with_model;

pub mod exit {
    pub const OK: i32 = 0;
    pub const IO: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const PARSE: i32 = 3;
    pub const VALIDATION: i32 = 4;
    pub const NONDETERMINISM: i32 = 5;
    pub const INCOMPLETE: i32 = 6;
    pub const CONFORMANCE: i32 = 7;
}

#[derive(Debug, Parser)]
#[command(name = "trrg", version, about = "Canonical testers and timed test cases for durational timed automata")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the timed refusals region graph as <stem>.trrg.dot
    Trrg(PipelineArgs),
    /// Write the canonical tester as <stem>.tester.dot
    Tester(PipelineArgs),
    /// Write timed test cases as <stem>.cases
    Cases(PipelineArgs),
    /// Run test cases against an implementation model and write <stem>.report.txt/.json
    Run(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteKind {
    /// One case per uncovered tester edge
    Cover,
    /// Every path up to the depth bound
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyKind {
    First,
    Seeded,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    /// Specification model in DOT
    pub input: PathBuf,
    /// Output directory
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Maximal number of steps per test case
    #[arg(long, default_value_t = 6)]
    pub depth: usize,
    /// Leave out cases ending with a refused action
    #[arg(long)]
    pub no_fail_probes: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write the determinized and decorated models
    #[arg(long)]
    pub emit_intermediates: bool,
    #[arg(long, value_enum, default_value_t = SuiteKind::Cover)]
    pub suite: SuiteKind,
    #[arg(long, hide = true)]
    pub inject_gap: bool,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    /// Implementation model in DOT
    #[arg(long = "impl")]
    pub implementation: PathBuf,
    /// Test-case file to run instead of generating one
    #[arg(long)]
    pub cases: Option<PathBuf>,
    /// How a nondeterministic implementation resolves choices
    #[arg(long, value_enum, default_value_t = PolicyKind::First)]
    pub policy: PolicyKind,
}

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

impl From<DotError> for Failure {
    fn from(e: DotError) -> Self {
        let code = match e {
            DotError::Invalid(_) => exit::VALIDATION,
            _ => exit::PARSE,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<DeterminizeError> for Failure {
    fn from(e: DeterminizeError) -> Self {
        let code = match e {
            DeterminizeError::Invalid(_) => exit::VALIDATION,
            DeterminizeError::UnsupportedNondeterminism { .. } => exit::NONDETERMINISM,
        };
        Failure::new(code, e.to_string())
    }
}

fn stem(path: &Path) -> String {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "model".into());
    name.strip_suffix(".dot").map(str::to_string).unwrap_or(name)
}

pub fn load_model(path: &Path) -> Result<TimedModel, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::new(exit::IO, format!("{}: {e}", path.display())))?;
    let m = parse_model_text(&text).map_err(|e| {
        let f = Failure::from(e);
        Failure::new(f.code, format!("{}: {}", path.display(), f.message))
    })?;
    for d in validate_model(&m) {
        eprintln!("{}: {d}", path.display());
    }
    Ok(m)
}

/// Everything derived from a model up to the canonical tester.
pub struct Artifacts {
    pub model: TimedModel,
    pub determinized: DeterministicModel,
    pub trrg: TesterGraph,
    pub tester: TesterGraph,
}

pub fn build_artifacts(model: TimedModel) -> Result<Artifacts, Failure> {
    let (determinized, trrg) = build_trrg_with_model(&model)?;
    let tester = build_tester(trrg.clone()).map_err(|e| Failure::new(exit::INCOMPLETE, e.to_string()))?;
    Ok(Artifacts { model, determinized, trrg, tester })
}

fn inject_gap(t: &mut TesterGraph) {
    if let Some(i) = t.edges().iter().position(|e| t.is_fail(e.target) || e.witness == Witness::Any) {
        t.remove_edge(i);
    } else if !t.edges().is_empty() {
        t.remove_edge(0);
    }
}

fn checked_tester(a: &mut Artifacts, args: &PipelineArgs) -> Result<(), Failure> {
    if args.inject_gap {
        inject_gap(&mut a.tester);
    }
    let gaps = completeness_check(&a.tester);
    if gaps.is_empty() {
        return Ok(());
    }
    let lines: Vec<String> = gaps.iter().map(|g| format!("  {g}")).collect();
    Err(Failure::new(exit::INCOMPLETE, format!("tester is incomplete:\n{}", lines.join("\n"))))
}

pub fn suite_for(a: &Artifacts, args: &PipelineArgs) -> Vec<TimedTestCase> {
    let strategy = match args.suite {
        SuiteKind::Cover => Strategy::EdgeCover,
        SuiteKind::All => Strategy::AllPaths,
    };
    let cases = select_cases(&a.tester, strategy, args.depth, !args.no_fail_probes);
    concretize_all(&a.tester, &cases)
}

struct Writer<'a> {
    dir: &'a Path,
    files: Vec<(PathBuf, String)>,
}

impl Writer<'_> {
    fn add(&mut self, name: String, contents: String) {
        self.files.push((self.dir.join(name), contents));
    }

    fn flush(self) -> Result<(), Failure> {
        fs::create_dir_all(self.dir).map_err(|e| Failure::new(exit::IO, format!("{}: {e}", self.dir.display())))?;
        for (path, contents) in self.files {
            fs::write(&path, contents).map_err(|e| Failure::new(exit::IO, format!("{}: {e}", path.display())))?;
            eprintln!("wrote {}", path.display());
        }
        Ok(())
    }
}

fn intermediates(w: &mut Writer, a: &Artifacts, stem: &str) {
    let deco = decorate(&a.determinized);
    w.add(format!("{stem}.det.dot"), emit_model(&a.determinized.model).to_string());
    w.add(format!("{stem}.decorated.dot"), emit_decorated(&a.determinized, &deco).to_string());
}

fn execute(cli: Cli) -> Result<i32, Failure> {
    let (args, run) = match &cli.command {
        Command::Trrg(p) | Command::Tester(p) | Command::Cases(p) => (p, None),
        Command::Run(r) => (&r.pipeline, Some(r)),
    };
    let stem = stem(&args.input);
    let mut a = build_artifacts(load_model(&args.input)?)?;
    let mut w = Writer { dir: &args.out, files: Vec::new() };
    if args.emit_intermediates {
        intermediates(&mut w, &a, &stem);
    }
    let mut code = exit::OK;
    match &cli.command {
        Command::Trrg(_) => w.add(format!("{stem}.trrg.dot"), emit_tester(&a.trrg).to_string()),
        Command::Tester(_) => {
            checked_tester(&mut a, args)?;
            w.add(format!("{stem}.tester.dot"), emit_tester(&a.tester).to_string());
        }
        Command::Cases(_) => {
            checked_tester(&mut a, args)?;
            w.add(format!("{stem}.cases"), format_cases(&suite_for(&a, args)));
        }
        Command::Run(_) => {
            let run = run.expect("run arguments");
            checked_tester(&mut a, args)?;
            let imp = load_model(&run.implementation)?;
            let suite = match &run.cases {
                Some(path) => {
                    let text = fs::read_to_string(path)
                        .map_err(|e| Failure::new(exit::IO, format!("{}: {e}", path.display())))?;
                    parse_cases(&text).map_err(|e| Failure::new(exit::PARSE, format!("{}: {e}", path.display())))?
                }
                None => suite_for(&a, args),
            };
            let policy = match run.policy {
                PolicyKind::First => ChoicePolicy::First,
                PolicyKind::Seeded => ChoicePolicy::Seeded(args.seed),
            };
            let summary: SuiteSummary = run_suite(&imp, &suite, &a.tester, policy);
            let last = summary.to_text().lines().last().unwrap_or_default().to_string();
            println!("{last}");
            w.add(format!("{stem}.report.txt"), summary.to_text());
            w.add(format!("{stem}.report.json"), summary.to_json());
            if summary.fail > 0 {
                code = exit::CONFORMANCE;
            }
        }
    }
    w.flush()?;
    Ok(code)
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::USAGE } else { exit::OK };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}
