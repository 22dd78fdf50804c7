//! Argument parsing and command dispatch.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pasp_core::bench::Dataset;
use pasp_core::credal::{Engine, Mode, SolveOptions, DEFAULT_MAX_PROB_FACTS};
use pasp_core::ground::{build_call_graph, build_dependency_graph, ground_program};
use pasp_core::residual::{encode_probabilistic_facts, extract_residual};
use pasp_core::stable::DEFAULT_MAX_UNDEFINED;
use pasp_core::{render_program, Program, Query};

use crate::error::CliError;
use crate::io::{read_program, read_query, write_file};
use crate::pipeline::{evaluate, Request, StageTimes};
use crate::runner::{run_benchmark, write_csv, BenchConfig};

#[derive(Debug, Parser)]
#[command(name = "pasp", version, about = "Credal inference for probabilistic answer set programs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the probability interval of a query.
    Solve(SolveArgs),
    /// Print the residual program of a query.
    Residual(QueryArgs),
    /// Print tree-decomposition statistics of a program.
    Stats(StatsArgs),
    /// Run the generated benchmark and write CSV.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Direct,
    Residual,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Direct => Mode::Direct,
            ModeArg::Residual => Mode::Residual,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Enum,
    Twoamc,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Enum => Engine::Enum,
            EngineArg::Twoamc => Engine::TwoAmc,
        }
    }
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    /// Program file.
    pub input: PathBuf,
    /// Ground query atom, e.g. `path(a,d)`.
    #[arg(long)]
    pub query: String,
    /// Write DOT call and dependency graphs into this directory.
    #[arg(long, value_name = "DIR", num_args = 0..=1, default_missing_value = ".")]
    pub emit_graphs: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Limits {
    #[arg(long, default_value_t = DEFAULT_MAX_PROB_FACTS)]
    pub max_prob_facts: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_UNDEFINED)]
    pub max_undefined: usize,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub target: QueryArgs,
    #[arg(long, value_enum, default_value = "residual")]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value = "enum")]
    pub engine: EngineArg,
    #[command(flatten)]
    pub limits: Limits,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    pub input: PathBuf,
    /// With a query and `--mode residual`, measure the residual program.
    #[arg(long)]
    pub query: Option<String>,
    #[arg(long, value_enum, default_value = "residual")]
    pub mode: ModeArg,
    #[arg(long, value_name = "DIR", num_args = 0..=1, default_missing_value = ".")]
    pub emit_graphs: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Comma-separated datasets: reachBA, reachGrid, smokersBA, smokersGrid.
    #[arg(long, value_delimiter = ',', default_value = "reachBA,reachGrid,smokersBA,smokersGrid")]
    pub datasets: Vec<Dataset>,
    /// Comma-separated instance sizes (nodes for BA, grid side for grids).
    #[arg(long, value_delimiter = ',', default_value = "3")]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    pub runs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Only this mode; both when omitted.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long, value_enum, default_value = "enum")]
    pub engine: EngineArg,
    /// Per-instance time budget in seconds.
    #[arg(long)]
    pub timeout: Option<f64>,
    #[command(flatten)]
    pub limits: Limits,
    /// CSV destination; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write every time column as 0 so repeated runs compare equal.
    #[arg(long)]
    pub no_timings: bool,
    #[arg(long, value_name = "DIR", num_args = 0..=1, default_missing_value = "graphs")]
    pub emit_graphs: Option<PathBuf>,
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error[{}]: {e}", e.code());
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        Command::Solve(a) => solve(a, out, err),
        Command::Residual(a) => residual(a, out),
        Command::Stats(a) => stats(a, out),
        Command::Bench(a) => bench(a, out),
    }
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::Write {
        path: PathBuf::from("<stdout>"),
        source: e,
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

fn graphs(dir: &Path, stem: &str, p: &Program) -> Result<(), CliError> {
    write_file(&dir.join(format!("{stem}.call.dot")), &build_call_graph(p).to_dot())?;
    let (rules, _) = encode_probabilistic_facts(p)?;
    let g = ground_program(&rules);
    write_file(&dir.join(format!("{stem}.dependency.dot")), &build_dependency_graph(&g).to_dot(&g))
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "program".into())
}

fn print_times(err: &mut dyn Write, t: &StageTimes) -> Result<(), CliError> {
    let ms = |d: Duration| d.as_secs_f64() * 1e3;
    writeln!(
        err,
        "parse_ms={:.3} residual_ms={:.3} ground_ms={:.3} solve_ms={:.3} total_ms={:.3}",
        ms(t.parse),
        ms(t.residual),
        ms(t.ground),
        ms(t.solve),
        ms(t.total)
    )
    .map_err(io_err)
}

fn solve(a: SolveArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let text = read_text(&a.target.input)?;
    let query: Query = read_query(&a.target.query)?;
    let report = evaluate(&Request {
        text: &text,
        query: &query,
        mode: a.mode.into(),
        engine: a.engine.into(),
        options: SolveOptions {
            max_prob_facts: a.limits.max_prob_facts,
            max_undefined: a.limits.max_undefined,
            interrupt: None,
        },
    });
    if let (Some(dir), Some(p)) = (&a.target.emit_graphs, &report.solved) {
        graphs(dir, &stem(&a.target.input), p)?;
    }
    let bounds = report.outcome?;
    print_times(err, &report.times)?;
    writeln!(out, "P({}) = {bounds}", query.atom).map_err(io_err)
}

fn residual(a: QueryArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let program = read_program(&a.input)?;
    let query = read_query(&a.query)?;
    let r = extract_residual(&program, &query)?;
    if let Some(dir) = &a.emit_graphs {
        graphs(dir, &format!("{}.residual", stem(&a.input)), &r.program)?;
    }
    write!(out, "{}", render_program(&r.program)).map_err(io_err)?;
    writeln!(out, "% query {}: {}", query.atom, r.query_status).map_err(io_err)
}

fn stats(a: StatsArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let program = read_program(&a.input)?;
    let target = match (&a.query, a.mode) {
        (Some(q), ModeArg::Residual) => extract_residual(&program, &read_query(q)?)?.program,
        (Some(q), ModeArg::Direct) => {
            read_query(q)?;
            program
        }
        (None, _) => program,
    };
    if let Some(dir) = &a.emit_graphs {
        graphs(dir, &stem(&a.input), &target)?;
    }
    let (rules, _) = encode_probabilistic_facts(&target)?;
    let g = ground_program(&rules);
    let s = pasp_core::bench::ground_stats(&g);
    writeln!(
        out,
        "prob_facts: {}\nground_rules: {}\nbags: {}\nwidth_ub: {}\nvertices: {}",
        target.prob_facts().len(),
        g.rules().len(),
        s.bag_count,
        s.width_upper_bound,
        s.vertex_count
    )
    .map_err(io_err)
}

fn bench(a: BenchArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if let Some(t) = a.timeout {
        if !(t.is_finite() && t >= 0.0) {
            return Err(CliError::Usage(format!("invalid timeout {t}")));
        }
    }
    let cfg = BenchConfig {
        datasets: a.datasets,
        sizes: a.sizes,
        runs: a.runs,
        seed: a.seed,
        modes: match a.mode {
            Some(m) => vec![m.into()],
            None => vec![Mode::Direct, Mode::Residual],
        },
        engine: a.engine.into(),
        timeout: a.timeout.map(Duration::from_secs_f64),
        max_prob_facts: a.limits.max_prob_facts,
        max_undefined: a.limits.max_undefined,
        graph_dir: a.emit_graphs,
    };
    let rows = run_benchmark(&cfg)?;
    match &a.out {
        Some(path) => {
            let file = File::create(path).map_err(|source| CliError::Write {
                path: path.clone(),
                source,
            })?;
            write_csv(&rows, !a.no_timings, BufWriter::new(file))
        }
        None => write_csv(&rows, !a.no_timings, out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    fn call(args: &[&str]) -> (u8, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("pasp").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_exit_with_one() {
        assert_eq!(call(&["solve"]).0, 1);
        assert_eq!(call(&["frobnicate"]).0, 1);
        assert_eq!(call(&["bench", "--datasets", "nope"]).0, 1);
        assert_eq!(call(&["--help"]).0, 0);
    }

    #[test]
    fn missing_file() {
        let (code, _, err) = call(&["solve", "/nonexistent/x.pasp", "--query", "q"]);
        assert_eq!(code, 1);
        assert!(err.starts_with("error[io]:"), "{err}");
    }
}
