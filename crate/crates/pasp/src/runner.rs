//! Direct-versus-residual benchmark over the generated datasets.

use std::io::Write;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use pasp_core::bench::{generate, Dataset};
use pasp_core::credal::{Engine, Mode, ProbabilityInterval, SolveOptions, DEFAULT_MAX_PROB_FACTS};
use pasp_core::ground::{build_call_graph, build_dependency_graph, ground_program};
use pasp_core::residual::encode_probabilistic_facts;
use pasp_core::stable::DEFAULT_MAX_UNDEFINED;
use pasp_core::{render_program, Error, Program};
use rayon::prelude::*;

use crate::error::CliError;
use crate::io::write_file;
use crate::pipeline::{evaluate, Request, SolvedSize, StageTimes};

pub const HEADER: [&str; 16] = [
    "dataset",
    "size",
    "run",
    "mode",
    "engine",
    "parse_ms",
    "ground_ms",
    "residual_ms",
    "solve_ms",
    "total_ms",
    "lower",
    "upper",
    "bags",
    "width_ub",
    "vertices",
    "status",
];

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub datasets: Vec<Dataset>,
    pub sizes: Vec<usize>,
    pub runs: usize,
    pub seed: u64,
    pub modes: Vec<Mode>,
    pub engine: Engine,
    /// Per-instance budget, covering every stage.
    pub timeout: Option<Duration>,
    pub max_prob_facts: usize,
    pub max_undefined: usize,
    /// Write DOT call and dependency graphs of each solved program here.
    pub graph_dir: Option<PathBuf>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            datasets: Dataset::ALL.to_vec(),
            sizes: vec![3],
            runs: 10,
            seed: 0,
            modes: vec![Mode::Direct, Mode::Residual],
            engine: Engine::Enum,
            timeout: None,
            max_prob_facts: DEFAULT_MAX_PROB_FACTS,
            max_undefined: DEFAULT_MAX_UNDEFINED,
            graph_dir: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Timeout,
    Error,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Timeout => "timeout",
            Status::Error => "error",
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub dataset: Dataset,
    pub size: usize,
    pub run: usize,
    pub mode: Mode,
    pub engine: Engine,
    pub times: StageTimes,
    pub bounds: Option<ProbabilityInterval>,
    pub solved: Option<SolvedSize>,
    pub status: Status,
    pub error: Option<Error>,
}

pub fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Direct => "direct",
        Mode::Residual => "residual",
    }
}

pub fn engine_name(engine: Engine) -> &'static str {
    match engine {
        Engine::Enum => "enum",
        Engine::TwoAmc => "twoamc",
    }
}

fn ms(d: Duration) -> String {
    format!("{:.3}", d.as_secs_f64() * 1e3)
}

impl BenchRow {
    /// CSV fields in [`HEADER`] order. Without `timings` every time column
    /// is written as `0`, which makes the output reproducible byte for byte.
    pub fn record(&self, timings: bool) -> Vec<String> {
        let t = |d: Duration| if timings { ms(d) } else { "0".to_string() };
        let opt = |v: Option<String>| v.unwrap_or_default();
        let stats = self.solved.map(|s| s.stats);
        vec![
            self.dataset.name().to_string(),
            self.size.to_string(),
            self.run.to_string(),
            mode_name(self.mode).to_string(),
            engine_name(self.engine).to_string(),
            t(self.times.parse),
            t(self.times.ground),
            t(self.times.residual),
            t(self.times.solve),
            t(self.times.total),
            opt(self.bounds.map(|b| b.lower.to_string())),
            opt(self.bounds.map(|b| b.upper.to_string())),
            opt(stats.map(|s| s.bag_count.to_string())),
            opt(stats.map(|s| s.width_upper_bound.to_string())),
            opt(stats.map(|s| s.vertex_count.to_string())),
            self.status.as_str().to_string(),
        ]
    }
}

struct Job {
    dataset: Dataset,
    size: usize,
    run: usize,
    mode: Mode,
}

/// Runs every `(dataset, size, run, mode)` combination. Instances are
/// evaluated in parallel; rows come back in that lexicographic order.
pub fn run_benchmark(cfg: &BenchConfig) -> Result<Vec<BenchRow>, CliError> {
    let mut jobs = Vec::new();
    for &dataset in &cfg.datasets {
        for &size in &cfg.sizes {
            for run in 0..cfg.runs {
                for &mode in &cfg.modes {
                    jobs.push(Job { dataset, size, run, mode });
                }
            }
        }
    }
    let rows: Vec<(BenchRow, Option<Program>)> = jobs.par_iter().map(|job| run_job(cfg, job)).collect();
    if let Some(dir) = &cfg.graph_dir {
        for (row, program) in &rows {
            if let Some(p) = program {
                emit_graphs(dir, row, p)?;
            }
        }
    }
    Ok(rows.into_iter().map(|(row, _)| row).collect())
}

fn run_job(cfg: &BenchConfig, job: &Job) -> (BenchRow, Option<Program>) {
    let mut row = BenchRow {
        dataset: job.dataset,
        size: job.size,
        run: job.run,
        mode: job.mode,
        engine: cfg.engine,
        times: StageTimes::default(),
        bounds: None,
        solved: None,
        status: Status::Error,
        error: None,
    };
    let instance = match generate(job.dataset, job.size, job.run, cfg.seed) {
        Ok(i) => i,
        Err(e) => {
            row.error = Some(e);
            return (row, None);
        }
    };
    let text = render_program(&instance.program);
    let deadline = cfg.timeout.map(|t| Instant::now() + t);
    let expired = move || deadline.is_some_and(|d| Instant::now() >= d);
    let report = evaluate(&Request {
        text: &text,
        query: &instance.query,
        mode: job.mode,
        engine: cfg.engine,
        options: SolveOptions {
            max_prob_facts: cfg.max_prob_facts,
            max_undefined: cfg.max_undefined,
            interrupt: Some(&expired),
        },
    });
    row.times = report.times;
    row.solved = report.size;
    match report.outcome {
        Ok(b) => {
            row.bounds = Some(b);
            row.status = Status::Ok;
        }
        Err(Error::Interrupted) => {
            row.status = Status::Timeout;
            row.error = Some(Error::Interrupted);
        }
        Err(e) => row.error = Some(e),
    }
    (row, report.solved)
}

fn emit_graphs(dir: &std::path::Path, row: &BenchRow, p: &Program) -> Result<(), CliError> {
    let stem = format!("{}-{}-{}-{}", row.dataset, row.size, row.run, mode_name(row.mode));
    write_file(&dir.join(format!("{stem}.call.dot")), &build_call_graph(p).to_dot())?;
    let (rules, _) = encode_probabilistic_facts(p)?;
    let g = ground_program(&rules);
    write_file(&dir.join(format!("{stem}.dependency.dot")), &build_dependency_graph(&g).to_dot(&g))
}

pub fn write_csv<W: Write>(rows: &[BenchRow], timings: bool, out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in rows {
        w.write_record(r.record(timings))?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> BenchConfig {
        BenchConfig {
            datasets: vec![Dataset::ReachGrid, Dataset::SmokersBa],
            sizes: vec![2, 3],
            runs: 2,
            ..BenchConfig::default()
        }
    }

    #[test]
    fn rows_in_order_and_modes_agree() {
        let rows = run_benchmark(&small()).unwrap();
        assert_eq!(rows.len(), 2 * 2 * 2 * 2);
        let keys: Vec<_> = rows.iter().map(|r| (r.dataset, r.size, r.run, mode_name(r.mode))).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        for pair in rows.chunks(2) {
            let (d, r) = (&pair[0], &pair[1]);
            if d.dataset == Dataset::SmokersBa && d.size == 2 {
                assert_eq!(d.status, Status::Error);
                continue;
            }
            assert_eq!((d.status, r.status), (Status::Ok, Status::Ok));
            assert!(d.bounds.unwrap().approx_eq(&r.bounds.unwrap(), 1e-9));
        }
    }

    #[test]
    fn csv_without_timings_is_stable() {
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_csv(&run_benchmark(&small()).unwrap(), false, &mut a).unwrap();
        write_csv(&run_benchmark(&small()).unwrap(), false, &mut b).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert_eq!(text.lines().next().unwrap(), HEADER.join(","));
    }

    #[test]
    fn timeout_is_recorded() {
        let cfg = BenchConfig {
            datasets: vec![Dataset::ReachBa],
            sizes: vec![8],
            runs: 1,
            modes: vec![Mode::Direct],
            timeout: Some(Duration::ZERO),
            ..BenchConfig::default()
        };
        let rows = run_benchmark(&cfg).unwrap();
        assert_eq!(rows[0].status, Status::Timeout);
        assert_eq!(rows[0].record(true)[15], "timeout");
    }
}
