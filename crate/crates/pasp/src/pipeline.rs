//! One query evaluated end to end, with per-stage wall times.

use std::time::{Duration, Instant};

use pasp_core::bench::{ground_stats, DecompositionStats};
use pasp_core::credal::{Engine, Mode, PreparedQuery, ProbabilityInterval, SolveOptions};
use pasp_core::residual::{check_olon_free, extract_residual, QueryStatus};
use pasp_core::{parse_program, Error, Program, Query};

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StageTimes {
    pub parse: Duration,
    pub residual: Duration,
    pub ground: Duration,
    pub solve: Duration,
    pub total: Duration,
}

/// Size of the program handed to the solver.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolvedSize {
    pub prob_facts: usize,
    pub ground_rules: usize,
    pub stats: DecompositionStats,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub times: StageTimes,
    /// `None` when the pipeline stopped before grounding.
    pub size: Option<SolvedSize>,
    /// Set in residual mode once the residual has been extracted.
    pub query_status: Option<QueryStatus>,
    /// The program handed to the solver (empty for a decided query).
    pub solved: Option<Program>,
    pub outcome: Result<ProbabilityInterval, Error>,
}

pub struct Request<'a> {
    pub text: &'a str,
    pub query: &'a Query,
    pub mode: Mode,
    pub engine: Engine,
    pub options: SolveOptions<'a>,
}

/// Parses `text`, optionally extracts the residual program, grounds and
/// solves. Failures end up in [`Report::outcome`].
pub fn evaluate(req: &Request<'_>) -> Report {
    let start = Instant::now();
    let mut report = Report {
        times: StageTimes::default(),
        size: None,
        query_status: None,
        solved: None,
        outcome: Err(Error::Internal("not evaluated".into())),
    };
    let result = run(req, &mut report, start);
    report.times.total = start.elapsed();
    report.outcome = result;
    report
}

fn run(req: &Request<'_>, report: &mut Report, start: Instant) -> Result<ProbabilityInterval, Error> {
    let program = parse_program(req.text)?;
    report.times.parse = start.elapsed();
    check_olon_free(&program)?;

    let target: Program = match req.mode {
        Mode::Direct => program,
        Mode::Residual => {
            let t = Instant::now();
            let r = extract_residual(&program, req.query)?;
            report.times.residual = t.elapsed();
            report.query_status = Some(r.query_status);
            match r.query_status {
                QueryStatus::Undefined => r.program,
                decided => {
                    report.size = Some(SolvedSize::default());
                    report.solved = Some(Program::default());
                    let p = if decided == QueryStatus::CertainTrue { 1.0 } else { 0.0 };
                    return Ok(ProbabilityInterval::point(p));
                }
            }
        }
    };

    report.solved = Some(target.clone());
    let t = Instant::now();
    let prepared = PreparedQuery::new(&target, req.query)?;
    report.times.ground = t.elapsed();
    report.size = Some(SolvedSize {
        prob_facts: prepared.prob_fact_count(),
        ground_rules: prepared.ground().rules().len(),
        stats: ground_stats(prepared.ground()),
    });

    let t = Instant::now();
    let bounds = prepared.bounds(req.engine, &req.options);
    report.times.solve = t.elapsed();
    bounds
}
