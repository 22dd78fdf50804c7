//! Credal probability bounds.
//!
//! Two engines compute the same interval. [`Engine::Enum`] walks the worlds
//! and asks, per world, whether some answer set contains the query and
//! whether some answer set misses it. [`Engine::TwoAmc`] counts, per world,
//! the answer sets containing the query and all answer sets (the inner
//! semiring over `ℕ²`), maps the pair through [`f_transform`], and sums the
//! weighted results in the outer semiring over `[0,1]²`.
//!
//! Worlds are numbered so that probabilistic fact 0 (in canonical program
//! order) is the most significant bit of the world index. Sums always run
//! in increasing world order.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::ground::{detect_olon, ground_program, AtomId, CallGraph, GroundProgram};
use crate::residual::{check_olon_free, encode_probabilistic_facts, extract_residual, QueryStatus};
use crate::search::{pin_atom, unpinned, Goal, Interrupt, Searcher};
use crate::stable::{AnswerSet, DEFAULT_MAX_UNDEFINED};
use crate::syntax::{Program, Query};
use crate::wfs::Truth;

pub const DEFAULT_MAX_PROB_FACTS: usize = 25;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct World {
    pub selection: Vec<bool>,
}

impl World {
    /// World number `index` over `n` facts; fact 0 is the high bit.
    pub fn from_index(index: u64, n: usize) -> Self {
        World {
            selection: (0..n).map(|j| index >> (n - 1 - j) & 1 == 1).collect(),
        }
    }

    pub fn index(&self) -> u64 {
        self.selection.iter().fold(0, |acc, &b| acc << 1 | b as u64)
    }

    pub fn len(&self) -> usize {
        self.selection.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selection.is_empty()
    }

    /// `w<index> {selected atoms}`
    pub fn describe(&self, p: &Program) -> String {
        let atoms: Vec<String> = p
            .prob_facts()
            .iter()
            .zip(&self.selection)
            .filter(|(_, s)| **s)
            .map(|(f, _)| format!("{}", f.atom))
            .collect();
        format!("w{} {{{}}}", self.index(), atoms.join(", "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityInterval {
    pub lower: f64,
    pub upper: f64,
}

impl ProbabilityInterval {
    pub const fn point(p: f64) -> Self {
        ProbabilityInterval { lower: p, upper: p }
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self.lower - other.lower).abs() <= tol && (self.upper - other.upper).abs() <= tol
    }
}

impl fmt::Display for ProbabilityInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.6}, {:.6}]", self.lower, self.upper)
    }
}

/// A commutative semiring `(D, ⊕, ⊗, 0, 1)`.
pub trait Semiring: Copy {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(self, other: Self) -> Self;
    fn mul(self, other: Self) -> Self;
}

/// Inner value: `n1` answer sets contain the query, out of `n2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct InnerValue {
    pub n1: u64,
    pub n2: u64,
}

impl Semiring for InnerValue {
    fn zero() -> Self {
        InnerValue { n1: 0, n2: 0 }
    }
    fn one() -> Self {
        InnerValue { n1: 1, n2: 1 }
    }
    fn add(self, o: Self) -> Self {
        InnerValue {
            n1: self.n1 + o.n1,
            n2: self.n2 + o.n2,
        }
    }
    fn mul(self, o: Self) -> Self {
        InnerValue {
            n1: self.n1 * o.n1,
            n2: self.n2 * o.n2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OuterValue {
    pub lp: f64,
    pub up: f64,
}

impl Semiring for OuterValue {
    fn zero() -> Self {
        OuterValue { lp: 0.0, up: 0.0 }
    }
    fn one() -> Self {
        OuterValue { lp: 1.0, up: 1.0 }
    }
    fn add(self, o: Self) -> Self {
        OuterValue {
            lp: self.lp + o.lp,
            up: self.up + o.up,
        }
    }
    fn mul(self, o: Self) -> Self {
        OuterValue {
            lp: self.lp * o.lp,
            up: self.up * o.up,
        }
    }
}

/// `f(n1, n2) = ([n1 = n2], [n1 > 0])`
pub fn f_transform(v: InnerValue) -> OuterValue {
    OuterValue {
        lp: if v.n1 == v.n2 { 1.0 } else { 0.0 },
        up: if v.n1 > 0 { 1.0 } else { 0.0 },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Mode {
    Direct,
    #[default]
    Residual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Engine {
    #[default]
    Enum,
    TwoAmc,
}

#[derive(Clone, Copy)]
pub struct SolveOptions<'a> {
    /// Largest number of probabilistic facts in the program being solved.
    pub max_prob_facts: usize,
    /// Largest `|u(WFM)|` of a world whose answer sets are enumerated
    /// (2AMC engine only).
    pub max_undefined: usize,
    /// Polled during solving; returning `true` aborts with
    /// [`Error::Interrupted`].
    pub interrupt: Interrupt<'a>,
}

impl Default for SolveOptions<'_> {
    fn default() -> Self {
        SolveOptions {
            max_prob_facts: DEFAULT_MAX_PROB_FACTS,
            max_undefined: DEFAULT_MAX_UNDEFINED,
            interrupt: None,
        }
    }
}

impl fmt::Debug for SolveOptions<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SolveOptions")
            .field("max_prob_facts", &self.max_prob_facts)
            .field("max_undefined", &self.max_undefined)
            .field("interrupt", &self.interrupt.is_some())
            .finish()
    }
}

/// `Π_{selected} p · Π_{unselected} (1 − p)`, multiplied in fact order.
pub fn world_probability(p: &Program, w: &World) -> f64 {
    p.prob_facts()
        .iter()
        .zip(&w.selection)
        .fold(1.0, |acc, (f, &s)| acc * if s { f.prob } else { 1.0 - f.prob })
}

struct EncodedFactIds {
    atom: AtomId,
    complement: AtomId,
}

struct Walk {
    fixed: Vec<Option<bool>>,
    selection: Vec<Option<bool>>,
    lower: f64,
    upper: f64,
}

/// A program encoded and grounded for one query, ready to be solved.
pub struct PreparedQuery {
    program: Program,
    ground: GroundProgram,
    facts: Vec<EncodedFactIds>,
    query: Option<AtomId>,
    searcher: Searcher,
    /// Probabilistic fact encoded by each atom (either half of the pair).
    fact_of: Vec<Option<u32>>,
    rules_by_head: Vec<Vec<u32>>,
    olon_free: bool,
}

impl PreparedQuery {
    pub fn new(p: &Program, q: &Query) -> Result<Self> {
        let (rules, enc) = encode_probabilistic_facts(p)?;
        let ground = ground_program(&rules);
        let facts = enc
            .facts()
            .iter()
            .map(|f| {
                let id = |a| ground.lookup(a).ok_or_else(|| Error::Internal(format!("`{a}` missing from the grounding")));
                Ok(EncodedFactIds {
                    atom: id(&f.atom)?,
                    complement: id(&f.complement)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let query = ground.lookup(&q.atom);
        let searcher = Searcher::new(&ground);
        let mut fact_of = vec![None; ground.atom_count()];
        for (i, f) in facts.iter().enumerate() {
            fact_of[f.atom.index()] = Some(i as u32);
            fact_of[f.complement.index()] = Some(i as u32);
        }
        let mut rules_by_head = vec![Vec::new(); ground.atom_count()];
        for (i, r) in ground.rules().iter().enumerate() {
            rules_by_head[r.head.index()].push(i as u32);
        }
        let olon_free = detect_olon(&CallGraph::from_rules(&rules)).is_none();
        Ok(PreparedQuery {
            program: p.clone(),
            ground,
            facts,
            query,
            searcher,
            fact_of,
            rules_by_head,
            olon_free,
        })
    }

    pub fn prob_fact_count(&self) -> usize {
        self.facts.len()
    }

    pub fn program(&self) -> &Program {
        &self.program
    }

    /// Grounding of the encoded program.
    pub fn ground(&self) -> &GroundProgram {
        &self.ground
    }

    /// Saturates at `u64::MAX` beyond 63 facts.
    pub fn world_count(&self) -> u64 {
        1u64.checked_shl(self.facts.len() as u32).unwrap_or(u64::MAX)
    }

    fn pins(&self, w: &World) -> Vec<Option<bool>> {
        let mut fixed = unpinned(self.searcher.atom_count());
        for (f, &s) in self.facts.iter().zip(&w.selection) {
            pin_atom(&mut fixed, f.atom, s);
            pin_atom(&mut fixed, f.complement, !s);
        }
        fixed
    }

    fn worlds(&self) -> impl Iterator<Item = World> + '_ {
        (0..self.world_count()).map(|i| World::from_index(i, self.facts.len()))
    }

    fn undefined(&self, w: &World) -> Error {
        Error::CredalUndefined {
            world: w.describe(&self.program),
        }
    }

    /// All answer sets of world `w`, over the encoded grounding.
    pub fn world_answer_sets(&self, w: &World, opts: &SolveOptions<'_>) -> Result<Vec<AnswerSet>> {
        let mut fixed = self.pins(w);
        let undefined = self
            .searcher
            .wfm(&fixed)
            .iter()
            .filter(|v| **v == Truth::Undefined)
            .count();
        if undefined > opts.max_undefined {
            return Err(Error::TooManyUndefined {
                count: undefined,
                limit: opts.max_undefined,
            });
        }
        let mut out = Vec::new();
        self.searcher.for_each_model(&mut fixed, None, opts.interrupt, &mut |m| {
            out.push(AnswerSet {
                atoms: m
                    .iter()
                    .enumerate()
                    .filter(|(_, b)| **b)
                    .map(|(i, _)| AtomId(i as u32))
                    .collect(),
            });
            true
        })?;
        out.sort();
        Ok(out)
    }

    /// `(brave, cautious)` truth of the query under `fixed`, or `None` when
    /// no answer set agrees with the pins.
    fn brave_cautious(&self, fixed: &mut Vec<Option<bool>>, interrupt: Interrupt<'_>) -> Result<Option<(bool, bool)>> {
        let Some(q) = self.query else {
            let exists = self.searcher.find_model(fixed, None, interrupt)?.is_some();
            return Ok(exists.then_some((false, false)));
        };
        let goal = |holds| Some(Goal { atom: q.0, holds });
        let with_q = self.searcher.find_model(fixed, goal(true), interrupt)?.is_some();
        let without_q = self.searcher.find_model(fixed, goal(false), interrupt)?.is_some();
        Ok((with_q || without_q).then_some((with_q, !without_q)))
    }

    fn outer_weight(&self, w: &World) -> OuterValue {
        self.program
            .prob_facts()
            .iter()
            .zip(&w.selection)
            .fold(OuterValue::one(), |acc, (f, &s)| {
                let p = if s { f.prob } else { 1.0 - f.prob };
                acc.mul(OuterValue { lp: p, up: p })
            })
    }

    /// Fails without solving when the program has more than
    /// `opts.max_prob_facts` probabilistic facts.
    pub fn bounds(&self, engine: Engine, opts: &SolveOptions<'_>) -> Result<ProbabilityInterval> {
        let n = self.facts.len();
        if n > opts.max_prob_facts {
            return Err(Error::TooManyProbFacts {
                count: n,
                limit: opts.max_prob_facts,
            });
        }
        match engine {
            Engine::Enum => self.bounds_enumeration(opts),
            Engine::TwoAmc => self.bounds_2amc(opts),
        }
    }

    fn bounds_enumeration(&self, opts: &SolveOptions<'_>) -> Result<ProbabilityInterval> {
        if self.olon_free {
            return self.bounds_by_splitting(opts);
        }
        let (mut lower, mut upper) = (0.0, 0.0);
        for w in self.worlds() {
            let (brave, cautious) = self
                .brave_cautious(&mut self.pins(&w), opts.interrupt)?
                .ok_or_else(|| self.undefined(&w))?;
            let pw = world_probability(&self.program, &w);
            if cautious {
                lower += pw;
            }
            if brave {
                upper += pw;
            }
        }
        Ok(ProbabilityInterval { lower, upper })
    }

    /// World enumeration as a depth-first walk over the probabilistic
    /// facts. A partial selection whose well-founded model already decides
    /// the query settles every world extending it at once. Facts that the
    /// query no longer depends on are left out of the walk: their worlds
    /// share the query's status, and their probabilities sum to one.
    ///
    /// Requires an OLON-free program, so that every world has an answer set
    /// and the query's status only depends on the atoms it reaches.
    fn bounds_by_splitting(&self, opts: &SolveOptions<'_>) -> Result<ProbabilityInterval> {
        let Some(q) = self.query else {
            return Ok(ProbabilityInterval::point(0.0));
        };
        let mut walk = Walk {
            fixed: unpinned(self.searcher.atom_count()),
            selection: vec![None; self.facts.len()],
            lower: 0.0,
            upper: 0.0,
        };
        self.split(q, &mut walk, 1.0, opts.interrupt)?;
        Ok(ProbabilityInterval {
            lower: walk.lower,
            upper: walk.upper,
        })
    }

    fn split(&self, q: AtomId, walk: &mut Walk, weight: f64, interrupt: Interrupt<'_>) -> Result<()> {
        if interrupt.is_some_and(|f| f()) {
            return Err(Error::Interrupted);
        }
        let m = self.searcher.wfm(&walk.fixed);
        match m[q.index()] {
            Truth::True => {
                walk.lower += weight;
                walk.upper += weight;
                return Ok(());
            }
            Truth::False => return Ok(()),
            Truth::Undefined => {}
        }
        let Some(next) = self.nearest_open_fact(q, &m, &walk.selection) else {
            return self.settle(walk, weight, interrupt);
        };
        let prob = self.program.prob_facts()[next].prob;
        for selected in [false, true] {
            self.pin_fact(walk, next, Some(selected));
            let w = weight * if selected { prob } else { 1.0 - prob };
            let r = self.split(q, walk, w, interrupt);
            self.pin_fact(walk, next, None);
            r?;
        }
        Ok(())
    }

    /// Every fact the query still reaches is pinned: pin the rest to
    /// unselected and search.
    fn settle(&self, walk: &mut Walk, weight: f64, interrupt: Interrupt<'_>) -> Result<()> {
        let open: Vec<usize> = (0..self.facts.len()).filter(|&i| walk.selection[i].is_none()).collect();
        for &i in &open {
            self.pin_fact(walk, i, Some(false));
        }
        let outcome = self.brave_cautious(&mut walk.fixed, interrupt);
        let world = World {
            selection: walk.selection.iter().map(|s| s.unwrap_or(false)).collect(),
        };
        for &i in &open {
            self.pin_fact(walk, i, None);
        }
        let (brave, cautious) = outcome?.ok_or_else(|| self.undefined(&world))?;
        if cautious {
            walk.lower += weight;
        }
        if brave {
            walk.upper += weight;
        }
        Ok(())
    }

    fn pin_fact(&self, walk: &mut Walk, i: usize, selected: Option<bool>) {
        let f = &self.facts[i];
        walk.selection[i] = selected;
        walk.fixed[f.atom.index()] = selected.map(|s| !s);
        walk.fixed[f.complement.index()] = selected;
    }

    /// Unpinned fact closest to `q` in the dependency graph of the rules
    /// not yet blocked by `m`, restricted to undefined atoms.
    fn nearest_open_fact(&self, q: AtomId, m: &[Truth], selection: &[Option<bool>]) -> Option<usize> {
        let rules = self.ground.rules();
        let mut seen = vec![false; m.len()];
        let mut queue = VecDeque::from([q]);
        seen[q.index()] = true;
        while let Some(a) = queue.pop_front() {
            if let Some(i) = self.fact_of[a.index()] {
                if selection[i as usize].is_none() {
                    return Some(i as usize);
                }
            }
            for &r in &self.rules_by_head[a.index()] {
                let r = &rules[r as usize];
                let blocked = r.body.iter().any(|l| {
                    let v = m[l.atom.index()];
                    v == if l.negated { Truth::True } else { Truth::False }
                });
                if blocked {
                    continue;
                }
                for l in &r.body {
                    let b = l.atom.index();
                    if !seen[b] && m[b] == Truth::Undefined {
                        seen[b] = true;
                        queue.push_back(l.atom);
                    }
                }
            }
        }
        None
    }

    fn bounds_2amc(&self, opts: &SolveOptions<'_>) -> Result<ProbabilityInterval> {
        let mut total = OuterValue::zero();
        for w in self.worlds() {
            let sets = self.world_answer_sets(&w, opts)?;
            if sets.is_empty() {
                return Err(self.undefined(&w));
            }
            let inner = inner_count_ids(&self.ground, &sets, self.query);
            total = total.add(self.outer_weight(&w).mul(f_transform(inner)));
        }
        Ok(ProbabilityInterval {
            lower: total.lp,
            upper: total.up,
        })
    }
}

/// Sum over answer sets of the product of literal weights: `not q` weighs
/// `(0,1)`, every other literal `(1,1)`.
pub fn inner_count(g: &GroundProgram, sets: &[AnswerSet], q: &Query) -> InnerValue {
    inner_count_ids(g, sets, g.lookup(&q.atom))
}

fn inner_count_ids(g: &GroundProgram, sets: &[AnswerSet], q: Option<AtomId>) -> InnerValue {
    let not_q = InnerValue { n1: 0, n2: 1 };
    sets.iter().fold(InnerValue::zero(), |sum, s| {
        let mut prod = g.herbrand_base().fold(InnerValue::one(), |acc, a| {
            let w = if Some(a) == q && !s.contains(a) {
                not_q
            } else {
                InnerValue::one()
            };
            acc.mul(w)
        });
        // an atom outside the grounding is false everywhere
        if q.is_none() {
            prod = prod.mul(not_q);
        }
        sum.add(prod)
    })
}

/// Bounds by walking every world.
pub fn credal_bounds_enumeration(p: &Program, q: &Query, opts: &SolveOptions<'_>) -> Result<ProbabilityInterval> {
    PreparedQuery::new(p, q)?.bounds(Engine::Enum, opts)
}

/// Bounds as a second-level algebraic model count.
pub fn credal_bounds_2amc(p: &Program, q: &Query, opts: &SolveOptions<'_>) -> Result<ProbabilityInterval> {
    PreparedQuery::new(p, q)?.bounds(Engine::TwoAmc, opts)
}

/// Full pipeline: OLON check, optional residual extraction, then solving.
pub fn query_bounds(
    p: &Program,
    q: &Query,
    mode: Mode,
    engine: Engine,
    opts: &SolveOptions<'_>,
) -> Result<ProbabilityInterval> {
    check_olon_free(p)?;
    match mode {
        Mode::Direct => PreparedQuery::new(p, q)?.bounds(engine, opts),
        Mode::Residual => {
            let r = extract_residual(p, q)?;
            match r.query_status {
                QueryStatus::CertainTrue => Ok(ProbabilityInterval::point(1.0)),
                QueryStatus::CertainFalse => Ok(ProbabilityInterval::point(0.0)),
                QueryStatus::Undefined => PreparedQuery::new(&r.program, q)?.bounds(engine, opts),
            }
        }
    }
}
