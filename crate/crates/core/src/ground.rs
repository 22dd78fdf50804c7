//! Bottom-up grounding, the predicate call graph with odd-loop detection,
//! and the atom dependency graph.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::syntax::{Atom, Literal, Program, Query, Rule, Term};

/// Index of a ground atom in a [`GroundProgram`]'s atom table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomId(pub u32);

impl AtomId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Default)]
struct AtomTable {
    atoms: Vec<Atom>,
    index: BTreeMap<Atom, AtomId>,
}

impl AtomTable {
    fn intern(&mut self, atom: &Atom) -> AtomId {
        if let Some(&id) = self.index.get(atom) {
            return id;
        }
        let id = AtomId(self.atoms.len() as u32);
        self.atoms.push(atom.clone());
        self.index.insert(atom.clone(), id);
        id
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundLiteral {
    pub atom: AtomId,
    pub negated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundRule {
    pub head: AtomId,
    pub body: Vec<GroundLiteral>,
}

impl GroundRule {
    pub fn positive_body(&self) -> impl Iterator<Item = AtomId> + '_ {
        self.body.iter().filter(|l| !l.negated).map(|l| l.atom)
    }

    pub fn negative_body(&self) -> impl Iterator<Item = AtomId> + '_ {
        self.body.iter().filter(|l| l.negated).map(|l| l.atom)
    }
}

/// Fully instantiated rules over a shared atom table.
///
/// The atom table is the Herbrand base `B_P`. Programs derived from another
/// ground program (reducts, relevant fragments) share its table, so atom ids
/// stay comparable; [`GroundProgram::compact`] drops atoms no rule mentions.
#[derive(Debug, Clone)]
pub struct GroundProgram {
    table: Arc<AtomTable>,
    rules: Vec<GroundRule>,
}

impl GroundProgram {
    /// Builds a ground program from rules that are already ground.
    ///
    /// # Panics
    /// If some rule contains a variable.
    pub fn from_rules(rules: &[Rule]) -> Self {
        let mut table = AtomTable::default();
        let rules = rules
            .iter()
            .map(|r| {
                assert!(r.is_ground(), "rule `{r}` is not ground");
                intern_rule(&mut table, r)
            })
            .collect();
        GroundProgram {
            table: Arc::new(table),
            rules,
        }
    }

    /// Same atom table, different rules.
    pub fn with_rules(&self, rules: Vec<GroundRule>) -> Self {
        GroundProgram {
            table: Arc::clone(&self.table),
            rules,
        }
    }

    pub fn rules(&self) -> &[GroundRule] {
        &self.rules
    }

    pub fn atom(&self, id: AtomId) -> &Atom {
        &self.table.atoms[id.index()]
    }

    pub fn lookup(&self, atom: &Atom) -> Option<AtomId> {
        self.table.index.get(atom).copied()
    }

    /// Size of the Herbrand base.
    pub fn atom_count(&self) -> usize {
        self.table.atoms.len()
    }

    pub fn herbrand_base(&self) -> impl Iterator<Item = AtomId> {
        (0..self.atom_count() as u32).map(AtomId)
    }

    /// Atoms mentioned by at least one rule.
    pub fn occurring_atoms(&self) -> BTreeSet<AtomId> {
        self.rules
            .iter()
            .flat_map(|r| core::iter::once(r.head).chain(r.body.iter().map(|l| l.atom)))
            .collect()
    }

    pub fn has_negation(&self) -> bool {
        self.rules.iter().any(|r| r.body.iter().any(|l| l.negated))
    }

    pub fn rule_to_syntax(&self, rule: &GroundRule) -> Rule {
        Rule::new(
            self.atom(rule.head).clone(),
            rule.body
                .iter()
                .map(|l| Literal {
                    atom: self.atom(l.atom).clone(),
                    negated: l.negated,
                })
                .collect(),
        )
    }

    pub fn to_rules(&self) -> Vec<Rule> {
        self.rules.iter().map(|r| self.rule_to_syntax(r)).collect()
    }

    pub fn atoms_of<'a>(&self, ids: impl IntoIterator<Item = &'a AtomId>) -> BTreeSet<Atom> {
        ids.into_iter().map(|&id| self.atom(id).clone()).collect()
    }

    /// Rebuilds the program over a fresh table holding only the atoms its
    /// rules mention.
    pub fn compact(&self) -> Self {
        GroundProgram::from_rules(&self.to_rules())
    }

    /// Rendered rules, sorted.
    pub fn canonical_rules(&self) -> Vec<String> {
        let mut out: Vec<String> = self.to_rules().iter().map(ToString::to_string).collect();
        out.sort();
        out
    }
}

impl fmt::Display for GroundProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in self.canonical_rules() {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

fn intern_rule(table: &mut AtomTable, r: &Rule) -> GroundRule {
    GroundRule {
        head: table.intern(&r.head),
        body: r
            .body
            .iter()
            .map(|l| GroundLiteral {
                atom: table.intern(&l.atom),
                negated: l.negated,
            })
            .collect(),
    }
}

// ---------------------------------------------------------------------------
// Grounding

type PredKey = (String, usize);

fn key(atom: &Atom) -> PredKey {
    (atom.predicate.clone(), atom.arity())
}

#[derive(Default)]
struct Facts {
    by_pred: BTreeMap<PredKey, Vec<Atom>>,
    all: BTreeSet<Atom>,
}

impl Facts {
    fn insert(&mut self, atom: Atom) -> bool {
        if self.all.contains(&atom) {
            return false;
        }
        self.by_pred.entry(key(&atom)).or_default().push(atom.clone());
        self.all.insert(atom);
        true
    }

    fn candidates(&self, pattern: &Atom) -> &[Atom] {
        self.by_pred
            .get(&key(pattern))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }
}

type Binding<'a> = Vec<(&'a str, &'a str)>;

fn bind<'a>(pattern: &'a Atom, value: &'a Atom, binding: &mut Binding<'a>) -> bool {
    for (p, v) in pattern.args.iter().zip(&value.args) {
        match p {
            Term::Constant(c) => {
                if c != v.name() {
                    return false;
                }
            }
            Term::Variable(x) => match binding.iter().find(|(name, _)| name == x) {
                Some((_, bound)) => {
                    if *bound != v.name() {
                        return false;
                    }
                }
                None => binding.push((x, v.name())),
            },
        }
    }
    true
}

fn substitute(atom: &Atom, binding: &Binding<'_>) -> Atom {
    Atom::new(
        atom.predicate.clone(),
        atom.args
            .iter()
            .map(|t| match t {
                Term::Variable(x) => {
                    let (_, value) = binding
                        .iter()
                        .find(|(name, _)| name == x)
                        .expect("safe rule binds every variable");
                    Term::Constant((*value).to_string())
                }
                c => c.clone(),
            })
            .collect(),
    )
}

fn instantiate(rule: &Rule, binding: &Binding<'_>) -> Rule {
    Rule::new(
        substitute(&rule.head, binding),
        rule.body
            .iter()
            .map(|l| Literal {
                atom: substitute(&l.atom, binding),
                negated: l.negated,
            })
            .collect(),
    )
}

/// Enumerates substitutions mapping the positive literals of `rule` into
/// `full`, with literal `pivot` drawn from `delta`.
fn join<'a>(
    positives: &[&'a Atom],
    pivot: usize,
    delta: &'a Facts,
    full: &'a Facts,
    i: usize,
    binding: &mut Binding<'a>,
    emit: &mut dyn FnMut(&Binding<'a>),
) {
    if i == positives.len() {
        emit(binding);
        return;
    }
    let source = if i == pivot { delta } else { full };
    for candidate in source.candidates(positives[i]) {
        let mark = binding.len();
        if bind(positives[i], candidate, binding) {
            join(positives, pivot, delta, full, i + 1, binding, emit);
        }
        binding.truncate(mark);
    }
}

/// Grounds a safe, function-free normal program.
///
/// Only instances whose positive body atoms are all *possibly derivable*
/// (least model of the program with negative literals ignored) are kept.
/// The other instances can never fire, so every semantics computed
/// downstream agrees with the full instantiation.
pub fn ground_program(rules: &[Rule]) -> GroundProgram {
    let mut instances: BTreeSet<Rule> = BTreeSet::new();
    let mut full = Facts::default();
    let mut fresh: Vec<Atom> = Vec::new();

    for r in rules.iter().filter(|r| r.positive_body().next().is_none()) {
        debug_assert!(r.is_ground());
        fresh.push(r.head.clone());
        instances.insert(r.clone());
    }
    let recursive: Vec<(&Rule, Vec<&Atom>)> = rules
        .iter()
        .map(|r| (r, r.positive_body().collect::<Vec<_>>()))
        .filter(|(_, pos)| !pos.is_empty())
        .collect();

    loop {
        let mut delta = Facts::default();
        for atom in fresh.drain(..) {
            if !full.all.contains(&atom) {
                delta.insert(atom);
            }
        }
        if delta.all.is_empty() {
            break;
        }
        for atom in &delta.all {
            full.insert(atom.clone());
        }
        for (rule, positives) in &recursive {
            for pivot in 0..positives.len() {
                let mut binding = Vec::new();
                join(positives, pivot, &delta, &full, 0, &mut binding, &mut |b| {
                    let inst = instantiate(rule, b);
                    if !full.all.contains(&inst.head) {
                        fresh.push(inst.head.clone());
                    }
                    instances.insert(inst);
                });
            }
        }
    }

    let instances: Vec<Rule> = instances.into_iter().collect();
    GroundProgram::from_rules(&instances)
}

// ---------------------------------------------------------------------------
// Call graph

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Predicate {
    pub name: String,
    pub arity: usize,
}

impl Predicate {
    pub fn of(atom: &Atom) -> Self {
        Predicate {
            name: atom.predicate.clone(),
            arity: atom.arity(),
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    fn of(negated: bool) -> Self {
        if negated {
            Sign::Negative
        } else {
            Sign::Positive
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Positive => '+',
            Sign::Negative => '-',
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CallGraph {
    pub nodes: BTreeSet<Predicate>,
    pub edges: BTreeSet<(Predicate, Predicate, Sign)>,
}

impl CallGraph {
    pub fn from_rules(rules: &[Rule]) -> Self {
        let mut g = CallGraph::default();
        for r in rules {
            let head = Predicate::of(&r.head);
            g.nodes.insert(head.clone());
            for l in &r.body {
                let body = Predicate::of(&l.atom);
                g.nodes.insert(body.clone());
                g.edges.insert((head.clone(), body, Sign::of(l.negated)));
            }
        }
        g
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph call {\n");
        for n in &self.nodes {
            out.push_str(&format!("  \"{n}\";\n"));
        }
        for (a, b, s) in &self.edges {
            out.push_str(&format!("  \"{a}\" -> \"{b}\" [label=\"{}\"];\n", s.symbol()));
        }
        out.push_str("}\n");
        out
    }
}

pub fn build_call_graph(p: &Program) -> CallGraph {
    let mut g = CallGraph::from_rules(p.rules());
    for pf in p.prob_facts() {
        g.nodes.insert(Predicate::of(&pf.atom));
    }
    g
}

/// A directed cycle: `steps[i].0 --steps[i].1--> steps[i+1].0`, wrapping
/// around at the end.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedCycle {
    pub steps: Vec<(Predicate, Sign)>,
}

impl SignedCycle {
    pub fn negations(&self) -> usize {
        self.steps.iter().filter(|(_, s)| *s == Sign::Negative).count()
    }
}

impl fmt::Display for SignedCycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (p, s) in &self.steps {
            write!(f, "{p} -{}-> ", s.symbol())?;
        }
        match self.steps.first() {
            Some((p, _)) => write!(f, "{p}"),
            None => Ok(()),
        }
    }
}

/// Finds a cycle with an odd number of negative edges, if any.
///
/// Works on the parity double cover: node `(v, b)` tracks the parity `b` of
/// negations seen so far. An odd cycle through `v` exists iff `(v, 0)` and
/// `(v, 1)` lie in the same strongly connected component.
pub fn detect_olon(g: &CallGraph) -> Option<SignedCycle> {
    let nodes: Vec<&Predicate> = g.nodes.iter().collect();
    let idx = |p: &Predicate| nodes.binary_search(&p).expect("edge endpoint is a node");
    let n = nodes.len();
    let mut adj: Vec<Vec<(usize, Sign)>> = vec![Vec::new(); 2 * n];
    for (a, b, s) in &g.edges {
        let (a, b) = (idx(a), idx(b));
        for parity in 0..2 {
            let target = match s {
                Sign::Positive => parity,
                Sign::Negative => 1 - parity,
            };
            adj[2 * a + parity].push((2 * b + target, *s));
        }
    }
    let comp = strongly_connected_components(&adj);
    let v = (0..n).find(|&v| comp[2 * v] == comp[2 * v + 1])?;

    // shortest walk (v,0) -> (v,1) inside the component: a closed walk in g
    // with odd parity
    let target = 2 * v + 1;
    let mut prev: Vec<Option<(usize, Sign)>> = vec![None; 2 * n];
    let mut seen = vec![false; 2 * n];
    let mut queue = VecDeque::from([2 * v]);
    seen[2 * v] = true;
    while let Some(u) = queue.pop_front() {
        if u == target {
            break;
        }
        for &(w, s) in &adj[u] {
            if !seen[w] && comp[w] == comp[u] {
                seen[w] = true;
                prev[w] = Some((u, s));
                queue.push_back(w);
            }
        }
    }
    let mut walk: Vec<(usize, Sign)> = Vec::new();
    let mut cur = target;
    while let Some((u, s)) = prev[cur] {
        walk.push((u / 2, s));
        cur = u;
    }
    walk.reverse();

    let cycle = odd_simple_cycle(&walk)?;
    Some(SignedCycle {
        steps: cycle.into_iter().map(|(u, s)| (nodes[u].clone(), s)).collect(),
    })
}

/// Splits a closed walk with an odd number of negative edges into simple
/// cycles and returns one of odd parity. `walk[i] = (node, sign of the edge
/// leaving it)`; the walk returns to `walk[0].0`.
fn odd_simple_cycle(walk: &[(usize, Sign)]) -> Option<Vec<(usize, Sign)>> {
    let start = walk.first()?.0;
    let mut stack: Vec<(usize, Sign)> = Vec::new();
    let targets = walk.iter().skip(1).map(|(u, _)| *u).chain(core::iter::once(start));
    for (&step, next) in walk.iter().zip(targets) {
        stack.push(step);
        if let Some(pos) = stack.iter().position(|(u, _)| *u == next) {
            let cycle: Vec<(usize, Sign)> = stack.drain(pos..).collect();
            let odd = cycle.iter().filter(|(_, s)| *s == Sign::Negative).count() % 2 == 1;
            if odd {
                return Some(cycle);
            }
        }
    }
    None
}

/// Tarjan's algorithm; returns a component id per node.
fn strongly_connected_components(adj: &[Vec<(usize, Sign)>]) -> Vec<usize> {
    struct State {
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        comp: Vec<usize>,
        next_index: usize,
        next_comp: usize,
    }
    let n = adj.len();
    let mut st = State {
        index: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        comp: vec![usize::MAX; n],
        next_index: 0,
        next_comp: 0,
    };
    // explicit call stack: (node, next edge position)
    for root in 0..n {
        if st.index[root].is_some() {
            continue;
        }
        let mut calls: Vec<(usize, usize)> = vec![(root, 0)];
        st.index[root] = Some(st.next_index);
        st.low[root] = st.next_index;
        st.next_index += 1;
        st.stack.push(root);
        st.on_stack[root] = true;
        while let Some(&mut (u, ref mut pos)) = calls.last_mut() {
            if *pos < adj[u].len() {
                let w = adj[u][*pos].0;
                *pos += 1;
                match st.index[w] {
                    None => {
                        st.index[w] = Some(st.next_index);
                        st.low[w] = st.next_index;
                        st.next_index += 1;
                        st.stack.push(w);
                        st.on_stack[w] = true;
                        calls.push((w, 0));
                    }
                    Some(iw) if st.on_stack[w] => st.low[u] = st.low[u].min(iw),
                    Some(_) => {}
                }
            } else {
                calls.pop();
                if let Some(&(parent, _)) = calls.last() {
                    st.low[parent] = st.low[parent].min(st.low[u]);
                }
                if Some(st.low[u]) == st.index[u] {
                    loop {
                        let w = st.stack.pop().expect("component root on stack");
                        st.on_stack[w] = false;
                        st.comp[w] = st.next_comp;
                        if w == u {
                            break;
                        }
                    }
                    st.next_comp += 1;
                }
            }
        }
    }
    st.comp
}

// ---------------------------------------------------------------------------
// Dependency graph and relevance

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DependencyGraph {
    pub nodes: BTreeSet<AtomId>,
    pub edges: BTreeSet<(AtomId, AtomId, Sign)>,
}

impl DependencyGraph {
    pub fn has_edge(&self, from: AtomId, to: AtomId) -> bool {
        self.edges
            .range((from, to, Sign::Positive)..=(from, to, Sign::Negative))
            .next()
            .is_some()
    }

    /// Atoms reachable from `start`, including `start` itself.
    pub fn reachable_from(&self, start: AtomId) -> BTreeSet<AtomId> {
        let mut adj: BTreeMap<AtomId, Vec<AtomId>> = BTreeMap::new();
        for &(a, b, _) in &self.edges {
            adj.entry(a).or_default().push(b);
        }
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for &w in adj.get(&u).map(Vec::as_slice).unwrap_or(&[]) {
                if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        seen
    }

    pub fn to_dot(&self, g: &GroundProgram) -> String {
        let mut out = String::from("digraph dependency {\n");
        for &n in &self.nodes {
            out.push_str(&format!("  \"{}\";\n", g.atom(n)));
        }
        for &(a, b, s) in &self.edges {
            out.push_str(&format!(
                "  \"{}\" -> \"{}\" [label=\"{}\"];\n",
                g.atom(a),
                g.atom(b),
                s.symbol()
            ));
        }
        out.push_str("}\n");
        out
    }
}

pub fn build_dependency_graph(g: &GroundProgram) -> DependencyGraph {
    let mut dg = DependencyGraph::default();
    for r in g.rules() {
        dg.nodes.insert(r.head);
        for l in &r.body {
            dg.nodes.insert(l.atom);
            dg.edges.insert((r.head, l.atom, Sign::of(l.negated)));
        }
    }
    dg
}

/// Rules whose head is reachable from the query atom in the dependency graph.
pub fn relevant_subprogram(g: &GroundProgram, q: &Query) -> GroundProgram {
    match g.lookup(&q.atom) {
        Some(id) => relevant_to(g, id),
        None => g.with_rules(Vec::new()),
    }
}

pub(crate) fn relevant_to(g: &GroundProgram, start: AtomId) -> GroundProgram {
    let reach = build_dependency_graph(g).reachable_from(start);
    g.with_rules(
        g.rules()
            .iter()
            .filter(|r| reach.contains(&r.head))
            .cloned()
            .collect(),
    )
}
