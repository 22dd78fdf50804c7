//! Benchmark datasets and structural statistics.
//!
//! `reach` programs ask for reachability in a graph whose edges are
//! independent probabilistic facts; `smokers` programs model influence in a
//! social network. Each comes in a Barabási-Albert variant and a grid
//! variant. Generators are pure functions of `(size, seed)`.
//!
//! [`primal_graph_stats`] measures the structure of a program through a
//! min-fill tree decomposition of the primal graph of its encoded grounding.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ground::{ground_program, GroundProgram};
use crate::residual::encode_probabilistic_facts;
use crate::syntax::{parse_program, parse_query, Program, Query};

const REACH_RULES: &str = "\
edge(X,Y) :- e(X,Y), not nedge(X,Y).
nedge(X,Y) :- e(X,Y), not edge(X,Y).
path(X,Y) :- edge(X,Y).
path(X,Z) :- edge(X,Y), path(Y,Z).
";

const SMOKERS_RULES: &str = "\
influences(X,Y) :- e(X,Y), not ninfluences(X,Y).
ninfluences(X,Y) :- e(X,Y), not influences(X,Y).
smokes(X) :- stress(X).
smokes(X) :- smokes(Y), influences(Y,X).
";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dataset {
    ReachBa,
    ReachGrid,
    SmokersBa,
    SmokersGrid,
}

impl Dataset {
    pub const ALL: [Dataset; 4] = [Dataset::ReachBa, Dataset::ReachGrid, Dataset::SmokersBa, Dataset::SmokersGrid];

    pub fn name(self) -> &'static str {
        match self {
            Dataset::ReachBa => "reachBA",
            Dataset::ReachGrid => "reachGrid",
            Dataset::SmokersBa => "smokersBA",
            Dataset::SmokersGrid => "smokersGrid",
        }
    }

    pub fn generate(self, size: usize, seed: u64) -> Result<BenchmarkInstance> {
        match self {
            Dataset::ReachBa => gen_reach_ba(size, seed),
            Dataset::ReachGrid => gen_reach_grid(size, seed),
            Dataset::SmokersBa => gen_smokers_ba(size, seed),
            Dataset::SmokersGrid => gen_smokers_grid(size, seed),
        }
    }
}

impl fmt::Display for Dataset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Dataset {
    type Err = String;

    fn from_str(s: &str) -> core::result::Result<Self, String> {
        Dataset::ALL
            .into_iter()
            .find(|d| d.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown dataset `{s}` (expected reachBA, reachGrid, smokersBA or smokersGrid)"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkInstance {
    pub dataset: Dataset,
    pub size: usize,
    pub run_index: usize,
    pub seed: u64,
    pub program: Program,
    pub query: Query,
}

/// Per-instance seed: a 64-bit mix of the base seed and the instance
/// coordinates.
pub fn derive_seed(base: u64, dataset: Dataset, size: usize, run: usize) -> u64 {
    let mut h = base ^ 0x6a09_e667_f3bc_c908;
    for x in [dataset as u64, size as u64, run as u64] {
        h = mix(h ^ x);
    }
    h
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Instance number `run` of `dataset` at `size`.
pub fn generate(dataset: Dataset, size: usize, run: usize, base_seed: u64) -> Result<BenchmarkInstance> {
    let seed = derive_seed(base_seed, dataset, size, run);
    let mut inst = dataset.generate(size, seed)?;
    inst.run_index = run;
    Ok(inst)
}

/// Preferential attachment with two edges per new node.
///
/// Nodes 0 and 1 start unconnected; node 2 attaches to both. Every later
/// node draws two distinct targets from an urn holding each node once per
/// incident edge end. Edges are returned as `(low, high)`.
pub fn barabasi_albert_edges(n: usize, seed: u64) -> Vec<(usize, usize)> {
    const M: usize = 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity(n.saturating_sub(M) * M);
    let mut urn: Vec<usize> = Vec::new();
    let mut targets: Vec<usize> = (0..M).collect();
    for source in M..n {
        for &t in &targets {
            edges.push((t, source));
        }
        urn.extend_from_slice(&targets);
        urn.extend(core::iter::repeat_n(source, M));
        let mut chosen = BTreeSet::new();
        while chosen.len() < M {
            chosen.insert(urn[rng.random_range(0..urn.len())]);
        }
        targets = chosen.into_iter().collect();
    }
    edges.sort_unstable();
    edges
}

/// Right and down edges of a `k × k` grid with row-major node numbers.
pub fn grid_edges(k: usize) -> Vec<(usize, usize)> {
    let mut edges = Vec::with_capacity(2 * k * k.saturating_sub(1));
    for r in 0..k {
        for c in 0..k {
            let v = r * k + c;
            if c + 1 < k {
                edges.push((v, v + 1));
            }
            if r + 1 < k {
                edges.push((v, v + k));
            }
        }
    }
    edges.sort_unstable();
    edges
}

fn too_small(what: &str, got: usize, min: usize) -> Error {
    Error::Internal(format!("{what} must be at least {min}, got {got}"))
}

fn build(
    dataset: Dataset,
    size: usize,
    seed: u64,
    facts: impl IntoIterator<Item = String>,
    rules: &str,
    query: String,
) -> Result<BenchmarkInstance> {
    let mut text = String::new();
    for f in facts {
        text.push_str(&f);
        text.push('\n');
    }
    text.push_str(rules);
    Ok(BenchmarkInstance {
        dataset,
        size,
        run_index: 0,
        seed,
        program: parse_program(&text)?,
        query: parse_query(&query)?,
    })
}

fn edge_facts<'a>(edges: &'a [(usize, usize)], prob: &str) -> impl Iterator<Item = String> + 'a {
    let prob = String::from(prob);
    edges.iter().map(move |(u, v)| format!("{prob}::e({u},{v})."))
}

pub fn gen_reach_ba(n: usize, seed: u64) -> Result<BenchmarkInstance> {
    if n < 3 {
        return Err(too_small("node count", n, 3));
    }
    let edges = barabasi_albert_edges(n, seed);
    build(Dataset::ReachBa, n, seed, edge_facts(&edges, "0.1"), REACH_RULES, format!("path(0,{})", n - 1))
}

pub fn gen_reach_grid(k: usize, seed: u64) -> Result<BenchmarkInstance> {
    if k < 2 {
        return Err(too_small("grid side", k, 2));
    }
    let edges = grid_edges(k);
    // every node but the origin is reachable from it
    let target = ChaCha8Rng::seed_from_u64(seed).random_range(1..k * k);
    build(Dataset::ReachGrid, k, seed, edge_facts(&edges, "0.1"), REACH_RULES, format!("path(0,{target})"))
}

fn stress_facts(people: usize) -> impl Iterator<Item = String> {
    (0..people).map(|p| format!("0.1::stress({p})."))
}

pub fn gen_smokers_ba(n: usize, seed: u64) -> Result<BenchmarkInstance> {
    if n < 3 {
        return Err(too_small("node count", n, 3));
    }
    let edges = barabasi_albert_edges(n, seed);
    let facts = stress_facts(n).chain(edge_facts(&edges, "0.2"));
    build(Dataset::SmokersBa, n, seed, facts, SMOKERS_RULES, format!("smokes({})", n - 1))
}

pub fn gen_smokers_grid(k: usize, seed: u64) -> Result<BenchmarkInstance> {
    if k < 2 {
        return Err(too_small("grid side", k, 2));
    }
    let edges = grid_edges(k);
    let person = ChaCha8Rng::seed_from_u64(seed).random_range(0..k * k);
    let facts = stress_facts(k * k).chain(edge_facts(&edges, "0.2"));
    build(Dataset::SmokersGrid, k, seed, facts, SMOKERS_RULES, format!("smokes({person})"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DecompositionStats {
    pub bag_count: usize,
    pub width_upper_bound: usize,
    pub vertex_count: usize,
}

/// Simple undirected graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UndirectedGraph {
    adj: Vec<BTreeSet<usize>>,
}

impl UndirectedGraph {
    pub fn new(n: usize) -> Self {
        UndirectedGraph {
            adj: vec![BTreeSet::new(); n],
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Self::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        if u != v {
            self.adj[u].insert(v);
            self.adj[v].insert(u);
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: usize) -> &BTreeSet<usize> {
        &self.adj[v]
    }

    /// Min-fill elimination order (ties: smaller degree, then smaller
    /// vertex).
    pub fn min_fill_order(&self) -> Vec<usize> {
        let mut adj = self.adj.clone();
        let mut alive = vec![true; adj.len()];
        let mut order = Vec::with_capacity(adj.len());
        for _ in 0..adj.len() {
            let v = (0..adj.len())
                .filter(|&v| alive[v])
                .min_by_key(|&v| (fill_in(&adj, v), adj[v].len(), v))
                .expect("a live vertex");
            eliminate(&mut adj, v);
            alive[v] = false;
            order.push(v);
        }
        order
    }

    /// Bags `{v} ∪ N(v)` produced by eliminating vertices in `order`.
    pub fn elimination_bags(&self, order: &[usize]) -> Vec<BTreeSet<usize>> {
        let mut adj = self.adj.clone();
        order
            .iter()
            .map(|&v| {
                let mut bag = adj[v].clone();
                bag.insert(v);
                eliminate(&mut adj, v);
                bag
            })
            .collect()
    }

    /// Width and number of maximal bags of the decomposition induced by
    /// `order`.
    pub fn decomposition_stats(&self, order: &[usize]) -> DecompositionStats {
        let bags = self.elimination_bags(order);
        let n = bags.len();
        let mut position = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            position[v] = i;
        }
        // The bag of `v` is contained in an earlier bag exactly when some
        // earlier `u` whose earliest-eliminated neighbour is `v` has as
        // many neighbours as `v`'s bag has members.
        let mut covered = vec![false; n];
        for (i, bag) in bags.iter().enumerate() {
            let u = order[i];
            let parent = bag.iter().filter(|&&x| x != u).min_by_key(|&&x| position[x]);
            if let Some(&p) = parent {
                if bag.len() - 1 == bags[position[p]].len() {
                    covered[position[p]] = true;
                }
            }
        }
        DecompositionStats {
            bag_count: covered.iter().filter(|c| !**c).count(),
            width_upper_bound: bags.iter().map(|b| b.len() - 1).max().unwrap_or(0),
            vertex_count: n,
        }
    }

    pub fn min_fill_stats(&self) -> DecompositionStats {
        self.decomposition_stats(&self.min_fill_order())
    }
}

fn fill_in(adj: &[BTreeSet<usize>], v: usize) -> usize {
    let nb: Vec<usize> = adj[v].iter().copied().collect();
    let mut missing = 0;
    for (i, &a) in nb.iter().enumerate() {
        for &b in &nb[i + 1..] {
            if !adj[a].contains(&b) {
                missing += 1;
            }
        }
    }
    missing
}

fn eliminate(adj: &mut [BTreeSet<usize>], v: usize) {
    let nb: Vec<usize> = core::mem::take(&mut adj[v]).into_iter().collect();
    for &a in &nb {
        adj[a].remove(&v);
        for &b in &nb {
            if a != b {
                adj[a].insert(b);
            }
        }
    }
}

/// Primal graph of a ground program: one vertex per atom, an edge between
/// the head and each body atom and between every two body atoms of a rule.
pub fn primal_graph(g: &GroundProgram) -> UndirectedGraph {
    let mut pg = UndirectedGraph::new(g.atom_count());
    for r in g.rules() {
        let atoms: Vec<usize> = core::iter::once(r.head)
            .chain(r.body.iter().map(|l| l.atom))
            .map(|a| a.index())
            .collect();
        for (i, &a) in atoms.iter().enumerate() {
            for &b in &atoms[i + 1..] {
                pg.add_edge(a, b);
            }
        }
    }
    pg
}

pub fn ground_stats(g: &GroundProgram) -> DecompositionStats {
    primal_graph(g).min_fill_stats()
}

/// Statistics of the encoded grounding of `p`.
pub fn primal_graph_stats(p: &Program) -> Result<DecompositionStats> {
    let (rules, _) = encode_probabilistic_facts(p)?;
    Ok(ground_stats(&ground_program(&rules)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::residual::check_olon_free;
    use crate::syntax::render_program;
    use alloc::string::ToString;

    fn graph(n: usize, edges: &[(usize, usize)]) -> UndirectedGraph {
        UndirectedGraph::from_edges(n, edges)
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for i in 0..=p.len() {
                let mut q = p.clone();
                q.insert(i, n - 1);
                out.push(q);
            }
        }
        out
    }

    fn exact_treewidth(g: &UndirectedGraph) -> usize {
        permutations(g.vertex_count())
            .iter()
            .map(|o| g.decomposition_stats(o).width_upper_bound)
            .min()
            .unwrap_or(0)
    }

    fn maximal_bags(bags: &[BTreeSet<usize>]) -> usize {
        let mut distinct: Vec<&BTreeSet<usize>> = Vec::new();
        for b in bags {
            if !distinct.contains(&b) {
                distinct.push(b);
            }
        }
        distinct
            .iter()
            .filter(|b| !distinct.iter().any(|c| c != *b && b.is_subset(c)))
            .count()
    }

    #[test]
    fn known_widths() {
        let path = graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]);
        assert_eq!(path.min_fill_stats().width_upper_bound, 1);
        assert_eq!(path.min_fill_stats().bag_count, 4);
        let clique = graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(clique.min_fill_stats(), DecompositionStats { bag_count: 1, width_upper_bound: 3, vertex_count: 4 });
        let cycle = graph(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]);
        assert_eq!(cycle.min_fill_stats().width_upper_bound, 2);
        assert_eq!(exact_treewidth(&cycle), 2);
        assert_eq!(graph(0, &[]).min_fill_stats(), DecompositionStats::default());
        assert_eq!(graph(3, &[]).min_fill_stats().bag_count, 3);
    }

    #[test]
    fn min_fill_against_exhaustive_orders() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..60 {
            let n = rng.random_range(1..=7);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.random_bool(0.4) {
                        edges.push((u, v));
                    }
                }
            }
            let g = graph(n, &edges);
            let stats = g.min_fill_stats();
            assert!(stats.width_upper_bound >= exact_treewidth(&g));
            for order in [g.min_fill_order(), (0..n).collect(), (0..n).rev().collect()] {
                let bags = g.elimination_bags(&order);
                assert_eq!(g.decomposition_stats(&order).bag_count, maximal_bags(&bags));
                let max_bag = bags.iter().map(BTreeSet::len).max().unwrap();
                assert_eq!(g.decomposition_stats(&order).width_upper_bound + 1, max_bag);
            }
        }
    }

    #[test]
    fn ba_edge_count_and_orientation() {
        for n in 3..12 {
            let e = barabasi_albert_edges(n, n as u64);
            assert_eq!(e.len(), (n - 2) * 2);
            assert!(e.iter().all(|(u, v)| u < v && *v < n));
            let distinct: BTreeSet<_> = e.iter().collect();
            assert_eq!(distinct.len(), e.len());
        }
    }

    #[test]
    fn generator_shapes() {
        let r = gen_reach_ba(5, 1).unwrap();
        assert_eq!(r.program.prob_facts().len(), 6);
        assert_eq!(r.program.rules().len(), 4);
        assert_eq!(r.query.to_string(), "path(0,4)");

        assert_eq!(gen_reach_grid(2, 1).unwrap().program.prob_facts().len(), 4);
        assert_eq!(gen_reach_grid(3, 1).unwrap().program.prob_facts().len(), 12);

        let s = gen_smokers_ba(5, 3).unwrap();
        let stress = s.program.prob_facts().iter().filter(|f| f.atom.predicate == "stress").count();
        assert_eq!((stress, s.program.prob_facts().len() - stress), (5, 6));
        assert_eq!(s.program.rules().len(), 4);
        assert_eq!(s.query.to_string(), "smokes(4)");

        let g = gen_smokers_grid(2, 3).unwrap();
        assert_eq!(g.program.prob_facts().len(), 8);

        assert!(gen_reach_ba(2, 0).is_err());
        assert!(gen_smokers_grid(1, 0).is_err());
    }

    #[test]
    fn generators_are_deterministic_and_olon_free() {
        for d in Dataset::ALL {
            for size in [2, 3, 5] {
                let Ok(a) = generate(d, size, 4, 42) else { continue };
                let b = generate(d, size, 4, 42).unwrap();
                assert_eq!(render_program(&a.program), render_program(&b.program));
                assert_eq!(a.query, b.query);
                check_olon_free(&a.program).unwrap();
            }
        }
        assert_ne!(derive_seed(1, Dataset::ReachBa, 5, 0), derive_seed(1, Dataset::ReachBa, 5, 1));
    }

    #[test]
    fn grid_query_in_range() {
        for seed in 0..50 {
            let inst = gen_reach_grid(3, seed).unwrap();
            let target: usize = inst.query.atom.args[1].name().parse().unwrap();
            assert!((1..9).contains(&target));
        }
    }

    #[test]
    fn dataset_names() {
        for d in Dataset::ALL {
            assert_eq!(d.name().parse::<Dataset>().unwrap(), d);
        }
        assert!("nope".parse::<Dataset>().is_err());
    }

    #[test]
    fn stats_of_encoded_program() {
        let p = parse_program("0.5::a. q :- a.").unwrap();
        // atoms a, _not_a, q; edges a-_not_a, q-a
        assert_eq!(
            primal_graph_stats(&p).unwrap(),
            DecompositionStats { bag_count: 2, width_upper_bound: 1, vertex_count: 3 }
        );
    }
}
