//! Fast algorithms checked against slow, literal reference implementations.

use std::collections::{BTreeMap, BTreeSet};

use pasp_core::corpus::{random_program, CorpusConfig};
use pasp_core::ground::{detect_olon, ground_program, AtomId, CallGraph, GroundProgram, Predicate, Sign};
use pasp_core::stable::{brute_force_answer_sets, enumerate_answer_sets, is_stable};
use pasp_core::wfs::{gfp_of, lfp_ot, wfm, ThreeValuedInterpretation, Truth};
use pasp_core::{parse_program, render_program, Atom, Literal, Rule, Term};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn prop_atom(i: usize) -> Atom {
    Atom::new(format!("x{i}"), Vec::new())
}

/// Random propositional program over `n` atoms.
fn random_ground(rng: &mut impl Rng, n: usize, rules: usize) -> GroundProgram {
    let rules: Vec<Rule> = (0..rules)
        .map(|_| {
            let body = (0..rng.random_range(0..=3))
                .map(|_| {
                    let a = prop_atom(rng.random_range(0..n));
                    if rng.random_bool(0.4) {
                        Literal::neg(a)
                    } else {
                        Literal::pos(a)
                    }
                })
                .collect();
            Rule::new(prop_atom(rng.random_range(0..n)), body)
        })
        .collect();
    GroundProgram::from_rules(&rules)
}

fn random_interpretation(rng: &mut impl Rng, n: usize) -> ThreeValuedInterpretation {
    let mut t = BTreeSet::new();
    let mut f = BTreeSet::new();
    for a in 0..n as u32 {
        match rng.random_range(0..3) {
            0 => {
                t.insert(AtomId(a));
            }
            1 => {
                f.insert(AtomId(a));
            }
            _ => {}
        }
    }
    ThreeValuedInterpretation::from_sets(n, &t, &f).unwrap()
}

fn literal_true(i: &ThreeValuedInterpretation, a: AtomId, negated: bool) -> bool {
    i.value(a) == if negated { Truth::False } else { Truth::True }
}

fn literal_false(i: &ThreeValuedInterpretation, a: AtomId, negated: bool) -> bool {
    i.value(a) == if negated { Truth::True } else { Truth::False }
}

/// Upward iteration of `OT_I` from the empty set.
fn lfp_ot_reference(g: &GroundProgram, i: &ThreeValuedInterpretation) -> BTreeSet<AtomId> {
    let mut t = BTreeSet::new();
    loop {
        let next: BTreeSet<AtomId> = g
            .rules()
            .iter()
            .filter(|r| i.value(r.head) != Truth::True)
            .filter(|r| {
                r.body
                    .iter()
                    .all(|l| literal_true(i, l.atom, l.negated) || (!l.negated && t.contains(&l.atom)))
            })
            .map(|r| r.head)
            .collect();
        if next == t {
            return t;
        }
        t = next;
    }
}

/// Downward iteration of `OF_I` from the undefined atoms.
fn gfp_of_reference(g: &GroundProgram, i: &ThreeValuedInterpretation) -> BTreeSet<AtomId> {
    let mut f = i.undefined_atoms();
    loop {
        let next: BTreeSet<AtomId> = f
            .iter()
            .copied()
            .filter(|&a| {
                g.rules().iter().filter(|r| r.head == a).all(|r| {
                    r.body
                        .iter()
                        .any(|l| literal_false(i, l.atom, l.negated) || (!l.negated && f.contains(&l.atom)))
                })
            })
            .collect();
        if next == f {
            return f;
        }
        f = next;
    }
}

#[test]
fn fixpoint_operators_match_literal_iteration() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..400 {
        let n = rng.random_range(1..=8);
        let m = rng.random_range(0..=10);
        let g = random_ground(&mut rng, n, m);
        let n = g.atom_count();
        for _ in 0..4 {
            let i = random_interpretation(&mut rng, n);
            assert_eq!(lfp_ot(&g, &i), lfp_ot_reference(&g, &i), "{g}");
            assert_eq!(gfp_of(&g, &i), gfp_of_reference(&g, &i), "{g}");
        }
        let w = wfm(&g);
        for pair in w.iterations.windows(2) {
            assert!(pair[0].le(&pair[1]));
            assert_ne!(pair[0], pair[1]);
        }
        // the well-founded model is a fixpoint of the iterated operator
        let m = &w.model;
        let t = lfp_ot(&g, m);
        let f = gfp_of(&g, m);
        assert!(t.is_empty() && f.is_empty(), "{g}");
    }
}

#[test]
fn answer_set_search_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..400 {
        let n = rng.random_range(1..=10);
        let m = rng.random_range(0..=14);
        let g = random_ground(&mut rng, n, m);
        let found = enumerate_answer_sets(&g, 64).unwrap();
        assert_eq!(found, brute_force_answer_sets(&g), "{g}");
        let m = wfm(&g).model;
        for s in &found {
            assert!(is_stable(&g, &s.atoms));
            assert!(m.true_atoms().is_subset(&s.atoms));
            assert!(m.false_atoms().is_disjoint(&s.atoms));
        }
    }
}

fn herbrand_universe(rules: &[Rule]) -> Vec<Term> {
    let names: BTreeSet<String> = rules
        .iter()
        .flat_map(|r| std::iter::once(&r.head).chain(r.body.iter().map(|l| &l.atom)))
        .flat_map(|a| a.args.iter())
        .filter(|t| !t.is_variable())
        .map(|t| t.name().to_string())
        .collect();
    names.iter().map(|n| Term::new(n)).collect()
}

fn substitute(a: &Atom, sigma: &BTreeMap<String, Term>) -> Atom {
    Atom::new(
        a.predicate.clone(),
        a.args
            .iter()
            .map(|t| if t.is_variable() { sigma[t.name()].clone() } else { t.clone() })
            .collect(),
    )
}

/// Every instance of every rule over the Herbrand universe.
fn full_instantiation(rules: &[Rule]) -> Vec<Rule> {
    let universe = herbrand_universe(rules);
    let mut out = Vec::new();
    for r in rules {
        let vars: Vec<String> = {
            let set: BTreeSet<&str> = r.head.variables().chain(r.body.iter().flat_map(|l| l.atom.variables())).collect();
            set.into_iter().map(String::from).collect()
        };
        if !vars.is_empty() && universe.is_empty() {
            continue;
        }
        let combos = universe.len().pow(vars.len() as u32);
        for mut c in 0..combos {
            let mut sigma = BTreeMap::new();
            for v in &vars {
                sigma.insert(v.clone(), universe[c % universe.len()].clone());
                c /= universe.len();
            }
            out.push(Rule::new(
                substitute(&r.head, &sigma),
                r.body
                    .iter()
                    .map(|l| Literal {
                        atom: substitute(&l.atom, &sigma),
                        negated: l.negated,
                    })
                    .collect(),
            ));
        }
    }
    out
}

fn named_models(g: &GroundProgram) -> BTreeSet<BTreeSet<String>> {
    enumerate_answer_sets(g, 64)
        .unwrap()
        .iter()
        .map(|s| s.atoms.iter().map(|&a| g.atom(a).to_string()).collect())
        .collect()
}

#[test]
fn grounding_preserves_answer_sets_and_wfm() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let cfg = CorpusConfig {
        max_constants: 3,
        ..CorpusConfig::default()
    };
    for _ in 0..150 {
        let p = random_program(&mut rng, &cfg);
        let mut rules: Vec<Rule> = p.prob_facts().iter().map(|f| Rule::fact(f.atom.clone())).collect();
        rules.extend(p.rules().iter().cloned());
        let smart = ground_program(&rules);
        let naive = GroundProgram::from_rules(&full_instantiation(&rules));
        assert_eq!(named_models(&smart), named_models(&naive), "{p}");

        let ms = wfm(&smart).model;
        let mn = wfm(&naive).model;
        for a in naive.herbrand_base() {
            let expect = match smart.lookup(naive.atom(a)) {
                Some(id) => ms.value(id),
                None => Truth::False,
            };
            assert_eq!(mn.value(a), expect, "{} in {p}", naive.atom(a));
        }
        // every instance produced is an instance of the naive grounding
        let all: BTreeSet<String> = naive.canonical_rules().into_iter().collect();
        assert!(smart.canonical_rules().iter().all(|r| all.contains(r)));
    }
}

type Edge = (usize, usize, bool);

fn brute_force_odd_cycle(n: usize, edges: &[Edge]) -> bool {
    fn dfs(start: usize, at: usize, odd: bool, on_path: &mut Vec<bool>, edges: &[Edge]) -> bool {
        for &(a, b, neg) in edges {
            if a != at {
                continue;
            }
            let parity = odd ^ neg;
            if b == start && parity {
                return true;
            }
            if b > start && !on_path[b] {
                on_path[b] = true;
                let found = dfs(start, b, parity, on_path, edges);
                on_path[b] = false;
                if found {
                    return true;
                }
            }
        }
        false
    }
    (0..n).any(|s| {
        let mut on_path = vec![false; n];
        on_path[s] = true;
        dfs(s, s, false, &mut on_path, edges)
    })
}

fn node(i: usize) -> Predicate {
    Predicate {
        name: format!("n{i}"),
        arity: 0,
    }
}

#[test]
fn olon_detection_matches_cycle_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..1500 {
        let n = rng.random_range(1..=8);
        let mut edges = Vec::new();
        for _ in 0..rng.random_range(0..=2 * n) {
            edges.push((rng.random_range(0..n), rng.random_range(0..n), rng.random_bool(0.3)));
        }
        let mut g = CallGraph::default();
        for i in 0..n {
            g.nodes.insert(node(i));
        }
        for &(a, b, neg) in &edges {
            g.edges.insert((node(a), node(b), if neg { Sign::Negative } else { Sign::Positive }));
        }
        let found = detect_olon(&g);
        assert_eq!(found.is_some(), brute_force_odd_cycle(n, &edges), "{edges:?}");
        if let Some(c) = found {
            assert_eq!(c.negations() % 2, 1);
            let k = c.steps.len();
            let distinct: BTreeSet<&Predicate> = c.steps.iter().map(|(p, _)| p).collect();
            assert_eq!(distinct.len(), k, "witness is a simple cycle");
            for i in 0..k {
                let (from, sign) = &c.steps[i];
                let to = &c.steps[(i + 1) % k].0;
                assert!(g.edges.contains(&(from.clone(), to.clone(), *sign)));
            }
        }
    }
}

#[test]
fn three_atom_cycles() {
    let a = parse_program("p :- q. q :- not r. r :- p.").unwrap();
    let b = parse_program("p :- q. q :- not r. r :- not p.").unwrap();
    let cycle = detect_olon(&pasp_core::ground::build_call_graph(&a)).unwrap();
    assert_eq!(cycle.negations(), 1);
    assert!(detect_olon(&pasp_core::ground::build_call_graph(&b)).is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn render_then_parse_is_identity(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_program(&mut rng, &CorpusConfig { max_rules: 12, max_prob_facts: 6, ..CorpusConfig::default() });
        let text = render_program(&p);
        let back = parse_program(&text).unwrap();
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(render_program(&back), text);
    }

    #[test]
    fn parser_never_panics(text in "[a-zA-Z0-9_(),.:%\\\\+ \n-]{0,60}") {
        let _ = parse_program(&text);
    }
}
