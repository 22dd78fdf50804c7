//! Seeded random PASPs for property testing.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::residual::check_olon_free;
use crate::syntax::{Atom, Literal, ProbFact, Program, Query, Rule, Term};

const CONSTANTS: [&str; 4] = ["a", "b", "c", "d"];
const VARIABLES: [&str; 2] = ["X", "Y"];
const FACT_PREDICATES: [&str; 2] = ["e", "s"];
const RULE_PREDICATES: [&str; 4] = ["p", "q", "r", "t"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorpusConfig {
    pub max_prob_facts: usize,
    pub max_rules: usize,
    pub max_constants: usize,
    pub max_arity: usize,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            max_prob_facts: 4,
            max_rules: 8,
            max_constants: 4,
            max_arity: 2,
        }
    }
}

struct Signature {
    constants: Vec<&'static str>,
    arity: [usize; 6],
}

impl Signature {
    fn random(rng: &mut impl Rng, cfg: &CorpusConfig) -> Self {
        let nc = rng.random_range(1..=cfg.max_constants.clamp(1, CONSTANTS.len()));
        let mut arity = [0; 6];
        for a in &mut arity {
            *a = rng.random_range(0..=cfg.max_arity);
        }
        Signature {
            constants: CONSTANTS[..nc].to_vec(),
            arity,
        }
    }

    fn arity_of(&self, pred: &str) -> usize {
        let i = FACT_PREDICATES
            .iter()
            .chain(&RULE_PREDICATES)
            .position(|p| *p == pred)
            .expect("known predicate");
        self.arity[i]
    }

    fn ground_atom(&self, rng: &mut impl Rng, pred: &str) -> Atom {
        let args = (0..self.arity_of(pred))
            .map(|_| Term::new(self.constants.choose(rng).expect("a constant")))
            .collect();
        Atom::new(pred, args)
    }

    /// An atom whose arguments are drawn from `vars` and the constants.
    fn atom_over(&self, rng: &mut impl Rng, pred: &str, vars: &[&str]) -> Atom {
        let args = (0..self.arity_of(pred))
            .map(|_| {
                if !vars.is_empty() && rng.random_bool(0.6) {
                    Term::new(vars.choose(rng).expect("a variable"))
                } else {
                    Term::new(self.constants.choose(rng).expect("a constant"))
                }
            })
            .collect();
        Atom::new(pred, args)
    }
}

fn random_rule(rng: &mut impl Rng, sig: &Signature) -> Rule {
    let all: Vec<&str> = FACT_PREDICATES.iter().chain(&RULE_PREDICATES).copied().collect();
    let n_pos = rng.random_range(0..=2);
    let n_neg = rng.random_range(0..=1);
    let mut body = Vec::new();
    for _ in 0..n_pos {
        let pred = all.choose(rng).expect("a predicate");
        body.push(Literal::pos(sig.atom_over(rng, pred, &VARIABLES)));
    }
    let bound: Vec<&str> = {
        let set: BTreeSet<&str> = body.iter().flat_map(|l| l.atom.variables()).collect();
        VARIABLES.iter().copied().filter(|v| set.contains(v)).collect()
    };
    for _ in 0..n_neg {
        let pred = all.choose(rng).expect("a predicate");
        body.push(Literal::neg(sig.atom_over(rng, pred, &bound)));
    }
    let head_pred = RULE_PREDICATES.choose(rng).expect("a predicate");
    Rule::new(sig.atom_over(rng, head_pred, &bound), body)
}

fn random_prob(rng: &mut impl Rng) -> f64 {
    // multiples of 0.05 render and parse back exactly
    let k: u32 = rng.random_range(1..20);
    let text = format!("{}", f64::from(k) / 20.0);
    text.parse().expect("a decimal")
}

/// A random valid program; it may contain odd loops over negation.
pub fn random_program(rng: &mut impl Rng, cfg: &CorpusConfig) -> Program {
    loop {
        let sig = Signature::random(rng, cfg);
        let mut facts = Vec::new();
        let mut seen = BTreeSet::new();
        for _ in 0..rng.random_range(0..=cfg.max_prob_facts) {
            let pred = FACT_PREDICATES.choose(rng).expect("a predicate");
            let atom = sig.ground_atom(rng, pred);
            if seen.insert(atom.clone()) {
                facts.push(ProbFact::new(random_prob(rng), atom));
            }
        }
        let rules = (0..rng.random_range(0..=cfg.max_rules)).map(|_| random_rule(rng, &sig)).collect();
        if let Ok(p) = Program::new(facts, rules) {
            return p;
        }
    }
}

/// A random program free of odd loops over negation, with a ground query
/// over one of its predicates.
pub fn random_pasp(rng: &mut impl Rng, cfg: &CorpusConfig) -> (Program, Query) {
    loop {
        let p = random_program(rng, cfg);
        if check_olon_free(&p).is_err() {
            continue;
        }
        let preds: Vec<&Atom> = p
            .rules()
            .iter()
            .map(|r| &r.head)
            .chain(p.prob_facts().iter().map(|f| &f.atom))
            .collect();
        let Some(template) = preds.choose(rng) else { continue };
        let constants: BTreeSet<String> = p
            .rules()
            .iter()
            .flat_map(|r| core::iter::once(&r.head).chain(r.body.iter().map(|l| &l.atom)))
            .chain(p.prob_facts().iter().map(|f| &f.atom))
            .flat_map(|a| a.args.iter())
            .filter(|t| !t.is_variable())
            .map(|t| String::from(t.name()))
            .collect();
        let constants: Vec<String> = if constants.is_empty() {
            Vec::from([String::from("a")])
        } else {
            constants.into_iter().collect()
        };
        let args = (0..template.arity())
            .map(|_| Term::new(constants.choose(rng).expect("a constant")))
            .collect();
        let query = Query::new(Atom::new(template.predicate.clone(), args)).expect("ground query");
        return (p, query);
    }
}

/// `count` OLON-free PASPs with queries, reproducible from `seed`.
pub fn corpus(seed: u64, count: usize, cfg: &CorpusConfig) -> Vec<(Program, Query)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_pasp(&mut rng, cfg)).collect()
}

/// `count` valid programs (odd loops allowed), reproducible from `seed`.
pub fn random_programs(seed: u64, count: usize, cfg: &CorpusConfig) -> Vec<Program> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_program(&mut rng, cfg)).collect()
}
