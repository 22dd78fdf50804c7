//! Gelfond-Lifschitz reduct, stable-model checking and enumeration.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::ground::{AtomId, GroundProgram, GroundRule};
use crate::search::{unpinned, Searcher};
use crate::wfs::wfm;

/// Default bound on `|u(WFM)|` for full answer-set enumeration.
pub const DEFAULT_MAX_UNDEFINED: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AnswerSet {
    pub atoms: BTreeSet<AtomId>,
}

impl AnswerSet {
    pub fn contains(&self, a: AtomId) -> bool {
        self.atoms.contains(&a)
    }

    fn from_bits(bits: &[bool]) -> Self {
        AnswerSet {
            atoms: bits
                .iter()
                .enumerate()
                .filter(|(_, b)| **b)
                .map(|(i, _)| AtomId(i as u32))
                .collect(),
        }
    }
}

/// `P^I = {r | B⁺(r) ⊆ I, B⁻(r) ∩ I = ∅}` with the (true) negative
/// literals removed, so the result is a positive program.
pub fn gl_reduct(g: &GroundProgram, i: &BTreeSet<AtomId>) -> GroundProgram {
    let rules = g
        .rules()
        .iter()
        .filter(|r| r.positive_body().all(|a| i.contains(&a)) && !r.negative_body().any(|a| i.contains(&a)))
        .map(|r| GroundRule {
            head: r.head,
            body: r.body.iter().filter(|l| !l.negated).copied().collect(),
        })
        .collect();
    g.with_rules(rules)
}

/// Least fixpoint of one-step rule application from the empty set.
pub fn least_model(g: &GroundProgram) -> Result<BTreeSet<AtomId>> {
    if g.has_negation() {
        return Err(Error::NotPositive);
    }
    let mut model = BTreeSet::new();
    loop {
        let before = model.len();
        for r in g.rules() {
            if r.positive_body().all(|a| model.contains(&a)) {
                model.insert(r.head);
            }
        }
        if model.len() == before {
            return Ok(model);
        }
    }
}

/// `i` equals the least model of its reduct.
pub fn is_stable(g: &GroundProgram, i: &BTreeSet<AtomId>) -> bool {
    least_model(&gl_reduct(g, i)).is_ok_and(|m| &m == i)
}

/// All stable models, in increasing order.
///
/// Fails when the well-founded model leaves more than `max_undefined`
/// atoms undefined.
pub fn enumerate_answer_sets(g: &GroundProgram, max_undefined: usize) -> Result<Vec<AnswerSet>> {
    let undefined = wfm(g).model.undefined_atoms().len();
    if undefined > max_undefined {
        return Err(Error::TooManyUndefined {
            count: undefined,
            limit: max_undefined,
        });
    }
    let searcher = Searcher::new(g);
    let mut out = Vec::new();
    searcher.for_each_model(&mut unpinned(g.atom_count()), None, None, &mut |m| {
        out.push(AnswerSet::from_bits(m));
        true
    })?;
    out.sort();
    Ok(out)
}

/// `AS_V = {A ∩ V | A ∈ sets}`
pub fn project_answer_sets(sets: &[AnswerSet], v: &BTreeSet<AtomId>) -> BTreeSet<BTreeSet<AtomId>> {
    sets.iter()
        .map(|s| s.atoms.intersection(v).copied().collect())
        .collect()
}

/// Every subset of the Herbrand base filtered through [`is_stable`].
/// Exponential; meant as a reference for small programs.
pub fn brute_force_answer_sets(g: &GroundProgram) -> Vec<AnswerSet> {
    let n = g.atom_count();
    assert!(n < 24, "brute force over {n} atoms");
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        let bits: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
        let set = AnswerSet::from_bits(&bits);
        if is_stable(g, &set.atoms) {
            out.push(set);
        }
    }
    out.sort();
    out
}

/// Every rule of `g` is satisfied by `m` read as a two-valued
/// interpretation.
pub fn is_model(g: &GroundProgram, m: &BTreeSet<AtomId>) -> bool {
    g.rules().iter().all(|r| {
        let body = r.body.iter().all(|l| m.contains(&l.atom) != l.negated);
        !body || m.contains(&r.head)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground::ground_program;
    use crate::syntax::{parse_program, parse_query};
    use alloc::string::{String, ToString};

    fn gp(text: &str) -> GroundProgram {
        GroundProgram::from_rules(parse_program(text).unwrap().rules())
    }

    fn set(g: &GroundProgram, atoms: &[&str]) -> BTreeSet<AtomId> {
        atoms
            .iter()
            .map(|a| g.lookup(&parse_query(a).unwrap().atom).unwrap())
            .collect()
    }

    fn names(g: &GroundProgram, s: &BTreeSet<AtomId>) -> Vec<String> {
        let mut v: Vec<String> = s.iter().map(|&a| g.atom(a).to_string()).collect();
        v.sort();
        v
    }

    const FIG_A: &str = "p :- q. q :- not r. r :- p.";
    const FIG_B: &str = "p :- q. q :- not r. r :- not p.";

    #[test]
    fn reduct_examples() {
        let b = gp(FIG_B);
        assert_eq!(gl_reduct(&b, &set(&b, &["p", "q"])).canonical_rules(), ["p :- q.", "q."]);
        let a = gp(FIG_A);
        let red = gl_reduct(&a, &BTreeSet::new());
        assert_eq!(red.canonical_rules(), ["q."]);
        assert_eq!(names(&a, &least_model(&red).unwrap()), ["q"]);
        let pos = gp("a. b :- a. c :- b, d.");
        let i = set(&pos, &["a", "b"]);
        assert_eq!(gl_reduct(&pos, &i).canonical_rules(), ["a.", "b :- a."]);
    }

    #[test]
    fn least_models() {
        let g = gp("a. b :- a.");
        assert_eq!(names(&g, &least_model(&g).unwrap()), ["a", "b"]);
        assert!(least_model(&gp("")).unwrap().is_empty());
        assert_eq!(least_model(&gp(FIG_A)), Err(Error::NotPositive));
    }

    #[test]
    fn stability_of_three_atom_cycles() {
        let b = gp(FIG_B);
        assert!(is_stable(&b, &set(&b, &["q", "p"])));
        assert!(is_stable(&b, &set(&b, &["r"])));
        assert!(!is_stable(&b, &BTreeSet::new()));
        assert_eq!(brute_force_answer_sets(&b).len(), 2);
        assert_eq!(enumerate_answer_sets(&b, 24).unwrap(), brute_force_answer_sets(&b));

        let a = gp(FIG_A);
        assert!(brute_force_answer_sets(&a).is_empty());
        assert!(enumerate_answer_sets(&a, 24).unwrap().is_empty());
    }

    #[test]
    fn non_relevant_example() {
        let g = gp("q :- a. a.");
        assert!(is_stable(&g, &set(&g, &["q", "a"])));
        assert_eq!(enumerate_answer_sets(&g, 24).unwrap().len(), 1);
    }

    #[test]
    fn certain_graph_projected_answer_sets() {
        let g = ground_program(
            parse_program(
                "e(a,b). e(a,c). e(b,d).
                 edge(A,B):- e(A,B), not nedge(A,B).
                 nedge(A,B):- e(A,B), not edge(A,B).
                 path(A,B):- edge(A,B).
                 path(A,B):- edge(A,C), edge(C,B).",
            )
            .unwrap()
            .rules(),
        );
        let sets = enumerate_answer_sets(&g, 24).unwrap();
        assert_eq!(sets.len(), 8);
        let paths: BTreeSet<AtomId> = g.herbrand_base().filter(|&a| g.atom(a).predicate == "path").collect();
        let projected: BTreeSet<Vec<String>> = project_answer_sets(&sets, &paths)
            .iter()
            .map(|s| names(&g, s))
            .collect();
        let expect: BTreeSet<Vec<String>> = [
            &[][..],
            &["path(a,c)"],
            &["path(a,b)"],
            &["path(b,d)"],
            &["path(a,c)", "path(b,d)"],
            &["path(a,b)", "path(a,c)"],
            &["path(a,b)", "path(a,d)", "path(b,d)"],
            &["path(a,b)", "path(a,c)", "path(a,d)", "path(b,d)"],
        ]
        .iter()
        .map(|s| s.iter().map(|x| x.to_string()).collect())
        .collect();
        assert_eq!(projected, expect);
    }

    #[test]
    fn projections() {
        let g = gp(FIG_B);
        let sets = enumerate_answer_sets(&g, 24).unwrap();
        assert_eq!(project_answer_sets(&sets, &BTreeSet::new()), BTreeSet::from([BTreeSet::new()]));
        let all: BTreeSet<AtomId> = g.herbrand_base().collect();
        let identity: BTreeSet<BTreeSet<AtomId>> = sets.iter().map(|s| s.atoms.clone()).collect();
        assert_eq!(project_answer_sets(&sets, &all), identity);
    }

    #[test]
    fn undefined_cap() {
        let g = gp("a :- not b. b :- not a. c :- not d. d :- not c.");
        assert_eq!(
            enumerate_answer_sets(&g, 3),
            Err(Error::TooManyUndefined { count: 4, limit: 3 })
        );
        assert_eq!(enumerate_answer_sets(&g, 4).unwrap().len(), 4);
    }

    #[test]
    fn models_satisfy_rules() {
        let g = gp("a :- not b. b :- not a. c :- a. c :- b. d :- c, not a.");
        for s in enumerate_answer_sets(&g, 24).unwrap() {
            assert!(is_model(&g, &s.atoms));
        }
    }
}
