//! Well-founded model by Przymusinski's iterated fixpoint, and the WF reduct.
//!
//! `IFP(I) = I ∪ ⟨lfp(OT_I), gfp(OF_I)⟩`, iterated from the empty
//! interpretation. Both inner fixpoints are computed in linear time with
//! per-rule counters; `gfp(OF_I)` is obtained as the complement of the atoms
//! that still have a rule free of false literals whose positive body is
//! supported.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::ground::{AtomId, GroundProgram, GroundRule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Truth {
    True,
    False,
    Undefined,
}

/// A pair of disjoint atom sets `⟨I_T; I_F⟩` over a program's Herbrand base.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreeValuedInterpretation {
    values: Vec<Truth>,
}

impl ThreeValuedInterpretation {
    /// Every atom undefined.
    pub fn empty(atom_count: usize) -> Self {
        ThreeValuedInterpretation {
            values: vec![Truth::Undefined; atom_count],
        }
    }

    /// `None` if the two sets overlap or mention atoms outside the base.
    pub fn from_sets(
        atom_count: usize,
        true_set: &BTreeSet<AtomId>,
        false_set: &BTreeSet<AtomId>,
    ) -> Option<Self> {
        let mut i = Self::empty(atom_count);
        for &a in true_set {
            *i.values.get_mut(a.index())? = Truth::True;
        }
        for &a in false_set {
            let v = i.values.get_mut(a.index())?;
            if *v == Truth::True {
                return None;
            }
            *v = Truth::False;
        }
        Some(i)
    }

    pub(crate) fn from_values(values: Vec<Truth>) -> Self {
        ThreeValuedInterpretation { values }
    }

    pub fn value(&self, a: AtomId) -> Truth {
        self.values[a.index()]
    }

    pub fn values(&self) -> &[Truth] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn select(&self, t: Truth) -> BTreeSet<AtomId> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v == t)
            .map(|(i, _)| AtomId(i as u32))
            .collect()
    }

    /// `t(I)`
    pub fn true_atoms(&self) -> BTreeSet<AtomId> {
        self.select(Truth::True)
    }

    /// `f(I)`
    pub fn false_atoms(&self) -> BTreeSet<AtomId> {
        self.select(Truth::False)
    }

    /// `u(I)`
    pub fn undefined_atoms(&self) -> BTreeSet<AtomId> {
        self.select(Truth::Undefined)
    }

    /// `⟨I_T; I_F⟩ ≤ ⟨J_T; J_F⟩` iff `I_T ⊆ J_T` and `I_F ⊆ J_F`.
    pub fn le(&self, other: &Self) -> bool {
        self.values.len() == other.values.len()
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| *a == Truth::Undefined || a == b)
    }
}

/// Occurrence lists over a ground program.
///
/// `neg_fixed[a] = Some(v)` pins the value of every literal `not a` to `v`,
/// regardless of the interpretation. An empty slice pins nothing. The
/// answer-set search uses this to branch on negative literals.
#[derive(Debug, Clone)]
pub(crate) struct RuleIndex {
    pub(crate) atom_count: usize,
    heads: Vec<u32>,
    pos: Vec<Vec<u32>>,
    neg: Vec<Vec<u32>>,
    pos_occ: Vec<Vec<u32>>,
}

impl RuleIndex {
    pub(crate) fn new(g: &GroundProgram) -> Self {
        let n = g.atom_count();
        let mut idx = RuleIndex {
            atom_count: n,
            heads: Vec::with_capacity(g.rules().len()),
            pos: Vec::with_capacity(g.rules().len()),
            neg: Vec::with_capacity(g.rules().len()),
            pos_occ: vec![Vec::new(); n],
        };
        for (ri, r) in g.rules().iter().enumerate() {
            idx.heads.push(r.head.0);
            let pos: Vec<u32> = r.positive_body().map(|a| a.0).collect();
            for &b in &pos {
                idx.pos_occ[b as usize].push(ri as u32);
            }
            idx.pos.push(pos);
            idx.neg.push(r.negative_body().map(|a| a.0).collect());
        }
        idx
    }

    pub(crate) fn rule_count(&self) -> usize {
        self.heads.len()
    }

    /// Atoms that occur in some negative literal.
    pub(crate) fn negative_atoms(&self) -> Vec<u32> {
        let mut seen = vec![false; self.atom_count];
        for ns in &self.neg {
            for &a in ns {
                seen[a as usize] = true;
            }
        }
        (0..self.atom_count as u32).filter(|&a| seen[a as usize]).collect()
    }

    fn neg_true(i: &[Truth], fixed: &[Option<bool>], a: u32) -> bool {
        match fixed.get(a as usize).copied().flatten() {
            Some(v) => v,
            None => i[a as usize] == Truth::False,
        }
    }

    fn neg_false(i: &[Truth], fixed: &[Option<bool>], a: u32) -> bool {
        match fixed.get(a as usize).copied().flatten() {
            Some(v) => !v,
            None => i[a as usize] == Truth::True,
        }
    }

    /// `lfp(OT_I)`: atoms not true in `i` derivable from rules whose body
    /// literals are each true in `i` or (positive and) already derived.
    pub(crate) fn lfp_ot(&self, i: &[Truth], fixed: &[Option<bool>]) -> Vec<bool> {
        let mut derived = vec![false; self.atom_count];
        let mut waiting = vec![0u32; self.rule_count()];
        let mut queue: Vec<u32> = Vec::new();
        let fire = |r: usize, derived: &mut Vec<bool>, queue: &mut Vec<u32>| {
            let h = self.heads[r];
            if i[h as usize] != Truth::True && !derived[h as usize] {
                derived[h as usize] = true;
                queue.push(h);
            }
        };
        let mut dead = vec![false; self.rule_count()];
        for r in 0..self.rule_count() {
            dead[r] = self.neg[r].iter().any(|&b| !Self::neg_true(i, fixed, b));
            waiting[r] = self.pos[r].iter().filter(|&&b| i[b as usize] != Truth::True).count() as u32;
            if !dead[r] && waiting[r] == 0 {
                fire(r, &mut derived, &mut queue);
            }
        }
        while let Some(a) = queue.pop() {
            for &r in &self.pos_occ[a as usize] {
                let r = r as usize;
                waiting[r] -= 1;
                if waiting[r] == 0 && !dead[r] {
                    fire(r, &mut derived, &mut queue);
                }
            }
        }
        derived
    }

    /// `gfp(OF_I)`: undefined atoms all of whose rules contain a literal
    /// false in `i` or a positive atom of the set itself.
    pub(crate) fn gfp_of(&self, i: &[Truth], fixed: &[Option<bool>]) -> Vec<bool> {
        // supported: undefined atoms with a rule free of false literals whose
        // undefined positive atoms are all supported
        let mut supported = vec![false; self.atom_count];
        let mut waiting = vec![0u32; self.rule_count()];
        let mut blocked = vec![false; self.rule_count()];
        let mut queue: Vec<u32> = Vec::new();
        for r in 0..self.rule_count() {
            blocked[r] = self.pos[r].iter().any(|&b| i[b as usize] == Truth::False)
                || self.neg[r].iter().any(|&b| Self::neg_false(i, fixed, b));
            waiting[r] = self.pos[r]
                .iter()
                .filter(|&&b| i[b as usize] == Truth::Undefined)
                .count() as u32;
            let h = self.heads[r] as usize;
            if !blocked[r] && waiting[r] == 0 && i[h] == Truth::Undefined && !supported[h] {
                supported[h] = true;
                queue.push(h as u32);
            }
        }
        while let Some(a) = queue.pop() {
            for &r in &self.pos_occ[a as usize] {
                let r = r as usize;
                waiting[r] -= 1;
                let h = self.heads[r] as usize;
                if waiting[r] == 0 && !blocked[r] && i[h] == Truth::Undefined && !supported[h] {
                    supported[h] = true;
                    queue.push(h as u32);
                }
            }
        }
        i.iter()
            .zip(&supported)
            .map(|(v, s)| *v == Truth::Undefined && !s)
            .collect()
    }

    /// Least fixpoint of IFP, optionally recording every intermediate
    /// interpretation.
    pub(crate) fn wfm(
        &self,
        fixed: &[Option<bool>],
        mut history: Option<&mut Vec<Vec<Truth>>>,
    ) -> Vec<Truth> {
        let mut i = vec![Truth::Undefined; self.atom_count];
        loop {
            if let Some(h) = history.as_deref_mut() {
                h.push(i.clone());
            }
            let t = self.lfp_ot(&i, fixed);
            let f = self.gfp_of(&i, fixed);
            let mut changed = false;
            for a in 0..self.atom_count {
                if t[a] {
                    debug_assert!(!f[a], "OT and OF overlap");
                    debug_assert_ne!(i[a], Truth::False, "OT re-derives a false atom");
                    changed |= i[a] != Truth::True;
                    i[a] = Truth::True;
                } else if f[a] {
                    changed = true;
                    i[a] = Truth::False;
                }
            }
            if !changed {
                return i;
            }
        }
    }

    /// `least_model(P^M) = M` for the Gelfond-Lifschitz reduct, checked
    /// without materialising the reduct.
    pub(crate) fn is_stable(&self, model: &[bool]) -> bool {
        let mut derived = vec![false; self.atom_count];
        let mut waiting = vec![0u32; self.rule_count()];
        let mut queue: Vec<u32> = Vec::new();
        for (r, wait) in waiting.iter_mut().enumerate() {
            if self.neg[r].iter().any(|&b| model[b as usize]) {
                *wait = u32::MAX;
                continue;
            }
            *wait = self.pos[r].len() as u32;
            let h = self.heads[r] as usize;
            if *wait == 0 && !derived[h] {
                derived[h] = true;
                queue.push(h as u32);
            }
        }
        while let Some(a) = queue.pop() {
            for &r in &self.pos_occ[a as usize] {
                let r = r as usize;
                if waiting[r] == u32::MAX {
                    continue;
                }
                waiting[r] -= 1;
                let h = self.heads[r] as usize;
                if waiting[r] == 0 && !derived[h] {
                    derived[h] = true;
                    queue.push(h as u32);
                }
            }
        }
        derived == model
    }
}

fn to_set(bits: &[bool]) -> BTreeSet<AtomId> {
    bits.iter()
        .enumerate()
        .filter(|(_, b)| **b)
        .map(|(i, _)| AtomId(i as u32))
        .collect()
}

/// Least fixpoint of `OT_I`, iterated from the empty set.
pub fn lfp_ot(g: &GroundProgram, i: &ThreeValuedInterpretation) -> BTreeSet<AtomId> {
    to_set(&RuleIndex::new(g).lfp_ot(&i.values, &[]))
}

/// Greatest fixpoint of `OF_I`, iterated downward from the atoms not true
/// in `i`.
pub fn gfp_of(g: &GroundProgram, i: &ThreeValuedInterpretation) -> BTreeSet<AtomId> {
    to_set(&RuleIndex::new(g).gfp_of(&i.values, &[]))
}

#[derive(Debug, Clone)]
pub struct WellFoundedModel {
    pub model: ThreeValuedInterpretation,
    /// `I_0 = ⟨∅;∅⟩, I_1, …, I_k = WFM`.
    pub iterations: Vec<ThreeValuedInterpretation>,
}

impl WellFoundedModel {
    /// No undefined atoms.
    pub fn is_dynamically_stratified(&self) -> bool {
        self.model.values.iter().all(|v| *v != Truth::Undefined)
    }
}

pub fn wfm(g: &GroundProgram) -> WellFoundedModel {
    let mut history = Vec::new();
    let model = RuleIndex::new(g).wfm(&[], Some(&mut history));
    WellFoundedModel {
        model: ThreeValuedInterpretation::from_values(model),
        iterations: history
            .into_iter()
            .map(ThreeValuedInterpretation::from_values)
            .collect(),
    }
}

/// Drops every rule with a body literal false in `m` and deletes the body
/// literals true in `m` from the others. Shares `g`'s atom table.
pub fn wf_reduct(g: &GroundProgram, m: &ThreeValuedInterpretation) -> GroundProgram {
    let lit_value = |atom: AtomId, negated: bool| match (m.value(atom), negated) {
        (Truth::Undefined, _) => Truth::Undefined,
        (Truth::True, false) | (Truth::False, true) => Truth::True,
        _ => Truth::False,
    };
    let rules = g
        .rules()
        .iter()
        .filter(|r| r.body.iter().all(|l| lit_value(l.atom, l.negated) != Truth::False))
        .map(|r| GroundRule {
            head: r.head,
            body: r
                .body
                .iter()
                .filter(|l| lit_value(l.atom, l.negated) != Truth::True)
                .copied()
                .collect(),
        })
        .collect();
    g.with_rules(rules)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground::ground_program;
    use crate::syntax::{parse_program, parse_query};
    use alloc::string::String;

    fn gp(text: &str) -> GroundProgram {
        ground_program(parse_program(text).unwrap().rules())
    }

    fn id(g: &GroundProgram, a: &str) -> AtomId {
        g.lookup(&parse_query(a).unwrap().atom).unwrap()
    }

    fn names(g: &GroundProgram, s: &BTreeSet<AtomId>) -> Vec<String> {
        let mut v: Vec<String> = s.iter().map(|&a| alloc::format!("{}", g.atom(a))).collect();
        v.sort();
        v
    }

    #[test]
    fn lfp_positive_program() {
        let g = gp("a. b :- a.");
        let t = lfp_ot(&g, &ThreeValuedInterpretation::empty(g.atom_count()));
        assert_eq!(names(&g, &t), ["a", "b"]);
    }

    #[test]
    fn lfp_blocked_by_true_atom() {
        let g = gp("p :- not r. r.");
        let i = ThreeValuedInterpretation::from_sets(
            g.atom_count(),
            &BTreeSet::from([id(&g, "r")]),
            &BTreeSet::new(),
        )
        .unwrap();
        assert!(lfp_ot(&g, &i).is_empty());
    }

    #[test]
    fn even_cycle_fixpoints_from_empty() {
        let g = gp("p :- q. q :- not r. r :- not p.");
        let empty = ThreeValuedInterpretation::empty(g.atom_count());
        assert!(lfp_ot(&g, &empty).is_empty());
        assert!(gfp_of(&g, &empty).is_empty());
    }

    #[test]
    fn gfp_unsupported_atoms() {
        let g = GroundProgram::from_rules(parse_program("a. b :- c.").unwrap().rules());
        let f = gfp_of(&g, &ThreeValuedInterpretation::empty(g.atom_count()));
        assert_eq!(names(&g, &f), ["b", "c"]);
    }

    #[test]
    fn stratified_program() {
        let g = gp("r. p :- not r.");
        let w = wfm(&g);
        assert_eq!(names(&g, &w.model.true_atoms()), ["r"]);
        assert_eq!(names(&g, &w.model.false_atoms()), ["p"]);
        assert!(w.is_dynamically_stratified());
    }

    #[test]
    fn odd_cycle_all_undefined() {
        let g = gp("p :- q. q :- not r. r :- p.");
        let w = wfm(&g);
        assert_eq!(w.model.undefined_atoms().len(), 3);
        assert!(!w.is_dynamically_stratified());
        assert_eq!(wf_reduct(&g, &w.model).canonical_rules(), g.canonical_rules());
    }

    #[test]
    fn certain_graph_wfm_and_reduct() {
        let g = gp("e(a,b). e(a,c). e(b,d).
            edge(A,B):- e(A,B), not nedge(A,B).
            nedge(A,B):- e(A,B), not edge(A,B).
            path(A,B):- edge(A,B).
            path(A,B):- edge(A,C), path(C,B).");
        let w = wfm(&g);
        assert_eq!(names(&g, &w.model.true_atoms()), ["e(a,b)", "e(a,c)", "e(b,d)"]);
        assert!(w.model.false_atoms().is_empty());
        for a in ["edge(a,b)", "nedge(a,c)", "edge(b,d)", "path(a,d)"] {
            assert_eq!(w.model.value(id(&g, a)), Truth::Undefined, "{a}");
        }
        let reduct = wf_reduct(&g, &w.model).canonical_rules();
        for r in [
            "e(a,b).",
            "edge(a,b) :- not nedge(a,b).",
            "nedge(b,d) :- not edge(b,d).",
            "path(a,d) :- edge(a,b), path(b,d).",
            "path(b,d) :- edge(b,d).",
        ] {
            assert!(reduct.iter().any(|x| x == r), "{r}");
        }
    }

    #[test]
    fn reduct_of_stratified_program_is_its_true_facts() {
        let g = gp("a. b :- a, not c. d :- c.");
        let w = wfm(&g);
        assert!(w.is_dynamically_stratified());
        assert_eq!(wf_reduct(&g, &w.model).canonical_rules(), ["a.", "b."]);
    }

    #[test]
    fn iterations_increase_strictly() {
        let g = gp("a. b :- not a. c :- not b. d :- not c, not e. e :- not d.");
        let w = wfm(&g);
        for pair in w.iterations.windows(2) {
            assert!(pair[0].le(&pair[1]));
            assert_ne!(pair[0], pair[1]);
        }
        assert_eq!(w.iterations.last().unwrap(), &w.model);
    }

    #[test]
    fn from_sets_rejects_overlap() {
        let s = BTreeSet::from([AtomId(0)]);
        assert!(ThreeValuedInterpretation::from_sets(2, &s, &s).is_none());
        assert!(ThreeValuedInterpretation::from_sets(1, &BTreeSet::from([AtomId(3)]), &BTreeSet::new()).is_none());
    }
}
