//! Answer-set search by branching on negative literals.
//!
//! A stable model `M` is determined by which negatively occurring atoms it
//! contains. The search pins the value of `not b` for one undefined atom `b`
//! at a time and recomputes the well-founded model of the pinned program
//! `P'`. Every stable model of `P` agreeing with the pins is a stable model
//! of `P'` (their reducts coincide), so it contains `t(WFM(P'))` and avoids
//! `f(WFM(P'))`; branches contradicting a pin are pruned. Once no undefined
//! negative atom is left, `WFM(P')` is two-valued and its true set is the
//! only candidate, which is then verified against `P`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::ground::{AtomId, GroundProgram};
use crate::wfs::{RuleIndex, Truth};

pub(crate) type Interrupt<'a> = Option<&'a (dyn Fn() -> bool + Sync)>;

pub(crate) struct Searcher {
    index: RuleIndex,
    branch_atoms: Vec<u32>,
}

/// Restriction on the models visited: the atom must have the given value.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Goal {
    pub atom: u32,
    pub holds: bool,
}

impl Searcher {
    pub(crate) fn new(g: &GroundProgram) -> Self {
        let index = RuleIndex::new(g);
        let branch_atoms = index.negative_atoms();
        Searcher {
            index,
            branch_atoms,
        }
    }

    pub(crate) fn atom_count(&self) -> usize {
        self.index.atom_count
    }

    pub(crate) fn wfm(&self, fixed: &[Option<bool>]) -> Vec<Truth> {
        self.index.wfm(fixed, None)
    }

    /// Visits every stable model consistent with `fixed` (and `goal`), until
    /// `visit` returns `false`. Returns whether the search ran to completion.
    pub(crate) fn for_each_model(
        &self,
        fixed: &mut Vec<Option<bool>>,
        goal: Option<Goal>,
        interrupt: Interrupt<'_>,
        visit: &mut dyn FnMut(&[bool]) -> bool,
    ) -> Result<bool> {
        fixed.resize(self.index.atom_count, None);
        let pinned: Vec<u32> = (0..self.index.atom_count as u32)
            .filter(|&a| fixed[a as usize].is_some())
            .collect();
        self.dfs(fixed, &mut pinned.clone(), goal, interrupt, visit)
    }

    /// First stable model consistent with `fixed` and `goal`.
    pub(crate) fn find_model(
        &self,
        fixed: &mut Vec<Option<bool>>,
        goal: Option<Goal>,
        interrupt: Interrupt<'_>,
    ) -> Result<Option<Vec<bool>>> {
        let mut found = None;
        self.for_each_model(fixed, goal, interrupt, &mut |m| {
            found = Some(m.to_vec());
            false
        })?;
        Ok(found)
    }

    fn dfs(
        &self,
        fixed: &mut Vec<Option<bool>>,
        pinned: &mut Vec<u32>,
        goal: Option<Goal>,
        interrupt: Interrupt<'_>,
        visit: &mut dyn FnMut(&[bool]) -> bool,
    ) -> Result<bool> {
        if interrupt.is_some_and(|f| f()) {
            return Err(Error::Interrupted);
        }
        let m = self.index.wfm(fixed, None);
        // `not a` pinned true requires a ∉ M, pinned false requires a ∈ M
        let contradicted = pinned.iter().any(|&a| match fixed[a as usize] {
            Some(true) => m[a as usize] == Truth::True,
            Some(false) => m[a as usize] == Truth::False,
            None => false,
        });
        if contradicted {
            return Ok(true);
        }
        if let Some(g) = goal {
            let v = m[g.atom as usize];
            if (g.holds && v == Truth::False) || (!g.holds && v == Truth::True) {
                return Ok(true);
            }
        }
        let next = self
            .branch_atoms
            .iter()
            .copied()
            .find(|&a| fixed[a as usize].is_none() && m[a as usize] == Truth::Undefined);
        let Some(b) = next else {
            let model: Vec<bool> = m.iter().map(|v| *v == Truth::True).collect();
            debug_assert!(m.iter().all(|v| *v != Truth::Undefined));
            let consistent = pinned.iter().all(|&a| fixed[a as usize] != Some(model[a as usize]));
            if !consistent || !self.index.is_stable(&model) {
                return Ok(true);
            }
            if let Some(g) = goal {
                if model[g.atom as usize] != g.holds {
                    return Ok(true);
                }
            }
            return Ok(visit(&model));
        };
        pinned.push(b);
        let mut keep_going = true;
        // b ∈ M first, then b ∉ M
        for not_b in [false, true] {
            fixed[b as usize] = Some(not_b);
            keep_going = self.dfs(fixed, pinned, goal, interrupt, visit)?;
            if !keep_going {
                break;
            }
        }
        fixed[b as usize] = None;
        pinned.pop();
        Ok(keep_going)
    }
}

/// Pins that select a subset of atoms as facts: `not a` is true iff `a` is
/// not selected.
pub(crate) fn pin_atom(fixed: &mut [Option<bool>], atom: AtomId, selected: bool) {
    fixed[atom.index()] = Some(!selected);
}

pub(crate) fn unpinned(n: usize) -> Vec<Option<bool>> {
    vec![None; n]
}
