//! Residual program extraction for PASP queries.
//!
//! Each probabilistic fact `p::a` becomes the even loop
//! `a :- not na. na :- not a.`, turning the PASP into a normal program
//! whose answer sets are exactly the answer sets of all its worlds. The
//! query's residual program is then the WF reduct of that program restricted
//! to undefined heads reachable from the query; surviving loops are turned
//! back into probabilistic facts.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::ground::{build_call_graph, build_dependency_graph, detect_olon, ground_program, CallGraph, GroundProgram};
use crate::syntax::{Atom, Literal, ProbFact, Program, Query, Rule};
use crate::wfs::{wf_reduct, wfm, Truth};

/// Predicate prefix of complement atoms. Predicates written by users start
/// with a lowercase letter, so the prefix can never clash with them.
pub const COMPLEMENT_PREFIX: &str = "_not_";

pub fn complement_atom(a: &Atom) -> Atom {
    Atom::new(format!("{COMPLEMENT_PREFIX}{}", a.predicate), a.args.clone())
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncodedFact {
    pub atom: Atom,
    pub complement: Atom,
    pub prob: f64,
}

/// Bijection between probabilistic-fact atoms and their complement atoms.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FactEncoding {
    facts: Vec<EncodedFact>,
    by_atom: BTreeMap<Atom, usize>,
    by_complement: BTreeMap<Atom, usize>,
}

impl FactEncoding {
    pub fn facts(&self) -> &[EncodedFact] {
        &self.facts
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn by_atom(&self, a: &Atom) -> Option<&EncodedFact> {
        self.by_atom.get(a).map(|&i| &self.facts[i])
    }

    pub fn by_complement(&self, na: &Atom) -> Option<&EncodedFact> {
        self.by_complement.get(na).map(|&i| &self.facts[i])
    }
}

/// Replaces each `p::a` by `a :- not na. na :- not a.`; other rules are
/// copied unchanged.
pub fn encode_probabilistic_facts(p: &Program) -> Result<(Vec<Rule>, FactEncoding)> {
    let mut enc = FactEncoding::default();
    let present: BTreeSet<&Atom> = p
        .rules()
        .iter()
        .flat_map(|r| core::iter::once(&r.head).chain(r.body.iter().map(|l| &l.atom)))
        .chain(p.prob_facts().iter().map(|f| &f.atom))
        .collect();
    let mut rules = Vec::with_capacity(p.rules().len() + 2 * p.prob_facts().len());
    for (i, pf) in p.prob_facts().iter().enumerate() {
        let na = complement_atom(&pf.atom);
        if present.contains(&na) {
            return Err(Error::FreshNameCollision { atom: na.to_string() });
        }
        rules.push(Rule::new(pf.atom.clone(), alloc::vec![Literal::neg(na.clone())]));
        rules.push(Rule::new(na.clone(), alloc::vec![Literal::neg(pf.atom.clone())]));
        enc.by_atom.insert(pf.atom.clone(), i);
        enc.by_complement.insert(na.clone(), i);
        enc.facts.push(EncodedFact {
            atom: pf.atom.clone(),
            complement: na,
            prob: pf.prob,
        });
    }
    rules.extend(p.rules().iter().cloned());
    Ok((rules, enc))
}

/// Fails with the witness cycle when the encoded program has an odd loop
/// over negation.
pub fn check_olon_free(p: &Program) -> Result<()> {
    let (rules, _) = encode_probabilistic_facts(p)?;
    let mut cg = CallGraph::from_rules(&rules);
    cg.nodes.extend(build_call_graph(p).nodes);
    match detect_olon(&cg) {
        Some(cycle) => Err(Error::Olon {
            witness: cycle.to_string(),
        }),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QueryStatus {
    CertainTrue,
    CertainFalse,
    Undefined,
}

impl fmt::Display for QueryStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QueryStatus::CertainTrue => "certain-true",
            QueryStatus::CertainFalse => "certain-false",
            QueryStatus::Undefined => "undefined",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualProgram {
    pub program: Program,
    pub query_status: QueryStatus,
    pub kept_fact_atoms: BTreeSet<Atom>,
}

impl ResidualProgram {
    fn decided(status: QueryStatus) -> Self {
        ResidualProgram {
            program: Program::default(),
            query_status: status,
            kept_fact_atoms: BTreeSet::new(),
        }
    }
}

/// Extracts the residual PASP of `q`.
///
/// The query is certain-true (certain-false) when the well-founded model of
/// the encoded program makes it true (false); every answer set of every
/// world then agrees, and the residual is empty.
pub fn extract_residual(p: &Program, q: &Query) -> Result<ResidualProgram> {
    check_olon_free(p)?;
    let (rules, enc) = encode_probabilistic_facts(p)?;
    let g = ground_program(&rules);
    let Some(qid) = g.lookup(&q.atom) else {
        return Ok(ResidualProgram::decided(QueryStatus::CertainFalse));
    };
    let m = wfm(&g).model;
    match m.value(qid) {
        Truth::True => return Ok(ResidualProgram::decided(QueryStatus::CertainTrue)),
        Truth::False => return Ok(ResidualProgram::decided(QueryStatus::CertainFalse)),
        Truth::Undefined => {}
    }
    let reduct = wf_reduct(&g, &m);
    let reach = build_dependency_graph(&reduct).reachable_from(qid);
    let kept = reduct.with_rules(
        reduct
            .rules()
            .iter()
            .filter(|r| reach.contains(&r.head) && m.value(r.head) == Truth::Undefined)
            .cloned()
            .collect(),
    );
    let program = decode_probabilistic_facts(&kept, &enc)?;
    let kept_fact_atoms = program.prob_facts().iter().map(|f| f.atom.clone()).collect();
    Ok(ResidualProgram {
        program,
        query_status: QueryStatus::Undefined,
        kept_fact_atoms,
    })
}

/// Turns every surviving `a :- not na. na :- not a.` pair back into `p::a`.
pub fn decode_probabilistic_facts(g: &GroundProgram, enc: &FactEncoding) -> Result<Program> {
    let mut halves: BTreeMap<&Atom, (bool, bool)> = BTreeMap::new();
    let mut rules = Vec::new();
    let is_pair_rule = |r: &Rule, expect: &Atom| {
        r.body.len() == 1 && r.body[0].negated && &r.body[0].atom == expect
    };
    for gr in g.rules() {
        let r = g.rule_to_syntax(gr);
        if let Some(f) = enc.by_atom(&r.head) {
            if !is_pair_rule(&r, &f.complement) {
                return Err(invariant(&r));
            }
            halves.entry(&f.atom).or_default().0 = true;
        } else if let Some(f) = enc.by_complement(&r.head) {
            if !is_pair_rule(&r, &f.atom) {
                return Err(invariant(&r));
            }
            halves.entry(&f.atom).or_default().1 = true;
        } else if r.body.iter().any(|l| enc.by_complement(&l.atom).is_some()) {
            return Err(invariant(&r));
        } else {
            rules.push(r);
        }
    }
    let mut prob_facts = Vec::new();
    for (atom, (pos, neg)) in halves {
        if !(pos && neg) {
            return Err(Error::Internal(format!(
                "only one half of the encoding of `{atom}` survived"
            )));
        }
        let f = enc.by_atom(atom).expect("encoded atom");
        prob_facts.push(ProbFact::new(f.prob, f.atom.clone()));
    }
    Program::new(prob_facts, rules)
}

fn invariant(r: &Rule) -> Error {
    let text: String = r.to_string();
    Error::Internal(format!("rule `{text}` breaks the fact encoding"))
}
