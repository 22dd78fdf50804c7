//! Abstract syntax, parser and canonical printer for PASP programs.
//!
//! Concrete syntax:
//!
//! ```text
//! % comment
//! 0.1::e(a,b).
//! edge(X,Y) :- e(X,Y), not nedge(X,Y).
//! path(X,Z) :- edge(X,Y), \+ blocked(Y), path(Y,Z).
//! start.
//! ```
//!
//! Terms are function-free: constants (`a`, `node_1`, `42`) and variables
//! (`X`, `_Tmp`). Both `not` and `\+` denote default negation; the printer
//! always emits `not`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Constant(String),
    Variable(String),
}

impl Term {
    /// Builds a term, choosing the kind from the leading character.
    pub fn new(name: &str) -> Self {
        if name.starts_with(|c: char| c.is_ascii_uppercase() || c == '_') {
            Term::Variable(name.to_string())
        } else {
            Term::Constant(name.to_string())
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Term::Constant(n) | Term::Variable(n) => n,
        }
    }

    pub fn is_variable(&self) -> bool {
        matches!(self, Term::Variable(_))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Atom {
            predicate: predicate.into(),
            args,
        }
    }

    /// Ground atom over constants, e.g. `Atom::ground("e", &["a", "b"])`.
    pub fn ground(predicate: &str, args: &[&str]) -> Self {
        Atom::new(
            predicate,
            args.iter().map(|a| Term::Constant((*a).to_string())).collect(),
        )
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_ground(&self) -> bool {
        !self.args.iter().any(Term::is_variable)
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter(|t| t.is_variable()).map(Term::name)
    }

    /// True when some substitution of `other`'s variables makes it equal to
    /// this ground atom.
    pub fn matches_pattern(&self, pattern: &Atom) -> bool {
        if self.predicate != pattern.predicate || self.arity() != pattern.arity() {
            return false;
        }
        let mut binding: Vec<(&str, &str)> = Vec::new();
        for (value, pat) in self.args.iter().zip(&pattern.args) {
            match pat {
                Term::Constant(c) => {
                    if value.name() != c {
                        return false;
                    }
                }
                Term::Variable(v) => match binding.iter().find(|(name, _)| name == v) {
                    Some((_, bound)) if *bound != value.name() => return false,
                    Some(_) => {}
                    None => binding.push((v, value.name())),
                },
            }
        }
        true
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, t) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{t}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub atom: Atom,
    pub negated: bool,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Literal {
            atom,
            negated: false,
        }
    }

    pub fn neg(atom: Atom) -> Self {
        Literal {
            atom,
            negated: true,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("not ")?;
        }
        write!(f, "{}", self.atom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule {
    pub head: Atom,
    pub body: Vec<Literal>,
}

impl Rule {
    pub fn new(head: Atom, body: Vec<Literal>) -> Self {
        Rule { head, body }
    }

    pub fn fact(head: Atom) -> Self {
        Rule {
            head,
            body: Vec::new(),
        }
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_empty()
    }

    pub fn positive_body(&self) -> impl Iterator<Item = &Atom> {
        self.body.iter().filter(|l| !l.negated).map(|l| &l.atom)
    }

    pub fn negative_body(&self) -> impl Iterator<Item = &Atom> {
        self.body.iter().filter(|l| l.negated).map(|l| &l.atom)
    }

    /// First variable of the head or of a negative literal that no positive
    /// body literal binds.
    pub fn unsafe_variable(&self) -> Option<&str> {
        let bound: BTreeSet<&str> = self.positive_body().flat_map(Atom::variables).collect();
        self.head
            .variables()
            .chain(self.negative_body().flat_map(Atom::variables))
            .find(|v| !bound.contains(v))
    }

    pub fn is_ground(&self) -> bool {
        self.head.is_ground() && self.body.iter().all(|l| l.atom.is_ground())
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if !self.body.is_empty() {
            f.write_str(" :- ")?;
            for (i, l) in self.body.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{l}")?;
            }
        }
        f.write_str(".")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbFact {
    pub prob: f64,
    pub atom: Atom,
}

impl ProbFact {
    pub fn new(prob: f64, atom: Atom) -> Self {
        ProbFact { prob, atom }
    }
}

impl fmt::Display for ProbFact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}::{}.", self.prob, self.atom)
    }
}

/// Probabilistic facts plus normal rules, kept in canonical order.
///
/// Both groups are sorted by the rendered head atom (ties broken by the
/// rendered statement), so structural equality coincides with equality of
/// the canonical rendering.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Program {
    prob_facts: Vec<ProbFact>,
    rules: Vec<Rule>,
}

impl Program {
    /// Validates the program invariants and sorts it canonically.
    pub fn new(prob_facts: Vec<ProbFact>, rules: Vec<Rule>) -> Result<Self> {
        let lines = alloc::vec![0; rules.len()];
        validate(&prob_facts, &rules, &lines)?;
        Ok(Program::canonical(prob_facts, rules))
    }

    fn canonical(mut prob_facts: Vec<ProbFact>, rules: Vec<Rule>) -> Self {
        prob_facts.sort_by_cached_key(|f| (f.atom.to_string(), f.to_string()));
        let mut keyed: Vec<(String, String, Rule)> = rules
            .into_iter()
            .map(|r| (r.head.to_string(), r.to_string(), r))
            .collect();
        keyed.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
        Program {
            prob_facts,
            rules: keyed.into_iter().map(|(_, _, r)| r).collect(),
        }
    }

    pub fn prob_facts(&self) -> &[ProbFact] {
        &self.prob_facts
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn is_empty(&self) -> bool {
        self.prob_facts.is_empty() && self.rules.is_empty()
    }

    pub fn into_parts(self) -> (Vec<ProbFact>, Vec<Rule>) {
        (self.prob_facts, self.rules)
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for pf in &self.prob_facts {
            writeln!(f, "{pf}")?;
        }
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Query {
    pub atom: Atom,
}

impl Query {
    pub fn new(atom: Atom) -> Result<Self> {
        if !atom.is_ground() {
            return Err(Error::NonGroundQuery {
                atom: atom.to_string(),
            });
        }
        Ok(Query { atom })
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.atom)
    }
}

pub fn render_program(p: &Program) -> String {
    p.to_string()
}

fn validate(prob_facts: &[ProbFact], rules: &[Rule], lines: &[usize]) -> Result<()> {
    for (rule, line) in rules.iter().zip(lines) {
        if let Some(v) = rule.unsafe_variable() {
            return Err(Error::UnsafeVariable {
                rule: rule.to_string(),
                variable: v.to_string(),
                line: *line,
            });
        }
    }
    let mut seen = BTreeSet::new();
    for pf in prob_facts {
        // also rejects NaN
        if !(0.0..=1.0).contains(&pf.prob) {
            return Err(Error::ProbabilityOutOfRange {
                atom: pf.atom.to_string(),
                prob: pf.prob,
            });
        }
        if !pf.atom.is_ground() {
            return Err(Error::NonGroundProbFact {
                atom: pf.atom.to_string(),
            });
        }
        if !seen.insert(&pf.atom) {
            return Err(Error::DuplicateProbFact {
                atom: pf.atom.to_string(),
            });
        }
        if let Some(rule) = rules.iter().find(|r| pf.atom.matches_pattern(&r.head)) {
            return Err(Error::ProbFactUnifiesWithHead {
                atom: pf.atom.to_string(),
                rule: rule.to_string(),
            });
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Lexer

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    /// `[a-z][A-Za-z0-9_]*`
    Ident(String),
    /// `[A-Z_][A-Za-z0-9_]*`
    Var(String),
    /// `[0-9]+(\.[0-9]+)?` or a digit-led constant
    Number(String),
    LParen,
    RParen,
    Comma,
    Dot,
    If,
    DoubleColon,
    Not,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::Var(s) | Tok::Number(s) => write!(f, "`{s}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::If => f.write_str("`:-`"),
            Tok::DoubleColon => f.write_str("`::`"),
            Tok::Not => f.write_str("`\\+`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn syntax_error(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let word = |c: char| c.is_ascii_alphanumeric() || c == '_';
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        let take = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {
                take(1, &mut i, &mut col);
                continue;
            }
            '%' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            '(' | ')' | ',' | '.' => {
                let tok = match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    ',' => Tok::Comma,
                    _ => Tok::Dot,
                };
                take(1, &mut i, &mut col);
                out.push(Spanned {
                    tok,
                    line: start_line,
                    column: start_col,
                });
                continue;
            }
            ':' => {
                let tok = match chars.get(i + 1) {
                    Some('-') => Tok::If,
                    Some(':') => Tok::DoubleColon,
                    _ => return Err(syntax_error(line, col, "expected `:-` or `::`")),
                };
                take(2, &mut i, &mut col);
                out.push(Spanned {
                    tok,
                    line: start_line,
                    column: start_col,
                });
                continue;
            }
            '\\' => {
                if chars.get(i + 1) != Some(&'+') {
                    return Err(syntax_error(line, col, "expected `\\+`"));
                }
                take(2, &mut i, &mut col);
                out.push(Spanned {
                    tok: Tok::Not,
                    line: start_line,
                    column: start_col,
                });
                continue;
            }
            _ => {}
        }
        let start = i;
        let tok = if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                Tok::Number(chars[start..i].iter().collect())
            } else {
                while i < chars.len() && word(chars[i]) {
                    i += 1;
                }
                Tok::Number(chars[start..i].iter().collect())
            }
        } else if c.is_ascii_lowercase() {
            while i < chars.len() && word(chars[i]) {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else if c.is_ascii_uppercase() || c == '_' {
            while i < chars.len() && word(chars[i]) {
                i += 1;
            }
            Tok::Var(chars[start..i].iter().collect())
        } else {
            return Err(syntax_error(line, col, format!("unexpected character `{c}`")));
        };
        col += i - start;
        out.push(Spanned {
            tok,
            line: start_line,
            column: start_col,
        });
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

// ---------------------------------------------------------------------------
// Parser

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

enum Statement {
    Prob(ProbFact),
    Rule(Rule, usize),
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.pos + offset).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.column)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &str) -> Error {
        let (line, column) = self.here();
        syntax_error(line, column, format!("expected {expected}, found {}", self.peek()))
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn statement(&mut self) -> Result<Statement> {
        let (line, _) = self.here();
        if let Tok::Number(text) = self.peek().clone() {
            let (l, c) = self.here();
            self.bump();
            self.expect(Tok::DoubleColon, "`::` after probability")?;
            let prob: f64 = text
                .parse()
                .map_err(|_| syntax_error(l, c, format!("invalid probability `{text}`")))?;
            let atom = self.atom()?;
            self.expect(Tok::Dot, "`.`")?;
            return Ok(Statement::Prob(ProbFact::new(prob, atom)));
        }
        let head = self.atom()?;
        let mut body = Vec::new();
        if *self.peek() == Tok::If {
            self.bump();
            body.push(self.literal()?);
            while *self.peek() == Tok::Comma {
                self.bump();
                body.push(self.literal()?);
            }
        }
        self.expect(Tok::Dot, "`.`")?;
        Ok(Statement::Rule(Rule::new(head, body), line))
    }

    fn literal(&mut self) -> Result<Literal> {
        let negated = match self.peek() {
            Tok::Not => {
                self.bump();
                true
            }
            Tok::Ident(w) if w == "not" && matches!(self.peek_at(1), Tok::Ident(_)) => {
                self.bump();
                true
            }
            _ => false,
        };
        Ok(Literal {
            atom: self.atom()?,
            negated,
        })
    }

    fn atom(&mut self) -> Result<Atom> {
        let predicate = match self.peek() {
            Tok::Ident(name) => name.clone(),
            _ => return Err(self.unexpected("an atom")),
        };
        self.bump();
        let mut args = Vec::new();
        if *self.peek() == Tok::LParen {
            self.bump();
            args.push(self.term()?);
            while *self.peek() == Tok::Comma {
                self.bump();
                args.push(self.term()?);
            }
            self.expect(Tok::RParen, "`,` or `)`")?;
        }
        Ok(Atom { predicate, args })
    }

    fn term(&mut self) -> Result<Term> {
        let (line, column) = self.here();
        let term = match self.peek().clone() {
            Tok::Ident(name) => Term::Constant(name),
            Tok::Var(name) => Term::Variable(name),
            Tok::Number(text) if !text.contains('.') => Term::Constant(text),
            _ => return Err(self.unexpected("a term")),
        };
        self.bump();
        if *self.peek() == Tok::LParen {
            return Err(syntax_error(line, column, "function symbols are not supported"));
        }
        Ok(term)
    }
}

pub fn parse_program(text: &str) -> Result<Program> {
    let mut parser = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let mut prob_facts = Vec::new();
    let mut rules = Vec::new();
    let mut lines = Vec::new();
    while *parser.peek() != Tok::Eof {
        match parser.statement()? {
            Statement::Prob(pf) => prob_facts.push(pf),
            Statement::Rule(r, line) => {
                rules.push(r);
                lines.push(line);
            }
        }
    }
    validate(&prob_facts, &rules, &lines)?;
    Ok(Program::canonical(prob_facts, rules))
}

/// Parses a ground atom, with an optional trailing `.`.
pub fn parse_query(text: &str) -> Result<Query> {
    let mut parser = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let atom = parser.atom()?;
    if *parser.peek() == Tok::Dot {
        parser.bump();
    }
    if *parser.peek() != Tok::Eof {
        return Err(parser.unexpected("end of query"));
    }
    Query::new(atom)
}

#[cfg(test)]
mod tests {
    use super::*;

    const PROB_GRAPH: &str = "0.1::e(a,b). 0.2::e(a,c). 0.3::e(b,d).
edge(A,B):- e(A,B), not nedge(A,B).
nedge(A,B):- e(A,B), not edge(A,B).
path(A,B):- edge(A,B).
path(A,B):- edge(A,C), path(C,B).
";

    #[test]
    fn prob_graph_parses() {
        let p = parse_program(PROB_GRAPH).unwrap();
        let probs: Vec<f64> = p.prob_facts().iter().map(|f| f.prob).collect();
        assert_eq!(probs, [0.1, 0.2, 0.3]);
        assert_eq!(p.rules().len(), 4);
    }

    #[test]
    fn prob_graph_renders_in_canonical_order() {
        let text = render_program(&parse_program(PROB_GRAPH).unwrap());
        assert!(text.starts_with("0.1::e(a,b).\n0.2::e(a,c).\n0.3::e(b,d).\n"));
        assert!(text.contains("edge(A,B) :- e(A,B), not nedge(A,B).\n"));
    }

    #[test]
    fn empty_text() {
        let p = parse_program("").unwrap();
        assert!(p.is_empty());
        assert_eq!(render_program(&p), "");
        assert!(parse_program("  % only a comment\n").unwrap().is_empty());
    }

    #[test]
    fn unsafe_negative_variable() {
        match parse_program("p(X) :- not q(X).") {
            Err(Error::UnsafeVariable { variable, .. }) => assert_eq!(variable, "X"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unsafe_head_variable() {
        let err = parse_program("ok.\np(X,Y) :- q(X).").unwrap_err();
        assert_eq!(
            err,
            Error::UnsafeVariable {
                rule: "p(X,Y) :- q(X).".into(),
                variable: "Y".into(),
                line: 2
            }
        );
        assert!(parse_program("p(X) :- q(X), not r(X).").is_ok());
    }

    #[test]
    fn backslash_plus_is_negation() {
        let a = parse_program("n(X,Y) :- e(X,Y), \\+ edge(X,Y).").unwrap();
        let b = parse_program("n(X,Y) :- e(X,Y), not edge(X,Y).").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn syntax_error_position() {
        match parse_program("a.\nb :- c d.") {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (2, 8)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_program("a :- b"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_program("a # b."), Err(Error::Syntax { .. })));
    }

    #[test]
    fn function_symbols_rejected() {
        let err = parse_program("p(f(a)).").unwrap_err();
        assert!(matches!(err, Error::Syntax { ref message, .. } if message.contains("function")));
    }

    #[test]
    fn probability_errors() {
        assert!(matches!(
            parse_program("1.5::a."),
            Err(Error::ProbabilityOutOfRange { .. })
        ));
        assert!(matches!(
            parse_program("0.5::a. 0.2::a."),
            Err(Error::DuplicateProbFact { .. })
        ));
        assert!(matches!(
            parse_program("0.5::p(a). p(X) :- q(X)."),
            Err(Error::ProbFactUnifiesWithHead { .. })
        ));
        assert!(matches!(
            parse_program("0.5::p(X)."),
            Err(Error::NonGroundProbFact { .. })
        ));
        // p(a) does not unify with p(X,X) instantiated to p(a,b)
        assert!(parse_program("0.5::p(a,b). p(X,X) :- q(X).").is_ok());
        assert!(parse_program("1::a. 0::b.").is_ok());
    }

    #[test]
    fn numeric_constants() {
        let p = parse_program("0.1::e(0,12). path(X,Y) :- e(X,Y).").unwrap();
        assert_eq!(p.prob_facts()[0].atom, Atom::ground("e", &["0", "12"]));
        let q = parse_query("path(0,12)").unwrap();
        assert_eq!(q.atom.to_string(), "path(0,12)");
    }

    #[test]
    fn queries() {
        assert!(parse_query("path(a,d).").is_ok());
        assert!(matches!(parse_query("path(X,d)"), Err(Error::NonGroundQuery { .. })));
        assert!(parse_query("path(a,d) extra").is_err());
    }

    #[test]
    fn pattern_matching() {
        let a = Atom::ground("p", &["a", "a"]);
        let pat = Atom::new("p", alloc::vec![Term::new("X"), Term::new("X")]);
        assert!(a.matches_pattern(&pat));
        assert!(!Atom::ground("p", &["a", "b"]).matches_pattern(&pat));
    }
}
