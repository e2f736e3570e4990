use std::collections::BTreeSet;
use std::fmt;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use super::eval::for_each_match;
use super::{ConjunctiveQuery, Database, TupleId};
use crate::error::{Error, Result};
use crate::games::Coalition;
use crate::text::Cursor;

/// Monotone propositional formula over tuple variables `X_t`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Const(bool),
    Var(TupleId),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Compiled,
    Supplied,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lineage {
    pub formula: Formula,
    pub provenance: Provenance,
}

impl Formula {
    fn collect_vars<'a>(&'a self, out: &mut BTreeSet<&'a TupleId>) {
        match self {
            Formula::Const(_) => {}
            Formula::Var(t) => {
                out.insert(t);
            }
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_vars(out)),
        }
    }

    pub fn eval(&self, present: &dyn Fn(&TupleId) -> bool) -> bool {
        match self {
            Formula::Const(b) => *b,
            Formula::Var(t) => present(t),
            Formula::And(fs) => fs.iter().all(|f| f.eval(present)),
            Formula::Or(fs) => fs.iter().any(|f| f.eval(present)),
        }
    }

    /// Replaces `X_target` by `value` and propagates constants.
    pub fn substitute(&self, target: &TupleId, value: bool) -> Formula {
        match self {
            Formula::Const(b) => Formula::Const(*b),
            Formula::Var(t) if t == target => Formula::Const(value),
            Formula::Var(t) => Formula::Var(t.clone()),
            Formula::And(fs) => {
                let mut kept = Vec::with_capacity(fs.len());
                for f in fs {
                    match f.substitute(target, value) {
                        Formula::Const(true) => {}
                        Formula::Const(false) => return Formula::Const(false),
                        g => kept.push(g),
                    }
                }
                match kept.len() {
                    0 => Formula::Const(true),
                    1 => kept.pop().unwrap(),
                    _ => Formula::And(kept),
                }
            }
            Formula::Or(fs) => {
                let mut kept = Vec::with_capacity(fs.len());
                for f in fs {
                    match f.substitute(target, value) {
                        Formula::Const(false) => {}
                        Formula::Const(true) => return Formula::Const(true),
                        g => kept.push(g),
                    }
                }
                match kept.len() {
                    0 => Formula::Const(false),
                    1 => kept.pop().unwrap(),
                    _ => Formula::Or(kept),
                }
            }
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, nested: bool) -> fmt::Result {
        let (parts, sep) = match self {
            Formula::Const(b) => return write!(f, "{b}"),
            Formula::Var(t) => return write!(f, "{t}"),
            Formula::And(fs) if fs.is_empty() => return f.write_str("true"),
            Formula::Or(fs) if fs.is_empty() => return f.write_str("false"),
            Formula::And(fs) | Formula::Or(fs) if fs.len() == 1 => {
                return fs[0].fmt_prec(f, nested)
            }
            Formula::And(fs) => (fs, " & "),
            Formula::Or(fs) => (fs, " | "),
        };
        if nested {
            f.write_str("(")?;
        }
        for (i, g) in parts.iter().enumerate() {
            if i > 0 {
                f.write_str(sep)?;
            }
            g.fmt_prec(f, true)?;
        }
        if nested {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, false)
    }
}

impl fmt::Display for Lineage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.formula.fmt(f)
    }
}

impl Lineage {
    pub fn supplied(formula: Formula) -> Self {
        Self {
            formula,
            provenance: Provenance::Supplied,
        }
    }

    /// Tuple variables occurring in the formula, ascending.
    pub fn support(&self) -> Vec<TupleId> {
        let mut s = BTreeSet::new();
        self.formula.collect_vars(&mut s);
        s.into_iter().cloned().collect()
    }

    pub fn mentions(&self, t: &TupleId) -> bool {
        let mut s = BTreeSet::new();
        self.formula.collect_vars(&mut s);
        s.contains(t)
    }

    pub fn eval(&self, present: &dyn Fn(&TupleId) -> bool) -> bool {
        self.formula.eval(present)
    }

    pub fn is_const(&self) -> Option<bool> {
        match &self.formula {
            Formula::Const(b) => Some(*b),
            Formula::Or(fs) if fs.is_empty() => Some(false),
            Formula::And(fs) if fs.is_empty() => Some(true),
            _ => None,
        }
    }

    /// Disjuncts as sorted id lists when the formula is a DNF.
    pub fn dnf(&self) -> Option<Vec<Vec<TupleId>>> {
        let conj = |f: &Formula| -> Option<Vec<TupleId>> {
            match f {
                Formula::Var(t) => Some(vec![t.clone()]),
                Formula::And(gs) => gs
                    .iter()
                    .map(|g| match g {
                        Formula::Var(t) => Some(t.clone()),
                        _ => None,
                    })
                    .collect(),
                _ => None,
            }
        };
        match &self.formula {
            Formula::Const(false) => Some(Vec::new()),
            Formula::Or(fs) => fs.iter().map(conj).collect(),
            other => conj(other).map(|c| vec![c]),
        }
    }
}

/// Index-based form for fast repeated evaluation over coalitions of the support.
#[derive(Clone, Debug)]
pub struct IndexedLineage {
    support: Vec<TupleId>,
    root: Node,
}

#[derive(Clone, Debug)]
enum Node {
    Const(bool),
    Var(usize),
    And(Vec<Node>),
    Or(Vec<Node>),
}

impl Node {
    fn eval(&self, present: &Coalition) -> bool {
        match self {
            Node::Const(b) => *b,
            Node::Var(i) => present.contains(*i),
            Node::And(ns) => ns.iter().all(|n| n.eval(present)),
            Node::Or(ns) => ns.iter().any(|n| n.eval(present)),
        }
    }
}

impl IndexedLineage {
    pub fn new(lineage: &Lineage) -> Self {
        let support = lineage.support();
        fn build(f: &Formula, support: &[TupleId]) -> Node {
            match f {
                Formula::Const(b) => Node::Const(*b),
                Formula::Var(t) => Node::Var(support.binary_search(t).expect("in support")),
                Formula::And(fs) => Node::And(fs.iter().map(|g| build(g, support)).collect()),
                Formula::Or(fs) => Node::Or(fs.iter().map(|g| build(g, support)).collect()),
            }
        }
        let root = build(&lineage.formula, &support);
        Self { support, root }
    }

    pub fn support(&self) -> &[TupleId] {
        &self.support
    }

    /// Truth value with `X_t` true iff `t`'s support index is in `present`.
    pub fn eval(&self, present: &Coalition) -> bool {
        self.root.eval(present)
    }
}

/// Compiles the lineage of a Boolean query on `db`: one disjunct per
/// satisfying valuation, duplicates merged, disjuncts in lexicographic order
/// of their sorted id lists.
pub fn compile_lineage(db: &Database, q: &ConjunctiveQuery) -> Result<Lineage> {
    let mut disjuncts: BTreeSet<Vec<TupleId>> = BTreeSet::new();
    for_each_match(db, q, &|_| true, |_, matched| {
        let mut ids: Vec<TupleId> = matched.iter().map(|t| t.id.clone()).collect();
        ids.sort();
        ids.dedup();
        disjuncts.insert(ids);
        ControlFlow::Continue(())
    })?;
    let formula = Formula::Or(
        disjuncts
            .into_iter()
            .map(|ids| Formula::And(ids.into_iter().map(Formula::Var).collect()))
            .collect(),
    );
    Ok(Lineage {
        formula,
        provenance: Provenance::Compiled,
    })
}

fn is_id_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | ':' | '.' | '-' | '#' | '@' | '/')
}

struct LineageParser<'a> {
    cur: Cursor,
    known: Option<&'a Database>,
}

impl LineageParser<'_> {
    fn disj(&mut self) -> Result<Formula> {
        let mut parts = vec![self.conj()?];
        while self.cur.eat('|') {
            parts.push(self.conj()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Formula::Or(parts)
        })
    }

    fn conj(&mut self) -> Result<Formula> {
        let mut parts = vec![self.atom()?];
        while self.cur.eat('&') {
            parts.push(self.atom()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Formula::And(parts)
        })
    }

    fn atom(&mut self) -> Result<Formula> {
        self.cur.skip_ws();
        let (line, column) = self.cur.location();
        match self.cur.peek() {
            Some('!') | Some('~') | Some('¬') => Err(Error::NonMonotone { line, column }),
            Some('(') => {
                self.cur.bump();
                let f = self.disj()?;
                self.cur.expect(')', "`)`")?;
                Ok(f)
            }
            Some(c) if is_id_char(c) => {
                let id = self.cur.take_while(is_id_char);
                match id.as_str() {
                    "true" => return Ok(Formula::Const(true)),
                    "false" => return Ok(Formula::Const(false)),
                    _ => {}
                }
                let id = TupleId::new(id);
                if let Some(db) = self.known {
                    if !db.contains(&id) {
                        return Err(Error::UnknownTuple(id.to_string()));
                    }
                }
                Ok(Formula::Var(id))
            }
            Some(c) => Err(self
                .cur
                .error(format!("expected a tuple id or `(`, found `{c}`"))),
            None => Err(self
                .cur
                .error("expected a tuple id or `(`, found end of input")),
        }
    }

    fn parse(mut self) -> Result<Lineage> {
        let formula = self.disj()?;
        self.cur.skip_ws();
        if let Some(c) = self.cur.peek() {
            return Err(self.cur.error(format!("unexpected `{c}`")));
        }
        Ok(Lineage::supplied(formula))
    }
}

/// Parses a monotone formula such as `t1 | (t2 & t3)`, checking every id against `db`.
pub fn parse_lineage(text: &str, db: &Database) -> Result<Lineage> {
    LineageParser {
        cur: Cursor::new(text),
        known: Some(db),
    }
    .parse()
}

/// Like [`parse_lineage`] without a database to validate ids against.
pub fn parse_lineage_unchecked(text: &str) -> Result<Lineage> {
    LineageParser {
        cur: Cursor::new(text),
        known: None,
    }
    .parse()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reldb::parse_query;

    pub(crate) fn ce_db() -> Database {
        let mut b = Database::builder();
        for (x, y) in [("a", "b"), ("a", "c"), ("c", "b")] {
            b.insert("R", [x, y]).unwrap();
        }
        for y in ["b", "c"] {
            b.insert("S", [y]).unwrap();
        }
        b.build()
    }

    #[test]
    fn compiles_display_formula() {
        let db = ce_db();
        let q = parse_query("Q() :- R(x, y), S(y)").unwrap();
        let lin = compile_lineage(&db, &q).unwrap();
        assert_eq!(lin.to_string(), "(R:1 & S:1) | (R:2 & S:2) | (R:3 & S:1)");
        assert_eq!(lin.provenance, Provenance::Compiled);
        let facts: Vec<Vec<String>> = lin
            .dnf()
            .unwrap()
            .iter()
            .map(|d| d.iter().map(|t| db.fact(t).unwrap()).collect())
            .collect();
        assert_eq!(
            facts,
            vec![
                vec!["R(a,b)", "S(b)"],
                vec!["R(a,c)", "S(c)"],
                vec!["R(c,b)", "S(b)"]
            ]
        );
    }

    #[test]
    fn false_query_gives_empty_disjunction() {
        let db = ce_db();
        let lin = compile_lineage(&db, &parse_query("Q() :- R(x, 'z')").unwrap()).unwrap();
        assert_eq!(lin.is_const(), Some(false));
        assert_eq!(lin.to_string(), "false");
    }

    #[test]
    fn single_literal() {
        let db = ce_db();
        let lin = compile_lineage(&db, &parse_query("Q() :- S('c')").unwrap()).unwrap();
        assert_eq!(lin.to_string(), "S:2");
        assert_eq!(lin.dnf().unwrap(), vec![vec![TupleId::new("S:2")]]);
    }

    #[test]
    fn parse_path_lineage() {
        let lin = parse_lineage_unchecked("t1 | (t2 & t3) | (t4 & t5 & t6)").unwrap();
        assert_eq!(lin.support().len(), 6);
        assert_eq!(lin.to_string(), "t1 | (t2 & t3) | (t4 & t5 & t6)");
        assert_eq!(lin.provenance, Provenance::Supplied);
        assert_eq!(
            parse_lineage_unchecked("t1").unwrap().formula,
            Formula::Var("t1".into())
        );
    }

    #[test]
    fn rejects_negation_and_unknown_ids() {
        assert!(matches!(
            parse_lineage_unchecked("!t1"),
            Err(Error::NonMonotone { line: 1, column: 1 })
        ));
        assert!(matches!(
            parse_lineage_unchecked("t1 & ~t2"),
            Err(Error::NonMonotone { .. })
        ));
        let db = ce_db();
        assert!(matches!(
            parse_lineage("R:1 | t9", &db),
            Err(Error::UnknownTuple(_))
        ));
        assert!(parse_lineage("R:1 & (S:1 | S:2)", &db).is_ok());
        assert!(matches!(
            parse_lineage_unchecked("t1 |"),
            Err(Error::Syntax { .. })
        ));
    }

    #[test]
    fn nested_printing_round_trips() {
        let text = "t1 & (t2 | (t3 & t4))";
        let lin = parse_lineage_unchecked(text).unwrap();
        assert_eq!(lin.to_string(), text);
        assert_eq!(parse_lineage_unchecked(&lin.to_string()).unwrap(), lin);
    }

    #[test]
    fn substitution_propagates_constants() {
        let lin = parse_lineage_unchecked("(a & b) | (c & d) | (e & b)").unwrap();
        assert_eq!(
            lin.formula.substitute(&"b".into(), false).to_string(),
            "c & d"
        );
        assert_eq!(
            lin.formula.substitute(&"b".into(), true).to_string(),
            "a | (c & d) | e"
        );
        let single = parse_lineage_unchecked("t").unwrap();
        assert_eq!(
            single.formula.substitute(&"t".into(), false),
            Formula::Const(false)
        );
    }
}
