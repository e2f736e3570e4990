use std::collections::BTreeSet;
use std::ops::ControlFlow;

use super::{ConjunctiveQuery, Database, Term, Tuple};
use crate::error::{Error, Result};

/// Checks that every atom names a declared relation with the right arity.
pub fn validate(db: &Database, q: &ConjunctiveQuery) -> Result<()> {
    for atom in q.atoms() {
        let rel = db
            .relation(&atom.relation)
            .ok_or_else(|| Error::UnknownRelation(atom.relation.clone()))?;
        if rel.arity != atom.terms.len() {
            return Err(Error::ArityMismatch {
                relation: atom.relation.clone(),
                expected: rel.arity,
                found: atom.terms.len(),
            });
        }
    }
    Ok(())
}

/// Enumerates every satisfying valuation of `q` over the tuples admitted by
/// `include` (by ordinal). `visit` receives the variable bindings and the
/// tuple matched by each atom.
pub(crate) fn for_each_match<'a, F>(
    db: &'a Database,
    q: &ConjunctiveQuery,
    include: &dyn Fn(usize) -> bool,
    mut visit: F,
) -> Result<()>
where
    F: FnMut(&[Option<&'a str>], &[&'a Tuple]) -> ControlFlow<()>,
{
    validate(db, q)?;
    let mut bindings: Vec<Option<&'a str>> = vec![None; q.num_vars()];
    let mut matched: Vec<&'a Tuple> = Vec::with_capacity(q.atoms().len());
    let _ = search(db, q, include, 0, &mut bindings, &mut matched, &mut visit);
    Ok(())
}

fn search<'a, F>(
    db: &'a Database,
    q: &ConjunctiveQuery,
    include: &dyn Fn(usize) -> bool,
    depth: usize,
    bindings: &mut Vec<Option<&'a str>>,
    matched: &mut Vec<&'a Tuple>,
    visit: &mut F,
) -> ControlFlow<()>
where
    F: FnMut(&[Option<&'a str>], &[&'a Tuple]) -> ControlFlow<()>,
{
    let Some(atom) = q.atoms().get(depth) else {
        return visit(bindings, matched);
    };
    let relation = db.relation(&atom.relation).expect("validated");
    let mut newly_bound = Vec::with_capacity(atom.terms.len());
    for t in relation.tuples.iter().filter(|t| include(t.ordinal)) {
        let mut ok = true;
        for (term, value) in atom.terms.iter().zip(&t.values) {
            match term {
                Term::Const(c) => ok = c == value,
                Term::Var(v) => match bindings[*v] {
                    Some(bound) => ok = bound == value,
                    None => {
                        bindings[*v] = Some(value.as_str());
                        newly_bound.push(*v);
                    }
                },
            }
            if !ok {
                break;
            }
        }
        if ok {
            matched.push(t);
            let flow = search(db, q, include, depth + 1, bindings, matched, visit);
            matched.pop();
            if flow.is_break() {
                for v in newly_bound.drain(..) {
                    bindings[v] = None;
                }
                return flow;
            }
        }
        for v in newly_bound.drain(..) {
            bindings[v] = None;
        }
    }
    ControlFlow::Continue(())
}

/// Whether some valuation satisfies every atom of `q` in `db`.
pub fn evaluate(db: &Database, q: &ConjunctiveQuery) -> Result<bool> {
    evaluate_within(db, q, &|_| true)
}

/// Evaluates `q` on the sub-instance of tuples admitted by `include` (by ordinal).
pub fn evaluate_within(
    db: &Database,
    q: &ConjunctiveQuery,
    include: &dyn Fn(usize) -> bool,
) -> Result<bool> {
    let mut found = false;
    for_each_match(db, q, include, |_, _| {
        found = true;
        ControlFlow::Break(())
    })?;
    Ok(found)
}

/// Distinct answer tuples (head-variable values) of `q` over the admitted tuples.
pub fn answers_within(
    db: &Database,
    q: &ConjunctiveQuery,
    include: &dyn Fn(usize) -> bool,
) -> Result<BTreeSet<Vec<String>>> {
    let mut out = BTreeSet::new();
    for_each_match(db, q, include, |b, _| {
        out.insert(
            q.head()
                .iter()
                .map(|&v| b[v].expect("head variables are bound").to_string())
                .collect(),
        );
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

pub fn answers(db: &Database, q: &ConjunctiveQuery) -> Result<BTreeSet<Vec<String>>> {
    answers_within(db, q, &|_| true)
}
