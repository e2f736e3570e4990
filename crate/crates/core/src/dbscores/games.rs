use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::games::{Coalition, Game};
use crate::rational::{from_bool, parse};
use crate::reldb::{
    answers, answers_within, evaluate_within, validate, ConjunctiveQuery, Database, IndexedLineage,
    Lineage, TupleId,
};

/// Boolean query as a game over all tuples of the database:
/// `value(S) = 1` iff the sub-instance `S` satisfies the query.
pub struct QueryGame<'a> {
    db: &'a Database,
    query: &'a ConjunctiveQuery,
}

pub fn query_game<'a>(db: &'a Database, query: &'a ConjunctiveQuery) -> Result<QueryGame<'a>> {
    validate(db, query)?;
    Ok(QueryGame { db, query })
}

impl Game for QueryGame<'_> {
    type Player = TupleId;

    fn players(&self) -> &[TupleId] {
        self.db.ids()
    }

    fn value(&self, coalition: &Coalition) -> Result<BigRational> {
        // Player index and tuple ordinal coincide: both follow sorted id order.
        let holds = evaluate_within(self.db, self.query, &|ord| coalition.contains(ord))?;
        Ok(from_bool(holds))
    }
}

/// Truth value of a lineage as a game over its support.
pub struct LineageGame {
    lineage: IndexedLineage,
}

pub fn lineage_game(lineage: &Lineage) -> LineageGame {
    LineageGame {
        lineage: IndexedLineage::new(lineage),
    }
}

impl Game for LineageGame {
    type Player = TupleId;

    fn players(&self) -> &[TupleId] {
        self.lineage.support()
    }

    fn value(&self, coalition: &Coalition) -> Result<BigRational> {
        Ok(from_bool(self.lineage.eval(coalition)))
    }
}

/// Sum of a numeric output attribute over the distinct answers on `S`.
pub struct SummationGame<'a> {
    db: &'a Database,
    query: &'a ConjunctiveQuery,
    column: usize,
}

/// Builds the summation game for the head variable named `attribute`.
///
/// Every answer on the full database is checked to be numeric up front;
/// answers on sub-instances are a subset of those.
pub fn summation_game<'a>(
    db: &'a Database,
    query: &'a ConjunctiveQuery,
    attribute: &str,
) -> Result<SummationGame<'a>> {
    let var = query
        .var_index(attribute)
        .ok_or_else(|| Error::InvalidParameter(format!("unknown variable `{attribute}`")))?;
    let column = query.head().iter().position(|&h| h == var).ok_or_else(|| {
        Error::InvalidParameter(format!("`{attribute}` is not an output variable"))
    })?;
    for answer in answers(db, query)? {
        parse(&answer[column])?;
    }
    Ok(SummationGame { db, query, column })
}

impl Game for SummationGame<'_> {
    type Player = TupleId;

    fn players(&self) -> &[TupleId] {
        self.db.ids()
    }

    fn value(&self, coalition: &Coalition) -> Result<BigRational> {
        answers_within(self.db, self.query, &|ord| coalition.contains(ord))?
            .iter()
            .map(|a| parse(&a[self.column]))
            .sum()
    }
}
