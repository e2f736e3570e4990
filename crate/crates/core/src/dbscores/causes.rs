use std::collections::HashMap;

use itertools::Itertools;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::games::Coalition;
use crate::rational::ratio;
use crate::reldb::{
    compile_lineage, evaluate, ConjunctiveQuery, Database, IndexedLineage, Lineage, TupleId,
};

/// Cause status of a single tuple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CauseReport {
    pub tuple: TupleId,
    pub is_actual_cause: bool,
    pub is_counterfactual_cause: bool,
    pub min_contingency_size: Option<usize>,
    pub witness_contingency: Option<Vec<TupleId>>,
    #[serde(with = "crate::serde_rational")]
    pub responsibility: BigRational,
}

impl CauseReport {
    fn non_cause(tuple: TupleId) -> Self {
        Self {
            tuple,
            is_actual_cause: false,
            is_counterfactual_cause: false,
            min_contingency_size: None,
            witness_contingency: None,
            responsibility: BigRational::zero(),
        }
    }
}

/// Memoized "does the query still hold after removing these support tuples".
struct Holds<'a> {
    lineage: &'a IndexedLineage,
    memo: HashMap<Coalition, bool>,
    evaluations: u64,
    budget: u64,
}

impl Holds<'_> {
    fn after_removing(&mut self, removed: &Coalition) -> Result<bool> {
        if let Some(&v) = self.memo.get(removed) {
            return Ok(v);
        }
        self.evaluations += 1;
        if self.evaluations > self.budget {
            return Err(Error::BudgetExceeded {
                needed: self.evaluations as u128,
                budget: self.budget,
            });
        }
        let n = self.lineage.support().len();
        let present: Coalition = (0..n).filter(|&i| !removed.contains(i)).collect();
        let v = self.lineage.eval(&present);
        self.memo.insert(removed.clone(), v);
        Ok(v)
    }
}

/// Breadth-first search by contingency size over the lineage support.
/// `universe` lists every tuple to report on; tuples outside the support are
/// never causes.
fn search(lineage: &Lineage, universe: &[TupleId], budget: u64) -> Result<Vec<CauseReport>> {
    let indexed = IndexedLineage::new(lineage);
    let support = indexed.support().to_vec();
    let mut holds = Holds {
        lineage: &indexed,
        memo: HashMap::new(),
        evaluations: 0,
        budget,
    };
    if !holds.after_removing(&Coalition::empty())? {
        return Err(Error::QueryFalse);
    }

    let mut reports = Vec::with_capacity(universe.len());
    for tuple in universe {
        let Ok(t) = support.binary_search(tuple) else {
            reports.push(CauseReport::non_cause(tuple.clone()));
            continue;
        };
        let others: Vec<usize> = (0..support.len()).filter(|&i| i != t).collect();
        let mut found = None;
        'sizes: for k in 0..=others.len() {
            // Combinations come out in lexicographic order, so the first hit
            // is the lexicographically least minimum contingency.
            for gamma in others.iter().copied().combinations(k) {
                let gamma: Coalition = gamma.into_iter().collect();
                if holds.after_removing(&gamma)? && !holds.after_removing(&gamma.with(t))? {
                    found = Some(gamma);
                    break 'sizes;
                }
            }
        }
        reports.push(match found {
            Some(gamma) => {
                let size = gamma.len();
                CauseReport {
                    tuple: tuple.clone(),
                    is_actual_cause: true,
                    is_counterfactual_cause: size == 0,
                    min_contingency_size: Some(size),
                    witness_contingency: Some(
                        gamma.members().map(|i| support[i].clone()).collect(),
                    ),
                    responsibility: ratio(1, 1 + size as i64),
                }
            }
            None => CauseReport::non_cause(tuple.clone()),
        });
    }
    Ok(reports)
}

/// Actual causes of `q` holding in `db`, one report per tuple in id order.
pub fn causes(db: &Database, q: &ConjunctiveQuery, budget: u64) -> Result<Vec<CauseReport>> {
    if !evaluate(db, q)? {
        return Err(Error::QueryFalse);
    }
    let lineage = compile_lineage(db, q)?;
    search(&lineage, db.ids(), budget)
}

/// Causes read off a lineage directly; reports cover the lineage support.
pub fn causes_from_lineage(lineage: &Lineage, budget: u64) -> Result<Vec<CauseReport>> {
    search(lineage, &lineage.support(), budget)
}

pub fn responsibility(
    db: &Database,
    q: &ConjunctiveQuery,
    tuple: &TupleId,
    budget: u64,
) -> Result<BigRational> {
    if !db.contains(tuple) {
        return Err(Error::UnknownTuple(tuple.to_string()));
    }
    causes(db, q, budget)?
        .into_iter()
        .find(|r| &r.tuple == tuple)
        .map(|r| r.responsibility)
        .ok_or_else(|| Error::UnknownTuple(tuple.to_string()))
}
