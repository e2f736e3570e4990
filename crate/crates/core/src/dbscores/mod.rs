//! Explanation scores for tuples: responsibility, causal effect, Shapley
//! and Banzhaf.

mod causes;
mod games;
mod intervention;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use causes::{causes, causes_from_lineage, responsibility, CauseReport};
pub use games::{lineage_game, query_game, summation_game, LineageGame, QueryGame, SummationGame};
pub use intervention::{
    causal_effect, intervene, lineage_probability, InterventionQuery, TupleProbabilities,
};

use crate::error::{Error, Result};
use crate::games::{
    banzhaf_all, banzhaf_exact, banzhaf_monte_carlo, shapley_all, shapley_exact,
    shapley_monte_carlo, Game, MonteCarloConfig, ScoreValue,
};
use crate::reldb::{compile_lineage, evaluate, ConjunctiveQuery, Database, Lineage, TupleId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreKind {
    Responsibility,
    CausalEffect,
    Shapley,
    Banzhaf,
}

impl fmt::Display for ScoreKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScoreKind::Responsibility => "responsibility",
            ScoreKind::CausalEffect => "causal_effect",
            ScoreKind::Shapley => "shapley",
            ScoreKind::Banzhaf => "banzhaf",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TupleScore {
    pub tuple: TupleId,
    pub kind: ScoreKind,
    pub value: ScoreValue,
}

/// How Shapley and Banzhaf values are obtained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScoreMode {
    Exact,
    MonteCarlo(MonteCarloConfig),
}

fn game_score<G: Game<Player = TupleId>>(
    game: &G,
    tuple: &TupleId,
    kind: ScoreKind,
    mode: ScoreMode,
    budget: u64,
) -> Result<TupleScore> {
    let value = match (kind, mode) {
        (ScoreKind::Shapley, ScoreMode::Exact) => {
            ScoreValue::Exact(shapley_exact(game, tuple, budget)?)
        }
        (ScoreKind::Banzhaf, ScoreMode::Exact) => {
            ScoreValue::Exact(banzhaf_exact(game, tuple, budget)?)
        }
        (ScoreKind::Shapley, ScoreMode::MonteCarlo(cfg)) => {
            shapley_monte_carlo(game, tuple, &cfg)?.value
        }
        (ScoreKind::Banzhaf, ScoreMode::MonteCarlo(cfg)) => {
            banzhaf_monte_carlo(game, tuple, &cfg)?.value
        }
        _ => unreachable!("only game-based kinds"),
    };
    Ok(TupleScore {
        tuple: tuple.clone(),
        kind,
        value,
    })
}

/// Shapley value of `tuple` in the query game of `q` on `db`.
pub fn shapley_tuple(
    db: &Database,
    q: &ConjunctiveQuery,
    tuple: &TupleId,
    mode: ScoreMode,
    budget: u64,
) -> Result<TupleScore> {
    game_score(&query_game(db, q)?, tuple, ScoreKind::Shapley, mode, budget)
}

pub fn banzhaf_tuple(
    db: &Database,
    q: &ConjunctiveQuery,
    tuple: &TupleId,
    mode: ScoreMode,
    budget: u64,
) -> Result<TupleScore> {
    game_score(&query_game(db, q)?, tuple, ScoreKind::Banzhaf, mode, budget)
}

/// What is being explained: a query over a database, or a lineage given directly.
#[derive(Clone, Copy, Debug)]
pub enum Explained<'a> {
    Query {
        db: &'a Database,
        query: &'a ConjunctiveQuery,
    },
    Lineage(&'a Lineage),
}

#[derive(Clone, Debug)]
pub struct DbScoreOptions {
    pub mode: ScoreMode,
    pub budget: u64,
    pub probabilities: TupleProbabilities,
}

impl Default for DbScoreOptions {
    fn default() -> Self {
        Self {
            mode: ScoreMode::Exact,
            budget: crate::games::DEFAULT_BUDGET,
            probabilities: TupleProbabilities::uniform(),
        }
    }
}

fn batch<G: Game<Player = TupleId>>(
    game: &G,
    universe: &[TupleId],
    kind: ScoreKind,
    opts: &DbScoreOptions,
) -> Result<Vec<TupleScore>> {
    if let ScoreMode::MonteCarlo(_) = opts.mode {
        return universe
            .iter()
            .map(|t| game_score(game, t, kind, opts.mode, opts.budget))
            .collect();
    }
    let all = match kind {
        ScoreKind::Shapley => shapley_all(game, opts.budget)?,
        _ => banzhaf_all(game, opts.budget)?,
    };
    Ok(universe
        .iter()
        .map(|t| TupleScore {
            tuple: t.clone(),
            kind,
            // Tuples outside a lineage game's support are null players.
            value: ScoreValue::Exact(all.get(t).cloned().unwrap_or_default()),
        })
        .collect())
}

/// Scores every tuple for each requested kind. Records are ordered by kind,
/// then by tuple id. Fails with [`Error::QueryFalse`] when there is nothing
/// to explain.
pub fn score_tuples(
    target: Explained<'_>,
    kinds: &[ScoreKind],
    opts: &DbScoreOptions,
) -> Result<Vec<TupleScore>> {
    let mut kinds = kinds.to_vec();
    kinds.sort();
    kinds.dedup();

    let (lineage, universe) = match target {
        Explained::Query { db, query } => {
            if !evaluate(db, query)? {
                return Err(Error::QueryFalse);
            }
            (compile_lineage(db, query)?, db.ids().to_vec())
        }
        Explained::Lineage(lin) => {
            if !lin.eval(&|_| true) {
                return Err(Error::QueryFalse);
            }
            (lin.clone(), lin.support())
        }
    };

    let mut out = Vec::new();
    for kind in kinds {
        match kind {
            ScoreKind::Responsibility => {
                let reports = match target {
                    Explained::Query { db, query } => causes(db, query, opts.budget)?,
                    Explained::Lineage(lin) => causes_from_lineage(lin, opts.budget)?,
                };
                out.extend(reports.into_iter().map(|r| TupleScore {
                    tuple: r.tuple,
                    kind,
                    value: ScoreValue::Exact(r.responsibility),
                }));
            }
            ScoreKind::CausalEffect => {
                for t in &universe {
                    let ce = causal_effect(&lineage, t, &opts.probabilities, opts.budget)?;
                    out.push(TupleScore {
                        tuple: t.clone(),
                        kind,
                        value: ScoreValue::Exact(ce),
                    });
                }
            }
            ScoreKind::Shapley | ScoreKind::Banzhaf => match target {
                Explained::Query { db, query } => {
                    out.extend(batch(&query_game(db, query)?, &universe, kind, opts)?)
                }
                Explained::Lineage(lin) => {
                    out.extend(batch(&lineage_game(lin), &universe, kind, opts)?)
                }
            },
        }
    }
    Ok(out)
}
