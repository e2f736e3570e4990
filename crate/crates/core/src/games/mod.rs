//! Coalition games and their power indices.
//!
//! A [`Game`] exposes an ordered list of players and a value oracle over
//! coalitions. The exact scores enumerate every coalition with arbitrary
//! precision rationals; [`shapley_monte_carlo`] samples player orders
//! instead and is meant for games too large to enumerate.

mod coalition;
mod exact;
mod monte_carlo;

use std::fmt;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

pub use coalition::Coalition;
pub use exact::{
    banzhaf_all, banzhaf_exact, shapley_all, shapley_exact, shapley_weight, DEFAULT_BUDGET,
};
pub use monte_carlo::{banzhaf_monte_carlo, sample_count, shapley_monte_carlo, MonteCarloConfig};

use crate::error::{Error, Result};

/// A cooperative game with a deterministic value oracle.
///
/// `players()` must be strictly ascending; coalitions index into it. The
/// oracle is called from several threads at once during exact enumeration.
pub trait Game: Sync {
    type Player: Clone + Ord + fmt::Display + Send + Sync;

    fn players(&self) -> &[Self::Player];

    fn value(&self, coalition: &Coalition) -> Result<BigRational>;

    fn num_players(&self) -> usize {
        self.players().len()
    }

    fn index_of(&self, player: &Self::Player) -> Result<usize> {
        self.players()
            .binary_search(player)
            .map_err(|_| Error::PlayerNotFound(player.to_string()))
    }
}

type Oracle<P> = dyn Fn(&[&P]) -> Result<BigRational> + Send + Sync;

/// A game backed by a closure over the member list (ascending order).
pub struct FnGame<P> {
    players: Vec<P>,
    oracle: Box<Oracle<P>>,
}

impl<P: Clone + Ord + fmt::Display + Send + Sync> FnGame<P> {
    pub fn new<F>(players: Vec<P>, value: F) -> Result<Self>
    where
        F: Fn(&[&P]) -> BigRational + Send + Sync + 'static,
    {
        Self::try_new(players, move |s| Ok(value(s)))
    }

    pub fn try_new<F>(mut players: Vec<P>, value: F) -> Result<Self>
    where
        F: Fn(&[&P]) -> Result<BigRational> + Send + Sync + 'static,
    {
        players.sort();
        if let Some(w) = players.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicatePlayer(w[0].to_string()));
        }
        Ok(Self {
            players,
            oracle: Box::new(value),
        })
    }
}

impl<P: Clone + Ord + fmt::Display + Send + Sync> Game for FnGame<P> {
    type Player = P;

    fn players(&self) -> &[P] {
        &self.players
    }

    fn value(&self, coalition: &Coalition) -> Result<BigRational> {
        let members: Vec<&P> = coalition
            .members()
            .filter_map(|i| self.players.get(i))
            .collect();
        (self.oracle)(&members)
    }
}

/// Outcome of a Monte Carlo run, with the parameters it was produced under.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub samples: u64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ScoreValue {
    Exact(BigRational),
    Approximate(Estimate),
}

impl ScoreValue {
    pub fn mode(&self) -> &'static str {
        match self {
            ScoreValue::Exact(_) => "exact",
            ScoreValue::Approximate(_) => "approximate",
        }
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            ScoreValue::Exact(r) => crate::rational::to_f64(r),
            ScoreValue::Approximate(e) => e.value,
        }
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            ScoreValue::Exact(r) => Some(r),
            ScoreValue::Approximate(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScoreResult<P> {
    pub player: P,
    pub value: ScoreValue,
}
