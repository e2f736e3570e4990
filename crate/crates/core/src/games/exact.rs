use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use super::{Coalition, Game};
use crate::error::{Error, Result};
use crate::rational::{factorial, pow2};

/// Default cap on coalition evaluations for exact enumeration.
pub const DEFAULT_BUDGET: u64 = 1 << 25;

/// `k! (n-k-1)! / n!`, the weight of a size-`k` coalition in an `n`-player game.
pub fn shapley_weight(n: usize, k: usize) -> BigRational {
    debug_assert!(k < n);
    BigRational::new(
        BigInt::from(factorial(k) * factorial(n - k - 1)),
        BigInt::from(factorial(n)),
    )
}

fn check_budget(n: usize, budget: u64) -> Result<()> {
    let needed = if n >= 127 { u128::MAX } else { 1u128 << n };
    if n >= 64 || needed > budget as u128 {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    Ok(())
}

/// Spreads the bits of `sub` over all positions except `skip`.
fn insert_zero_bit(sub: u64, skip: usize) -> u64 {
    let low = sub & ((1u64 << skip) - 1);
    let high = (sub >> skip) << (skip + 1);
    low | high
}

/// Marginal contributions of `p`, summed per coalition size.
fn marginal_sums<G: Game + ?Sized>(game: &G, p: usize) -> Result<Vec<BigRational>> {
    let n = game.num_players();
    let half = 1u64 << (n - 1);
    let zeros = || vec![BigRational::zero(); n];
    (0..half)
        .into_par_iter()
        .try_fold(zeros, |mut acc, sub| {
            let mask = insert_zero_bit(sub, p);
            let without = game.value(&Coalition::from_mask(mask))?;
            let with = game.value(&Coalition::from_mask(mask | (1u64 << p)))?;
            acc[sub.count_ones() as usize] += with - without;
            Ok(acc)
        })
        .try_reduce(zeros, |mut a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            Ok(a)
        })
}

fn shapley_from_sums(sums: &[BigRational]) -> BigRational {
    let n = sums.len();
    sums.iter()
        .enumerate()
        .filter(|(_, s)| !s.is_zero())
        .map(|(k, s)| shapley_weight(n, k) * s)
        .sum()
}

fn banzhaf_from_sums(sums: &[BigRational]) -> BigRational {
    let total: BigRational = sums.iter().sum();
    total / pow2(sums.len() - 1)
}

/// Exact Shapley value of `player`, enumerating all coalitions of the others.
pub fn shapley_exact<G: Game + ?Sized>(
    game: &G,
    player: &G::Player,
    budget: u64,
) -> Result<BigRational> {
    let p = game.index_of(player)?;
    check_budget(game.num_players(), budget)?;
    Ok(shapley_from_sums(&marginal_sums(game, p)?))
}

/// Exact Banzhaf index: the unweighted mean of marginal contributions.
pub fn banzhaf_exact<G: Game + ?Sized>(
    game: &G,
    player: &G::Player,
    budget: u64,
) -> Result<BigRational> {
    let p = game.index_of(player)?;
    check_budget(game.num_players(), budget)?;
    Ok(banzhaf_from_sums(&marginal_sums(game, p)?))
}

/// Values of every coalition, indexed by mask. Each coalition is evaluated once.
fn value_table<G: Game + ?Sized>(game: &G) -> Result<Vec<BigRational>> {
    let n = game.num_players();
    (0..1u64 << n)
        .into_par_iter()
        .map(|mask| game.value(&Coalition::from_mask(mask)))
        .collect()
}

fn all_sums<G: Game + ?Sized>(game: &G, budget: u64) -> Result<Vec<Vec<BigRational>>> {
    let n = game.num_players();
    check_budget(n, budget)?;
    let table = value_table(game)?;
    Ok((0..n)
        .into_par_iter()
        .map(|p| {
            let bit = 1u64 << p;
            let mut sums = vec![BigRational::zero(); n];
            for mask in (0..table.len() as u64).filter(|m| m & bit == 0) {
                let diff = &table[(mask | bit) as usize] - &table[mask as usize];
                sums[mask.count_ones() as usize] += diff;
            }
            sums
        })
        .collect())
}

/// Shapley values of all players, keyed in ascending player order.
pub fn shapley_all<G: Game + ?Sized>(
    game: &G,
    budget: u64,
) -> Result<BTreeMap<G::Player, BigRational>> {
    let sums = all_sums(game, budget)?;
    Ok(game
        .players()
        .iter()
        .cloned()
        .zip(sums.iter().map(|s| shapley_from_sums(s)))
        .collect())
}

pub fn banzhaf_all<G: Game + ?Sized>(
    game: &G,
    budget: u64,
) -> Result<BTreeMap<G::Player, BigRational>> {
    let sums = all_sums(game, budget)?;
    Ok(game
        .players()
        .iter()
        .cloned()
        .zip(sums.iter().map(|s| banzhaf_from_sums(s)))
        .collect())
}
