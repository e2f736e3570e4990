use num_rational::BigRational;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{Coalition, Estimate, Game, ScoreResult, ScoreValue};
use crate::error::{Error, Result};
use crate::rational::{int, to_f64};

/// Permutations per seed stream. Fixed so that results do not depend on
/// how many worker threads process the chunks.
const CHUNK: u64 = 256;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonteCarloConfig {
    pub epsilon: f64,
    pub delta: f64,
    pub seed: u64,
}

impl MonteCarloConfig {
    pub fn new(epsilon: f64, delta: f64, seed: u64) -> Self {
        Self {
            epsilon,
            delta,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "delta must lie in (0, 1), got {}",
                self.delta
            )));
        }
        Ok(())
    }
}

/// Hoeffding sample size for an additive `epsilon` error with probability
/// at least `1 - delta`, for marginals bounded in `[0, 1]`.
pub fn sample_count(epsilon: f64, delta: f64) -> u64 {
    ((2.0 / delta).ln() / (2.0 * epsilon * epsilon)).ceil() as u64
}

/// Estimates the Shapley value of `player` by averaging its marginal
/// contribution over uniformly random player orders.
///
/// The additive guarantee `|estimate - shapley| <= epsilon` with probability
/// `1 - delta` holds for games whose marginals lie in `[0, 1]`, which covers
/// monotone Boolean query games.
pub fn shapley_monte_carlo<G: Game + ?Sized>(
    game: &G,
    player: &G::Player,
    config: &MonteCarloConfig,
) -> Result<ScoreResult<G::Player>> {
    config.validate()?;
    let p = game.index_of(player)?;
    let n = game.num_players();
    let samples = sample_count(config.epsilon, config.delta);
    let chunks = samples.div_ceil(CHUNK);

    let total = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(chunk);
            let len = CHUNK.min(samples - chunk * CHUNK);
            let mut order: Vec<usize> = (0..n).collect();
            let mut sum = BigRational::zero();
            for _ in 0..len {
                order.shuffle(&mut rng);
                let before: Coalition = order.iter().copied().take_while(|&q| q != p).collect();
                sum += game.value(&before.with(p))? - game.value(&before)?;
            }
            Ok(sum)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum::<BigRational>();

    let mean = total / int(samples as i64);
    Ok(ScoreResult {
        player: player.clone(),
        value: ScoreValue::Approximate(Estimate {
            value: to_f64(&mean),
            epsilon: config.epsilon,
            delta: config.delta,
            samples,
            seed: config.seed,
        }),
    })
}

/// Estimates the Banzhaf index of `player` from uniformly random coalitions
/// of the other players, with the same sample size rule as
/// [`shapley_monte_carlo`].
pub fn banzhaf_monte_carlo<G: Game + ?Sized>(
    game: &G,
    player: &G::Player,
    config: &MonteCarloConfig,
) -> Result<ScoreResult<G::Player>> {
    config.validate()?;
    let p = game.index_of(player)?;
    let n = game.num_players();
    let samples = sample_count(config.epsilon, config.delta);
    let chunks = samples.div_ceil(CHUNK);

    let total = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(chunk);
            let len = CHUNK.min(samples - chunk * CHUNK);
            let mut sum = BigRational::zero();
            for _ in 0..len {
                let others: Coalition = (0..n).filter(|&q| q != p && rng.gen::<bool>()).collect();
                sum += game.value(&others.with(p))? - game.value(&others)?;
            }
            Ok(sum)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum::<BigRational>();

    let mean = total / int(samples as i64);
    Ok(ScoreResult {
        player: player.clone(),
        value: ScoreValue::Approximate(Estimate {
            value: to_f64(&mean),
            epsilon: config.epsilon,
            delta: config.delta,
            samples,
            seed: config.seed,
        }),
    })
}
