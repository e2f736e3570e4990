use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use super::{ExplanationRequest, FeatureScore, MlScoreKind};
use crate::error::{Error, Result};
use crate::games::{shapley_all, shapley_exact, shapley_weight, Coalition, Game};

/// `G_e(S) = E(L(e') | e'_S = e_S)`, with features as players `0..n`.
pub struct ShapGame<'a> {
    req: &'a ExplanationRequest<'a>,
    players: Vec<usize>,
}

impl<'a> ShapGame<'a> {
    pub fn new(req: &'a ExplanationRequest<'a>) -> Self {
        Self {
            req,
            players: (0..req.width()).collect(),
        }
    }
}

fn mask(c: &Coalition) -> u64 {
    c.members().fold(0, |m, i| m | 1 << i)
}

impl Game for ShapGame<'_> {
    type Player = usize;

    fn players(&self) -> &[usize] {
        &self.players
    }

    fn value(&self, coalition: &Coalition) -> Result<BigRational> {
        self.req.expectation(mask(coalition))
    }
}

fn score(req: &ExplanationRequest<'_>, feature: usize, value: BigRational) -> FeatureScore {
    FeatureScore::plain(req.space.name(feature), MlScoreKind::Shap, value)
}

/// SHAP score of one feature. With `skip_zero_mass` set, subsets whose
/// conditioning event has zero mass are left out of the sum.
pub fn shap(req: &ExplanationRequest<'_>, feature: usize) -> Result<FeatureScore> {
    if req.skip_zero_mass {
        let (mut all, _) = shap_all(req)?;
        return Ok(all.swap_remove(feature));
    }
    let game = ShapGame::new(req);
    Ok(score(
        req,
        feature,
        shapley_exact(&game, &feature, req.budget)?,
    ))
}

/// SHAP scores of all features in feature order, plus the number of
/// conditioning events skipped for zero mass.
pub fn shap_all(req: &ExplanationRequest<'_>) -> Result<(Vec<FeatureScore>, usize)> {
    let game = ShapGame::new(req);
    if !req.skip_zero_mass {
        let values = shapley_all(&game, req.budget)?;
        let scores = values.into_iter().map(|(f, v)| score(req, f, v)).collect();
        return Ok((scores, 0));
    }

    let n = req.width();
    let needed = 1u128 << n;
    if n >= 64 || needed > u128::from(req.budget) {
        return Err(Error::BudgetExceeded {
            needed,
            budget: req.budget,
        });
    }
    let table: Vec<Option<BigRational>> = (0..1u64 << n)
        .into_par_iter()
        .map(|m| match req.expectation(m) {
            Ok(v) => Ok(Some(v)),
            Err(Error::ZeroMass(_)) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    let skipped = table.iter().filter(|v| v.is_none()).count();
    let scores = (0..n)
        .map(|f| {
            let bit = 1u64 << f;
            let value = (0..1u64 << n)
                .filter(|m| m & bit == 0)
                .filter_map(|m| {
                    let with = table[(m | bit) as usize].as_ref()?;
                    let without = table[m as usize].as_ref()?;
                    Some(shapley_weight(n, m.count_ones() as usize) * (with - without))
                })
                .fold(BigRational::zero(), |a, b| a + b);
            score(req, f, value)
        })
        .collect();
    Ok((scores, skipped))
}
