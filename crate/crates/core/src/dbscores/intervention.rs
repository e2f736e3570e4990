use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::games::Coalition;
use crate::rational::{half, pow2};
use crate::reldb::{IndexedLineage, Lineage, TupleId};

/// `do(X_target = value)` applied to a lineage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterventionQuery {
    pub lineage: Lineage,
    pub target: TupleId,
    pub value: bool,
}

impl InterventionQuery {
    pub fn new(lineage: Lineage, target: TupleId, value: bool) -> Self {
        Self {
            lineage,
            target,
            value,
        }
    }

    /// True when the target does not occur, so the intervention changes nothing.
    pub fn is_vacuous(&self) -> bool {
        !self.lineage.mentions(&self.target)
    }

    pub fn apply(&self) -> Lineage {
        intervene(&self.lineage, &self.target, self.value)
    }
}

/// Forces `X_target` to `value` and simplifies by constant propagation.
pub fn intervene(lineage: &Lineage, target: &TupleId, value: bool) -> Lineage {
    Lineage {
        formula: lineage.formula.substitute(target, value),
        provenance: lineage.provenance,
    }
}

/// Independent per-tuple probabilities: a default plus per-tuple overrides.
#[derive(Clone, Debug, PartialEq)]
pub struct TupleProbabilities {
    default: BigRational,
    overrides: BTreeMap<TupleId, BigRational>,
}

impl Default for TupleProbabilities {
    fn default() -> Self {
        Self::uniform()
    }
}

impl TupleProbabilities {
    /// Every tuple present with probability 1/2.
    pub fn uniform() -> Self {
        Self {
            default: half(),
            overrides: BTreeMap::new(),
        }
    }

    pub fn with_default(p: BigRational) -> Result<Self> {
        check_probability(&p)?;
        Ok(Self {
            default: p,
            overrides: BTreeMap::new(),
        })
    }

    pub fn set(&mut self, tuple: TupleId, p: BigRational) -> Result<&mut Self> {
        check_probability(&p)?;
        self.overrides.insert(tuple, p);
        Ok(self)
    }

    pub fn get(&self, tuple: &TupleId) -> &BigRational {
        self.overrides.get(tuple).unwrap_or(&self.default)
    }

    fn all_half(&self, support: &[TupleId]) -> bool {
        let h = half();
        support.iter().all(|t| *self.get(t) == h)
    }
}

fn check_probability(p: &BigRational) -> Result<()> {
    if p < &BigRational::zero() || p > &BigRational::one() {
        return Err(Error::InvalidParameter(format!(
            "probability {p} outside [0, 1]"
        )));
    }
    Ok(())
}

/// `P(lineage = 1)` with independent tuple variables, by enumerating all
/// valuations of the support.
pub fn lineage_probability(
    lineage: &Lineage,
    probs: &TupleProbabilities,
    budget: u64,
) -> Result<BigRational> {
    let indexed = IndexedLineage::new(lineage);
    let support = indexed.support();
    let k = support.len();
    if k >= 64 || (1u128 << k) > budget as u128 {
        return Err(Error::BudgetExceeded {
            needed: if k >= 127 { u128::MAX } else { 1u128 << k },
            budget,
        });
    }
    let valuations = 0..1u64 << k;

    if probs.all_half(support) {
        let hits = valuations
            .into_par_iter()
            .filter(|&m| indexed.eval(&Coalition::from_mask(m)))
            .count();
        return Ok(BigRational::from_integer(BigInt::from(hits)) / pow2(k));
    }

    let p: Vec<BigRational> = support.iter().map(|t| probs.get(t).clone()).collect();
    let q: Vec<BigRational> = p.iter().map(|x| BigRational::one() - x).collect();
    Ok(valuations
        .into_par_iter()
        .filter(|&m| indexed.eval(&Coalition::from_mask(m)))
        .map(|m| {
            (0..k)
                .map(|i| if m & (1 << i) != 0 { &p[i] } else { &q[i] })
                .fold(BigRational::one(), |acc, x| acc * x)
        })
        .reduce(BigRational::zero, |a, b| a + b))
}

/// `E(Q | do(X_t = 1)) - E(Q | do(X_t = 0))` over the lineage.
pub fn causal_effect(
    lineage: &Lineage,
    tuple: &TupleId,
    probs: &TupleProbabilities,
    budget: u64,
) -> Result<BigRational> {
    let on = lineage_probability(&intervene(lineage, tuple, true), probs, budget)?;
    let off = lineage_probability(&intervene(lineage, tuple, false), probs, budget)?;
    Ok(on - off)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::DEFAULT_BUDGET;
    use crate::rational::{int, ratio};
    use crate::reldb::{parse_lineage_unchecked, Formula};

    fn eq1() -> Lineage {
        parse_lineage_unchecked("(Rab & Sb) | (Rac & Sc) | (Rcb & Sb)").unwrap()
    }

    #[test]
    fn interventions_on_sb() {
        let lin = eq1();
        assert_eq!(intervene(&lin, &"Sb".into(), false).to_string(), "Rac & Sc");
        assert_eq!(
            intervene(&lin, &"Sb".into(), true).to_string(),
            "Rab | (Rac & Sc) | Rcb"
        );
        let q = InterventionQuery::new(lin.clone(), "zz".into(), true);
        assert!(q.is_vacuous());
        assert_eq!(q.apply(), lin);
    }

    #[test]
    fn intervened_probabilities() {
        let lin = eq1();
        let u = TupleProbabilities::uniform();
        let off = intervene(&lin, &"Sb".into(), false);
        let on = intervene(&lin, &"Sb".into(), true);
        assert_eq!(
            lineage_probability(&off, &u, DEFAULT_BUDGET).unwrap(),
            ratio(1, 4)
        );
        assert_eq!(
            lineage_probability(&on, &u, DEFAULT_BUDGET).unwrap(),
            ratio(13, 16)
        );
        assert_eq!(
            causal_effect(&lin, &"Sb".into(), &u, DEFAULT_BUDGET).unwrap(),
            ratio(9, 16)
        );
    }

    #[test]
    fn constants() {
        let u = TupleProbabilities::uniform();
        let t = Lineage::supplied(Formula::Const(true));
        assert_eq!(lineage_probability(&t, &u, DEFAULT_BUDGET).unwrap(), int(1));
        let f = Lineage::supplied(Formula::Or(vec![]));
        assert_eq!(lineage_probability(&f, &u, DEFAULT_BUDGET).unwrap(), int(0));
    }

    #[test]
    fn weighted_path_agrees_with_counting() {
        // Same probabilities through the general weighted path.
        let lin = eq1();
        let mut probs = TupleProbabilities::with_default(ratio(1, 2)).unwrap();
        probs.set("Rab".into(), ratio(1, 2)).unwrap();
        let mut skewed = TupleProbabilities::uniform();
        skewed.set("Rab".into(), ratio(1, 3)).unwrap();
        assert_eq!(
            lineage_probability(&lin, &probs, DEFAULT_BUDGET).unwrap(),
            lineage_probability(&lin, &TupleProbabilities::uniform(), DEFAULT_BUDGET).unwrap()
        );
        // Condition on Sb. Sb=1: 1 - (2/3)(1/2)(3/4) = 3/4. Sb=0: Rac & Sc = 1/4.
        assert_eq!(
            lineage_probability(&lin, &skewed, DEFAULT_BUDGET).unwrap(),
            ratio(1, 2) * ratio(3, 4) + ratio(1, 2) * ratio(1, 4)
        );
    }

    #[test]
    fn path_lineage_effects() {
        let lin = parse_lineage_unchecked("t1 | (t2 & t3) | (t4 & t5 & t6)").unwrap();
        let u = TupleProbabilities::uniform();
        let ce = |t: &str| causal_effect(&lin, &t.into(), &u, DEFAULT_BUDGET).unwrap();
        assert_eq!(ce("t1"), ratio(21, 32));
        assert_eq!(ce("t3"), ratio(7, 32));
        assert_eq!(ce("t5"), ratio(3, 32));
        assert_eq!(ce("t9"), int(0));
    }

    #[test]
    fn probability_range_and_budget() {
        assert!(TupleProbabilities::with_default(ratio(3, 2)).is_err());
        let lin = eq1();
        assert!(matches!(
            lineage_probability(&lin, &TupleProbabilities::uniform(), 8),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
