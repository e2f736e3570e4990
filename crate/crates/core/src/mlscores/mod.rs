//! Scores for the feature values of a classified entity: SHAP, COUNTER and
//! RESP.

mod resp;
mod shap;

use std::cmp::Reverse;

use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use resp::{resp, Assignment, ExplanationKind, RespSemantics, RespWitness};
pub use shap::{shap, shap_all, ShapGame};

use crate::classify::{conditional_expectation, Classifier, Distribution, Entity, FeatureSpace};
use crate::error::{Error, Result};
use crate::games::DEFAULT_BUDGET;
use crate::rational::from_bool;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MlScoreKind {
    Shap,
    Counter,
    Resp,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureScore {
    pub feature: String,
    pub kind: MlScoreKind,
    #[serde(with = "crate::serde_rational")]
    pub value: BigRational,
    /// Set for RESP scores only.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub explanation_kind: Option<ExplanationKind>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<RespWitness>,
}

impl FeatureScore {
    fn plain(feature: &str, kind: MlScoreKind, value: BigRational) -> Self {
        Self {
            feature: feature.to_string(),
            kind,
            value,
            explanation_kind: None,
            witness: None,
        }
    }
}

/// An entity to explain, together with the classifier and distribution the
/// scores are computed under.
#[derive(Clone, Copy)]
pub struct ExplanationRequest<'a> {
    pub space: &'a FeatureSpace,
    pub classifier: &'a dyn Classifier,
    pub distribution: &'a Distribution,
    pub entity: Entity,
    /// Largest contingency set RESP searches; `None` means `n - 1`.
    pub max_contingency: Option<usize>,
    pub resp_semantics: RespSemantics,
    /// Drop SHAP subsets whose conditioning event has zero mass instead of failing.
    pub skip_zero_mass: bool,
    pub budget: u64,
}

impl<'a> ExplanationRequest<'a> {
    pub fn new(
        space: &'a FeatureSpace,
        classifier: &'a dyn Classifier,
        distribution: &'a Distribution,
        entity: Entity,
    ) -> Result<Self> {
        space.check(&entity)?;
        for found in [classifier.width(), distribution.width()] {
            if found != space.width() {
                return Err(Error::WidthMismatch {
                    expected: space.width(),
                    found,
                });
            }
        }
        Ok(Self {
            space,
            classifier,
            distribution,
            entity,
            max_contingency: None,
            resp_semantics: RespSemantics::default(),
            skip_zero_mass: false,
            budget: DEFAULT_BUDGET,
        })
    }

    pub fn width(&self) -> usize {
        self.space.width()
    }

    pub fn label(&self) -> Result<bool> {
        self.classifier.label(&self.entity)
    }

    fn full_mask(&self) -> u64 {
        let n = self.width();
        if n == 64 {
            u64::MAX
        } else {
            (1u64 << n) - 1
        }
    }

    fn expectation(&self, fixed: u64) -> Result<BigRational> {
        conditional_expectation(self.distribution, self.classifier, &self.entity, fixed)
    }
}

/// `L(e)` minus the expected label over entities that agree with `e`
/// everywhere except on `feature`.
pub fn counter(req: &ExplanationRequest<'_>, feature: usize) -> Result<FeatureScore> {
    let rest = req.full_mask() & !(1u64 << feature);
    let value = from_bool(req.label()?) - req.expectation(rest)?;
    Ok(FeatureScore::plain(
        req.space.name(feature),
        MlScoreKind::Counter,
        value,
    ))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct MlScores {
    pub scores: Vec<FeatureScore>,
    pub warnings: Vec<String>,
}

/// Scores every feature for each requested kind.
///
/// Scores are grouped by kind; within a kind they are ranked by value,
/// highest first, ties broken by feature name.
pub fn score_all(req: &ExplanationRequest<'_>, kinds: &[MlScoreKind]) -> Result<MlScores> {
    let mut kinds = kinds.to_vec();
    kinds.sort();
    kinds.dedup();
    let features: Vec<usize> = (0..req.width()).collect();
    let mut out = MlScores::default();
    for kind in kinds {
        let mut scores = match kind {
            MlScoreKind::Shap => {
                let (scores, skipped) = shap_all(req)?;
                if skipped > 0 {
                    out.warnings.push(format!(
                        "{skipped} zero-mass conditioning events skipped in SHAP sums"
                    ));
                }
                scores
            }
            MlScoreKind::Counter => features
                .par_iter()
                .map(|&f| counter(req, f))
                .collect::<Result<Vec<_>>>()?,
            MlScoreKind::Resp => features
                .par_iter()
                .map(|&f| resp(req, f))
                .collect::<Result<Vec<_>>>()?,
        };
        scores
            .sort_by(|a, b| (Reverse(&a.value), &a.feature).cmp(&(Reverse(&b.value), &b.feature)));
        out.scores.extend(scores);
    }
    Ok(out)
}

#[cfg(test)]
pub(crate) mod fixtures {
    use crate::classify::{Entity, FeatureSpace, FnClassifier, TruthTable};

    /// Labels of the loan example, listed as `(F1 F2 F3, label)`.
    pub const EX6_ROWS: [(&str, bool); 8] = [
        ("011", true),
        ("111", true),
        ("110", true),
        ("101", false),
        ("100", true),
        ("010", true),
        ("001", false),
        ("000", false),
    ];

    pub fn ex6() -> TruthTable {
        let space = FeatureSpace::numbered(3).unwrap();
        let f = FnClassifier::new(3, |e| {
            EX6_ROWS
                .iter()
                .find(|(s, _)| Entity::parse(s).unwrap() == *e)
                .unwrap()
                .1
        });
        TruthTable::tabulate(space, &f).unwrap()
    }

    pub fn e1() -> Entity {
        Entity::parse("011").unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::classify::{all_entities, FnClassifier};
    use crate::rational::{int, ratio};

    #[test]
    fn counter_on_the_loan_table() {
        let t = ex6();
        let u = Distribution::uniform(3);
        let req = ExplanationRequest::new(t.space(), &t, &u, e1()).unwrap();
        // Flipping F2 of e1 gives e7, labelled 0.
        assert_eq!(counter(&req, 1).unwrap().value, ratio(1, 2));
    }

    #[test]
    fn counter_two_point_identity() {
        let c = FnClassifier::new(3, |e| e.get(0) | (e.get(1) & !e.get(2)));
        let space = FeatureSpace::numbered(3).unwrap();
        let u = Distribution::uniform(3);
        for e in all_entities(3).unwrap() {
            let req = ExplanationRequest::new(&space, &c, &u, e).unwrap();
            for f in 0..3 {
                let l = |x: &Entity| from_bool(c.label(x).unwrap());
                let expect = (l(&e) - l(&e.flip(f))) / int(2);
                assert_eq!(counter(&req, f).unwrap().value, expect);
            }
        }
    }

    #[test]
    fn ranking_and_constants() {
        let t = ex6();
        let u = Distribution::uniform(3);
        let req = ExplanationRequest::new(t.space(), &t, &u, e1()).unwrap();
        let r = score_all(&req, &[MlScoreKind::Resp]).unwrap();
        assert_eq!(r.scores[0].feature, "F2");
        assert_eq!(r.scores[1].feature, "F1");

        let space = FeatureSpace::new(["b", "a", "c"]).unwrap();
        let one = FnClassifier::constant(3, true);
        let req = ExplanationRequest::new(&space, &one, &u, e1()).unwrap();
        let all = score_all(&req, &[MlScoreKind::Counter, MlScoreKind::Shap]).unwrap();
        let names: Vec<_> = all.scores.iter().map(|s| s.feature.as_str()).collect();
        assert_eq!(names, ["a", "b", "c", "a", "b", "c"]);
        assert!(all.scores.iter().all(|s| s.value == int(0)));
    }

    #[test]
    fn dictator_ranks_first() {
        let c = FnClassifier::new(3, |e| e.get(0));
        let space = FeatureSpace::numbered(3).unwrap();
        let u = Distribution::uniform(3);
        let e = Entity::parse("100").unwrap();
        let req = ExplanationRequest::new(&space, &c, &u, e).unwrap();
        let all = score_all(&req, &[MlScoreKind::Shap, MlScoreKind::Counter]).unwrap();
        assert_eq!(all.scores[0].feature, "F1");
        assert_eq!(all.scores[3].feature, "F1");
    }

    #[test]
    fn width_mismatch_is_rejected() {
        let t = ex6();
        let u = Distribution::uniform(2);
        assert!(ExplanationRequest::new(t.space(), &t, &u, e1()).is_err());
    }
}
