use itertools::Itertools;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{ExplanationRequest, FeatureScore, MlScoreKind};
use crate::classify::Entity;
use crate::error::{Error, Result};
use crate::rational::ratio;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExplanationKind {
    Counterfactual,
    Actual,
    None,
}

/// What counts as an actual explanation with contingency set `Y`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RespSemantics {
    /// Some joint change of `x` and `Y` yields label 0, while changing `x`
    /// alone does not.
    #[default]
    JointChange,
    /// Additionally requires the label to stay 1 after changing `Y` alone.
    Strict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub feature: String,
    pub value: u8,
}

/// The change that flips the label: new values for `Y` and for the
/// explained feature, and the resulting entity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RespWitness {
    pub contingency: Vec<String>,
    pub replacement: Vec<Assignment>,
    pub entity: Entity,
}

/// Searches contingency sets by increasing size, in lexicographic order of
/// feature indices, and replacement values in lexicographic order.
/// Returns the first `(Y, changed entity)` found.
fn search(
    req: &ExplanationRequest<'_>,
    x: usize,
    cap: usize,
) -> Result<Option<(Vec<usize>, Entity)>> {
    let e = req.entity;
    let label = |v: &Entity| req.classifier.label(v);
    let others: Vec<usize> = (0..req.width()).filter(|&i| i != x).collect();
    for k in 0..=cap.min(others.len()) {
        for ys in others.iter().copied().combinations(k) {
            for values in 0..1u64 << k {
                // The first member of `Y` takes the most significant bit.
                let changed = ys
                    .iter()
                    .enumerate()
                    .fold(e, |v, (j, &y)| v.with(y, values >> (k - 1 - j) & 1 == 1));
                let flipped = changed.flip(x);
                if label(&flipped)? {
                    continue;
                }
                if req.resp_semantics == RespSemantics::Strict && !label(&changed)? {
                    continue;
                }
                return Ok(Some((ys, flipped)));
            }
        }
    }
    Ok(None)
}

/// RESP score of one feature value of an entity labelled 1.
///
/// Replacements range over raw `{0,1}` values; the request's distribution
/// plays no part. The search stops at `max_contingency` (default `n - 1`).
pub fn resp(req: &ExplanationRequest<'_>, feature: usize) -> Result<FeatureScore> {
    if !req.label()? {
        return Err(Error::LabelConvention);
    }
    let cap = req
        .max_contingency
        .unwrap_or(req.width() - 1)
        .min(req.width() - 1);
    let name = req.space.name(feature).to_string();
    let Some((ys, flipped)) = search(req, feature, cap)? else {
        return Ok(FeatureScore {
            feature: name,
            kind: MlScoreKind::Resp,
            value: BigRational::zero(),
            explanation_kind: Some(ExplanationKind::None),
            witness: None,
        });
    };
    let mut changed: Vec<usize> = ys.iter().copied().chain([feature]).collect();
    changed.sort_unstable();
    let witness = RespWitness {
        contingency: ys.iter().map(|&y| req.space.name(y).to_string()).collect(),
        replacement: changed
            .iter()
            .map(|&i| Assignment {
                feature: req.space.name(i).to_string(),
                value: u8::from(flipped.get(i)),
            })
            .collect(),
        entity: flipped,
    };
    Ok(FeatureScore {
        feature: name,
        kind: MlScoreKind::Resp,
        value: ratio(1, 1 + ys.len() as i64),
        explanation_kind: Some(if ys.is_empty() {
            ExplanationKind::Counterfactual
        } else {
            ExplanationKind::Actual
        }),
        witness: Some(witness),
    })
}
