//! SHAP, COUNTER and RESP scores for a truth-table classifier.
//!
//! `cargo run --example classifier_scores -- [entity]`

use xscore::classify::{Distribution, Entity, FeatureSpace, TruthTable};
use xscore::mlscores::{score_all, ExplanationRequest, MlScoreKind};

const LOAN: [(&str, bool); 8] = [
    ("000", false),
    ("001", false),
    ("010", true),
    ("011", true),
    ("100", true),
    ("101", false),
    ("110", true),
    ("111", true),
];

fn main() -> xscore::Result<()> {
    let entity = Entity::parse(&std::env::args().nth(1).unwrap_or_else(|| "011".into()))?;
    let space = FeatureSpace::new(["F1", "F2", "F3"])?;
    let mut labels = vec![false; 8];
    for (text, label) in LOAN {
        labels[Entity::parse(text)?.bits() as usize] = label;
    }
    let table = TruthTable::new(space.clone(), labels)?;
    let uniform = Distribution::uniform(3);
    let req = ExplanationRequest::new(&space, &table, &uniform, entity)?;

    let mut kinds = vec![MlScoreKind::Shap, MlScoreKind::Counter];
    if req.label()? {
        kinds.push(MlScoreKind::Resp);
    }
    let out = score_all(&req, &kinds)?;
    println!("entity {entity}, label {}", u8::from(req.label()?));
    for s in &out.scores {
        let witness = s
            .witness
            .as_ref()
            .map(|w| format!(" via {}", w.entity))
            .unwrap_or_default();
        println!("{:?} {} = {}{witness}", s.kind, s.feature, s.value);
    }
    Ok(())
}
