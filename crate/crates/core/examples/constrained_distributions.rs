//! Conditioning a distribution on denial constraints, and SHAP under it.
//!
//! `cargo run --example constrained_distributions`

use xscore::classify::{parse_constraints, Distribution, Entity, FeatureSpace, FnClassifier};
use xscore::mlscores::{shap, ExplanationRequest};
use xscore::rational::ratio;

fn main() -> xscore::Result<()> {
    let space = FeatureSpace::new(["income", "debt", "owner"])?;
    // Nobody in debt owns a home, and high income implies no debt.
    let theta = parse_constraints("!(debt & owner)\n!(income & debt)", &space)?;

    let base = Distribution::product(vec![ratio(1, 2), ratio(1, 3), ratio(1, 4)])?;
    let conditioned = base.condition(&theta)?;
    for e in space.entities()? {
        println!(
            "{e}  base {:>6}  conditioned {:>6}",
            base.prob(&e)?.to_string(),
            conditioned.prob(&e)?.to_string()
        );
    }

    let approve = FnClassifier::new(3, |e| e.get(0) || e.get(2));
    let e = Entity::parse("101")?;
    for d in [&base, &conditioned] {
        let req = ExplanationRequest::new(&space, &approve, d, e)?;
        let scores: Vec<String> = (0..3)
            .map(|f| shap(&req, f).map(|s| format!("{}={}", s.feature, s.value)))
            .collect::<xscore::Result<_>>()?;
        println!("{}: {}", d.kind(), scores.join(" "));
    }
    Ok(())
}
