//! Scoring a classifier that runs in a separate process.
//!
//! This example starts itself with `--serve` to play the classifier, then
//! asks it for labels over the line protocol.
//!
//! `cargo run --example external_classifier`

use std::io::{stdin, stdout};
use std::process::Command;

use xscore::classify::{
    serve, Distribution, Entity, ExternalClassifier, FeatureSpace, FnClassifier,
};
use xscore::mlscores::{score_all, ExplanationRequest, MlScoreKind};

fn majority() -> FnClassifier {
    FnClassifier::new(3, |e| (0..3).filter(|&i| e.get(i)).count() >= 2)
}

fn main() -> xscore::Result<()> {
    if std::env::args().nth(1).as_deref() == Some("--serve") {
        return serve(&majority(), stdin().lock(), stdout().lock());
    }
    let mut cmd = Command::new(std::env::current_exe().expect("own executable"));
    cmd.arg("--serve");
    let remote = ExternalClassifier::spawn_any_width(cmd, true)?;

    let space = FeatureSpace::numbered(3)?;
    let uniform = Distribution::uniform(3);
    let req = ExplanationRequest::new(&space, &remote, &uniform, Entity::parse("110")?)?;
    let kinds = [MlScoreKind::Shap, MlScoreKind::Counter, MlScoreKind::Resp];
    for s in score_all(&req, &kinds)?.scores {
        println!("{:?} {} = {}", s.kind, s.feature, s.value);
    }
    Ok(())
}
