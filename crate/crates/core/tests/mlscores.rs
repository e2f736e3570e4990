mod common;

use common::{brute_resp, fixture, permutation_shap, q, random_labels};
use num_rational::BigRational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use xscore::classify::{Distribution, Entity, FeatureSpace, TruthTable};
use xscore::mlscores::{
    counter, resp, score_all, shap, ExplanationKind, ExplanationRequest, MlScoreKind, RespSemantics,
};
use xscore::rational::{from_bool, parse};
use xscore::Error;

fn loan() -> TruthTable {
    TruthTable::read_csv(&fixture("loan/table.csv")).unwrap()
}

fn table(n: usize, labels: Vec<bool>) -> TruthTable {
    TruthTable::new(FeatureSpace::numbered(n).unwrap(), labels).unwrap()
}

#[test]
fn shap_on_the_loan_table() {
    let t = loan();
    let u = Distribution::uniform(3);
    let req = ExplanationRequest::new(t.space(), &t, &u, Entity::parse("011").unwrap()).unwrap();
    let got: Vec<BigRational> = (0..3).map(|f| shap(&req, f).unwrap().value).collect();
    assert_eq!(got, vec![q(-1, 24), q(11, 24), q(-1, 24)]);
    assert_eq!(counter(&req, 1).unwrap().value, q(1, 2));
}

#[test]
fn resp_matches_the_committed_oracle() {
    let oracle: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(fixture("loan/resp_oracle.json")).unwrap())
            .unwrap();
    let t = loan();
    let u = Distribution::uniform(3);
    let e = Entity::parse(oracle["entity"].as_str().unwrap()).unwrap();
    for (key, semantics) in [
        ("joint_change", RespSemantics::JointChange),
        ("strict", RespSemantics::Strict),
    ] {
        let mut req = ExplanationRequest::new(t.space(), &t, &u, e).unwrap();
        req.resp_semantics = semantics;
        for (f, name) in t.space().names().iter().enumerate() {
            let expect = parse(oracle[key][name].as_str().unwrap()).unwrap();
            assert_eq!(resp(&req, f).unwrap().value, expect, "{key} {name}");
        }
    }
}

#[test]
fn resp_witnesses_on_the_loan_table() {
    let t = loan();
    let u = Distribution::uniform(3);
    let req = ExplanationRequest::new(t.space(), &t, &u, Entity::parse("011").unwrap()).unwrap();
    let f2 = resp(&req, 1).unwrap();
    assert_eq!(f2.explanation_kind, Some(ExplanationKind::Counterfactual));
    assert_eq!(f2.witness.unwrap().entity, Entity::parse("001").unwrap());
    let f1 = resp(&req, 0).unwrap();
    assert_eq!(f1.explanation_kind, Some(ExplanationKind::Actual));
    assert_eq!(f1.witness.unwrap().contingency, vec!["F2".to_string()]);

    let zero = ExplanationRequest::new(t.space(), &t, &u, Entity::parse("000").unwrap()).unwrap();
    assert!(matches!(resp(&zero, 0), Err(Error::LabelConvention)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn shap_matches_the_permutation_oracle(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=4);
        let labels = random_labels(&mut rng, n);
        let t = table(n, labels.clone());
        let e = rng.gen_range(0..1u64 << n);
        let d = if rng.gen_bool(0.5) {
            Distribution::uniform(n)
        } else {
            Distribution::product((0..n).map(|_| q(rng.gen_range(1..=3), 4)).collect()).unwrap()
        };
        let oracle = permutation_shap(&d.masses().unwrap(), &labels, n, e);
        let req = ExplanationRequest::new(t.space(), &t, &d, Entity::new(e, n).unwrap()).unwrap();
        for (f, want) in oracle.iter().enumerate() {
            prop_assert_eq!(&shap(&req, f).unwrap().value, want);
        }
    }

    #[test]
    fn resp_matches_the_brute_force_oracle(seed in any::<u64>(), strict in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=5);
        let labels = random_labels(&mut rng, n);
        let Some(e) = (0..1u64 << n).find(|&b| labels[b as usize]) else { return Ok(()) };
        let t = table(n, labels.clone());
        let u = Distribution::uniform(n);
        let mut req = ExplanationRequest::new(t.space(), &t, &u, Entity::new(e, n).unwrap()).unwrap();
        req.resp_semantics = if strict { RespSemantics::Strict } else { RespSemantics::JointChange };
        for x in 0..n {
            let got = resp(&req, x).unwrap();
            prop_assert_eq!(&got.value, &brute_resp(&labels, n, e, x, strict));
            if let Some(w) = got.witness {
                prop_assert!(!labels[w.entity.bits() as usize]);
            }
        }
    }

    #[test]
    fn scores_follow_feature_names_not_positions(seed in any::<u64>()) {
        // Reversing the feature order (and the entity bits with it) permutes the scores.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..=4);
        let labels = random_labels(&mut rng, n);
        let rev = |b: u64| (0..n).fold(0, |r, i| r | ((b >> i) & 1) << (n - 1 - i));
        let names: Vec<String> = (1..=n).map(|i| format!("F{i}")).collect();
        let t1 = TruthTable::new(FeatureSpace::new(names.clone()).unwrap(), labels.clone()).unwrap();
        let t2 = TruthTable::new(
            FeatureSpace::new(names.iter().rev().cloned()).unwrap(),
            (0..1u64 << n).map(|b| labels[rev(b) as usize]).collect(),
        )
        .unwrap();
        let e = rng.gen_range(0..1u64 << n);
        let u = Distribution::uniform(n);
        let r1 = ExplanationRequest::new(t1.space(), &t1, &u, Entity::new(e, n).unwrap()).unwrap();
        let r2 = ExplanationRequest::new(t2.space(), &t2, &u, Entity::new(rev(e), n).unwrap()).unwrap();
        let kinds = [MlScoreKind::Shap, MlScoreKind::Counter];
        let mut a = score_all(&r1, &kinds).unwrap().scores;
        let mut b = score_all(&r2, &kinds).unwrap().scores;
        a.sort_by(|x, y| (x.kind, &x.feature).cmp(&(y.kind, &y.feature)));
        b.sort_by(|x, y| (x.kind, &x.feature).cmp(&(y.kind, &y.feature)));
        prop_assert_eq!(a, b);
    }
}

#[test]
fn shap_efficiency_under_an_empirical_sample() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..30 {
        let n = rng.gen_range(1..=5);
        let labels = random_labels(&mut rng, n);
        let t = table(n, labels.clone());
        let sample: Vec<Entity> = (0..6)
            .map(|_| Entity::new(rng.gen_range(0..1u64 << n), n).unwrap())
            .collect();
        let e = sample[0];
        let d = Distribution::empirical(sample, true).unwrap();
        let req = ExplanationRequest::new(t.space(), &t, &d, e).unwrap();
        let total: BigRational = (0..n).map(|f| shap(&req, f).unwrap().value).sum();
        let mean: BigRational = d
            .support()
            .unwrap()
            .into_iter()
            .map(|(s, p)| p * from_bool(labels[s.bits() as usize]))
            .sum();
        assert_eq!(total, from_bool(labels[e.bits() as usize]) - mean);
    }
}

#[test]
fn counter_is_the_two_point_difference_under_uniform() {
    for n in 1..=3usize {
        for code in 0..1u64 << (1 << n) {
            let labels: Vec<bool> = (0..1usize << n).map(|i| code >> i & 1 == 1).collect();
            let t = table(n, labels.clone());
            let u = Distribution::uniform(n);
            for e in 0..1u64 << n {
                let req =
                    ExplanationRequest::new(t.space(), &t, &u, Entity::new(e, n).unwrap()).unwrap();
                for f in 0..n {
                    let flipped = labels[(e ^ 1 << f) as usize];
                    let expect = (from_bool(labels[e as usize]) - from_bool(flipped)) / q(2, 1);
                    assert_eq!(counter(&req, f).unwrap().value, expect);
                }
            }
        }
    }
}

#[test]
fn zero_mass_events_fail_or_are_skipped() {
    let t = loan();
    let d = Distribution::empirical([Entity::parse("111").unwrap()], false).unwrap();
    let mut req =
        ExplanationRequest::new(t.space(), &t, &d, Entity::parse("011").unwrap()).unwrap();
    assert!(matches!(shap(&req, 0), Err(Error::ZeroMass(_))));
    req.skip_zero_mass = true;
    let out = score_all(&req, &[MlScoreKind::Shap]).unwrap();
    assert_eq!(out.scores.len(), 3);
    assert!(!out.warnings.is_empty());
}
