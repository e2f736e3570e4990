mod common;

use common::{
    fixture, has_self_join, hierarchical_by_definition, holds_on, random_database, random_query,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use xscore::reldb::{
    analyze, answers, compile_lineage, evaluate, load_csv, parse_lineage, parse_query, CsvSource,
    Database, Dichotomy,
};
use xscore::Error;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lineage_agrees_with_evaluation_on_every_subinstance(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let db = random_database(&mut rng, 7);
        let query = random_query(&mut rng, 3, true);
        let lin = compile_lineage(&db, &query).unwrap();
        let ids = db.ids();
        for mask in 0..1u64 << ids.len() {
            let on = |t: &xscore::reldb::TupleId| mask & 1 << ids.iter().position(|x| x == t).unwrap() != 0;
            prop_assert_eq!(lin.eval(&on), holds_on(&db, &query, mask));
        }
    }

    #[test]
    fn queries_are_monotone(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let db = random_database(&mut rng, 7);
        let query = random_query(&mut rng, 3, true);
        let full = (1u64 << db.len()) - 1;
        for mask in 0..=full {
            if holds_on(&db, &query, mask) {
                prop_assert!(holds_on(&db, &query, full));
                for i in 0..db.len() {
                    prop_assert!(holds_on(&db, &query, mask | 1 << i));
                }
            }
        }
    }

    #[test]
    fn printed_queries_parse_back(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let query = random_query(&mut rng, 4, true);
        prop_assert_eq!(parse_query(&query.to_string()).unwrap(), query);
    }

    #[test]
    fn hierarchy_test_matches_its_definition(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let query = random_query(&mut rng, 4, true);
        let a = analyze(&query);
        prop_assert_eq!(a.hierarchical, hierarchical_by_definition(&query));
        prop_assert_eq!(a.self_join_free, !has_self_join(&query));
    }
}

#[test]
fn insertion_order_does_not_change_answers() {
    let rows = [
        ("R", ["a", "b"]),
        ("R", ["b", "c"]),
        ("R", ["c", "a"]),
        ("R", ["a", "a"]),
    ];
    let build = |order: &[usize]| {
        let mut b = Database::builder();
        for &i in order {
            b.insert(rows[i].0, rows[i].1).unwrap();
        }
        b.build()
    };
    let q = parse_query("Q(x) :- R(x, y), R(y, z)").unwrap();
    let forward = answers(&build(&[0, 1, 2, 3]), &q).unwrap();
    let backward = answers(&build(&[3, 2, 1, 0]), &q).unwrap();
    assert_eq!(forward, backward);
    assert_eq!(forward.len(), 3);
}

#[test]
fn dichotomy_verdicts() {
    let verdict = |t: &str| analyze(&parse_query(t).unwrap()).verdict;
    assert_eq!(verdict("Q() :- R(x,y), S(x,z)"), Dichotomy::PolynomialTime);
    assert_eq!(
        verdict("Q() :- R(x), S(x,y), T(y)"),
        Dichotomy::SharpPComplete
    );
    assert_eq!(verdict("Q() :- R(x,y), R(y,z)"), Dichotomy::Inapplicable);
}

#[test]
fn csv_fixtures_load_and_evaluate() {
    let db = load_csv(&[
        CsvSource::new("R", fixture("causes/R.csv")),
        CsvSource::new("S", fixture("causes/S.csv")),
    ])
    .unwrap();
    assert_eq!(db.len(), 6);
    let text = std::fs::read_to_string(fixture("causes/query.txt")).unwrap();
    assert!(evaluate(&db, &parse_query(&text).unwrap()).unwrap());
}

#[test]
fn schema_errors_are_reported() {
    let mut b = Database::builder();
    b.insert("R", ["a", "b"]).unwrap();
    assert!(matches!(
        b.insert("R", ["a"]),
        Err(Error::ArityMismatch { .. })
    ));
    let db = b.build();
    assert!(matches!(
        evaluate(&db, &parse_query("Q() :- T(x)").unwrap()),
        Err(Error::UnknownRelation(_))
    ));
    assert!(matches!(
        parse_lineage("R:1 & X:9", &db),
        Err(Error::UnknownTuple(_))
    ));
    assert!(matches!(
        parse_query("Q() :- R(x"),
        Err(Error::Syntax { .. })
    ));
}
