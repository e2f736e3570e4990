//! Shapley and Banzhaf values of database tuples, exact and sampled.
//!
//! `cargo run --example tuple_shapley -- [seed]`

use xscore::dbscores::{score_tuples, DbScoreOptions, Explained, ScoreKind, ScoreMode};
use xscore::games::MonteCarloConfig;
use xscore::reldb::{parse_query, Database};

fn main() -> xscore::Result<()> {
    let seed = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(0);
    let mut b = Database::builder();
    for row in [["a", "b"], ["c", "d"], ["b", "b"]] {
        b.insert("R", row)?;
    }
    for v in ["a", "c", "b"] {
        b.insert("S", [v])?;
    }
    let db = b.build();
    let query = parse_query("Q() :- S(x), R(x, y), S(y)")?;
    let target = Explained::Query {
        db: &db,
        query: &query,
    };

    let exact = score_tuples(
        target,
        &[ScoreKind::Shapley, ScoreKind::Banzhaf],
        &DbScoreOptions::default(),
    )?;
    let sampled = DbScoreOptions {
        mode: ScoreMode::MonteCarlo(MonteCarloConfig::new(0.05, 0.05, seed)),
        ..DbScoreOptions::default()
    };
    let estimates = score_tuples(target, &[ScoreKind::Shapley], &sampled)?;

    println!(
        "{:8} {:>8} {:>8} {:>10}",
        "tuple", "shapley", "banzhaf", "estimate"
    );
    let n = db.len();
    for (i, t) in db.ids().iter().enumerate() {
        println!(
            "{:8} {:>8} {:>8} {:>10.4}",
            db.fact(t).unwrap_or_default(),
            exact[i]
                .value
                .exact()
                .map(ToString::to_string)
                .unwrap_or_default(),
            exact[n + i]
                .value
                .exact()
                .map(ToString::to_string)
                .unwrap_or_default(),
            estimates[i].value.as_f64(),
        );
    }
    Ok(())
}
