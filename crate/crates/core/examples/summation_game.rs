//! Shapley values for an aggregate: the sum of an output attribute.
//!
//! `cargo run --example summation_game`

use xscore::games::{shapley_all, Game, DEFAULT_BUDGET};
use xscore::reldb::{parse_query, Database};

fn main() -> xscore::Result<()> {
    let mut b = Database::builder();
    for (item, price) in [("pen", "3"), ("ink", "5"), ("pad", "1/2")] {
        b.insert("Price", [item, price])?;
    }
    for item in ["pen", "pad"] {
        b.insert("Sold", [item])?;
    }
    let db = b.build();
    let query = parse_query("Q(p) :- Sold(k), Price(k, p)")?;
    let game = xscore::dbscores::summation_game(&db, &query, "p")?;

    let full = xscore::games::Coalition::full(game.num_players());
    println!("total = {}", game.value(&full)?);
    for (t, v) in shapley_all(&game, DEFAULT_BUDGET)? {
        println!("{:14} {v}", db.fact(&t).unwrap_or_default());
    }
    Ok(())
}
