//! Causal effects by intervening on tuple variables of a lineage.
//!
//! `cargo run --example causal_effect`

use xscore::dbscores::{causal_effect, intervene, lineage_probability, TupleProbabilities};
use xscore::games::DEFAULT_BUDGET;
use xscore::reldb::{compile_lineage, parse_lineage_unchecked, parse_query, Database};

fn main() -> xscore::Result<()> {
    let mut b = Database::builder();
    for row in [["a", "b"], ["a", "c"], ["c", "b"]] {
        b.insert("R", row)?;
    }
    for v in ["b", "c"] {
        b.insert("S", [v])?;
    }
    let db = b.build();
    let query = parse_query("Q() :- R(x, y), S(y)")?;
    let lineage = compile_lineage(&db, &query)?;
    println!("lineage: {lineage}");

    let p = TupleProbabilities::uniform();
    let sb = db.find("S", &["b"]).expect("S(b) is loaded").clone();
    for value in [false, true] {
        let fixed = intervene(&lineage, &sb, value);
        let prob = lineage_probability(&fixed, &p, DEFAULT_BUDGET)?;
        println!("P(Q | do(S(b) = {})) = {prob}", u8::from(value));
    }
    println!(
        "CE(S(b)) = {}",
        causal_effect(&lineage, &sb, &p, DEFAULT_BUDGET)?
    );

    // Lineages can also be given directly over tuple ids.
    let paths = parse_lineage_unchecked("t1 | (t2 & t3) | (t4 & t5 & t6)")?;
    for t in paths.support() {
        println!(
            "CE({t}) = {}",
            causal_effect(&paths, &t, &p, DEFAULT_BUDGET)?
        );
    }
    Ok(())
}
