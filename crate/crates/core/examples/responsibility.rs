//! Actual causes of a Boolean query answer and their responsibilities.
//!
//! `cargo run --example responsibility`

use xscore::dbscores::causes;
use xscore::games::DEFAULT_BUDGET;
use xscore::reldb::{parse_query, Database};

fn main() -> xscore::Result<()> {
    let mut b = Database::builder();
    for row in [["a", "b"], ["c", "d"], ["b", "b"]] {
        b.insert("R", row)?;
    }
    for v in ["a", "c", "b"] {
        b.insert("S", [v])?;
    }
    let db = b.build();
    let query = parse_query("Q() :- S(x), R(x, y), S(y)")?;

    for c in causes(&db, &query, DEFAULT_BUDGET)? {
        let fact = db.fact(&c.tuple).unwrap_or_default();
        let witness = c
            .witness_contingency
            .map(|g| {
                g.iter()
                    .map(|t| db.fact(t).unwrap_or_default())
                    .collect::<Vec<_>>()
                    .join(", ")
            })
            .unwrap_or_else(|| "-".into());
        let role = if c.is_counterfactual_cause {
            "counterfactual"
        } else if c.is_actual_cause {
            "actual"
        } else {
            "not a cause"
        };
        println!(
            "{fact:8} {:>4}  {role:15} contingency {{{witness}}}",
            c.responsibility.to_string()
        );
    }
    Ok(())
}
