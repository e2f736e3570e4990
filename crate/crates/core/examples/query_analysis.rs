//! Hierarchy test and Shapley complexity verdict for conjunctive queries.
//!
//! `cargo run --example query_analysis -- "Q() :- R(x), S(x, y)"`

use xscore::reldb::{analyze, parse_query};

fn main() -> xscore::Result<()> {
    let mut queries: Vec<String> = std::env::args().skip(1).collect();
    if queries.is_empty() {
        queries = vec![
            "Q() :- R(x, y), S(x, z)".into(),
            "Q() :- R(x), S(x, y), T(y)".into(),
            "Q() :- R(x, y), R(y, z)".into(),
        ];
    }
    for text in &queries {
        let a = analyze(&parse_query(text)?);
        println!("{text}");
        for (var, atoms) in &a.atoms_of {
            println!("  atoms({var}) = {atoms:?}");
        }
        println!(
            "  hierarchical: {}, self-join free: {}",
            a.hierarchical, a.self_join_free
        );
        println!("  verdict: {}", a.verdict);
    }
    Ok(())
}
