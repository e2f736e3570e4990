use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{ConjunctiveQuery, Term};

/// Which side of the Shapley dichotomy a query falls on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dichotomy {
    #[serde(rename = "poly-time")]
    PolynomialTime,
    #[serde(rename = "FP^#P-complete")]
    SharpPComplete,
    #[serde(rename = "dichotomy inapplicable: self-joins present")]
    Inapplicable,
}

impl fmt::Display for Dichotomy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dichotomy::PolynomialTime => "poly-time",
            Dichotomy::SharpPComplete => "FP^#P-complete",
            Dichotomy::Inapplicable => "dichotomy inapplicable: self-joins present",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryAnalysis {
    pub hierarchical: bool,
    pub self_join_free: bool,
    /// Atom indices containing each existential variable, keyed by variable name.
    pub atoms_of: BTreeMap<String, Vec<usize>>,
    pub verdict: Dichotomy,
}

/// Structural analysis of `q`; depends on the query text only.
pub fn analyze(q: &ConjunctiveQuery) -> QueryAnalysis {
    let existential: Vec<usize> = q.existential_vars().collect();

    // Bitmask of atoms per variable. Queries with more than 128 atoms are
    // not a realistic input for this tool.
    let masks: Vec<u128> = existential
        .iter()
        .map(|&v| {
            q.atoms()
                .iter()
                .enumerate()
                .filter(|(_, a)| a.terms.contains(&Term::Var(v)))
                .fold(0u128, |m, (i, _)| m | (1 << (i % 128)))
        })
        .collect();

    let hierarchical = masks.iter().enumerate().all(|(i, &a)| {
        masks[i + 1..]
            .iter()
            .all(|&b| a & b == a || a & b == b || a & b == 0)
    });

    let mut names: Vec<&str> = q.atoms().iter().map(|a| a.relation.as_str()).collect();
    names.sort_unstable();
    let self_join_free = names.windows(2).all(|w| w[0] != w[1]);

    let verdict = match (self_join_free, hierarchical) {
        (false, _) => Dichotomy::Inapplicable,
        (true, true) => Dichotomy::PolynomialTime,
        (true, false) => Dichotomy::SharpPComplete,
    };

    let atoms_of = existential
        .iter()
        .zip(&masks)
        .map(|(&v, &m)| {
            (
                q.var_name(v).to_string(),
                (0..q.atoms().len().min(128))
                    .filter(|i| m & (1 << i) != 0)
                    .collect(),
            )
        })
        .collect();

    QueryAnalysis {
        hierarchical,
        self_join_free,
        atoms_of,
        verdict,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reldb::parse_query;

    fn run(text: &str) -> QueryAnalysis {
        analyze(&parse_query(text).unwrap())
    }

    #[test]
    fn hierarchical_example() {
        let a = run("Q() :- R(x,y), S(x,z)");
        assert!(a.hierarchical && a.self_join_free);
        assert_eq!(a.verdict, Dichotomy::PolynomialTime);
        assert_eq!(a.atoms_of["x"], vec![0, 1]);
        assert_eq!(a.atoms_of["y"], vec![0]);
        assert_eq!(a.atoms_of["z"], vec![1]);
    }

    #[test]
    fn non_hierarchical_example() {
        let a = run("Q() :- R(x), S(x,y), T(y)");
        assert!(!a.hierarchical);
        assert_eq!(a.verdict, Dichotomy::SharpPComplete);
        assert_eq!(a.verdict.to_string(), "FP^#P-complete");
    }

    #[test]
    fn single_atom() {
        let a = run("Q() :- R(x)");
        assert!(a.hierarchical && a.self_join_free);
    }

    #[test]
    fn self_join() {
        let a = run("Q() :- R(x,y), R(y,z)");
        assert!(!a.self_join_free);
        assert_eq!(a.verdict, Dichotomy::Inapplicable);
    }

    #[test]
    fn head_variables_are_not_existential() {
        // y is an output variable, so only x is checked.
        let a = run("Q(y) :- R(x), S(x,y), T(y)");
        assert!(a.hierarchical);
        assert!(!a.atoms_of.contains_key("y"));
    }
}
