//! Independent oracles and generators shared by the integration tests and
//! the acceptance harness. Nothing here calls the library's scoring code.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use xscore::reldb::{evaluate, parse_query, ConjunctiveQuery, Database, Term, TupleId};

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(rel)
}

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * BigInt::from(k))
}

/// Shapley values by averaging marginals over all `n!` player orders.
pub fn permutation_shapley(n: usize, v: impl Fn(u64) -> BigRational) -> Vec<BigRational> {
    let mut sums = vec![BigRational::zero(); n];
    for order in (0..n).permutations(n) {
        let mut mask = 0u64;
        let mut before = v(0);
        for p in order {
            mask |= 1 << p;
            let after = v(mask);
            sums[p] += &after - &before;
            before = after;
        }
    }
    let total = BigRational::from_integer(factorial(n));
    sums.into_iter().map(|s| s / &total).collect()
}

/// Banzhaf values straight from the definition.
pub fn subset_banzhaf(n: usize, v: impl Fn(u64) -> BigRational) -> Vec<BigRational> {
    (0..n)
        .map(|p| {
            let bit = 1u64 << p;
            let sum: BigRational = (0..1u64 << n)
                .filter(|m| m & bit == 0)
                .map(|m| v(m | bit) - v(m))
                .sum();
            sum / BigRational::from_integer(BigInt::one() << (n - 1))
        })
        .collect()
}

/// Whether the query holds on the sub-instance whose tuples are selected
/// by `mask` over `db.ids()`.
pub fn holds_on(db: &Database, query: &ConjunctiveQuery, mask: u64) -> bool {
    let ids = db.ids();
    let keep: BTreeSet<&TupleId> = (0..ids.len())
        .filter(|&i| mask & (1 << i) != 0)
        .map(|i| &ids[i])
        .collect();
    evaluate(&db.restrict(|t| keep.contains(t)), query).unwrap()
}

/// Responsibility of every tuple by brute force over contingency sets:
/// the smallest `G` with `D - G` satisfying the query and `D - G - t` not.
pub fn brute_responsibility(db: &Database, query: &ConjunctiveQuery) -> Vec<BigRational> {
    let n = db.len();
    let full = (1u64 << n) - 1;
    (0..n)
        .map(|t| {
            let best = (0..1u64 << n)
                .filter(|g| g & (1 << t) == 0)
                .filter(|&g| {
                    holds_on(db, query, full & !g) && !holds_on(db, query, full & !g & !(1 << t))
                })
                .map(|g| g.count_ones())
                .min();
            best.map_or_else(BigRational::zero, |k| q(1, 1 + i64::from(k)))
        })
        .collect()
}

/// The hierarchy test as stated: for every pair of existential variables,
/// their atom sets are nested or disjoint.
pub fn hierarchical_by_definition(query: &ConjunctiveQuery) -> bool {
    let head: BTreeSet<usize> = query.head().iter().copied().collect();
    let mut atoms: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for (i, a) in query.atoms().iter().enumerate() {
        for t in &a.terms {
            if let Term::Var(v) = t {
                if !head.contains(v) {
                    atoms.entry(*v).or_default().insert(i);
                }
            }
        }
    }
    let sets: Vec<&BTreeSet<usize>> = atoms.values().collect();
    sets.iter()
        .tuple_combinations()
        .all(|(a, b)| a.is_subset(b) || b.is_subset(a) || a.is_disjoint(b))
}

pub fn has_self_join(query: &ConjunctiveQuery) -> bool {
    let rels: Vec<&str> = query.atoms().iter().map(|a| a.relation.as_str()).collect();
    rels.iter().unique().count() != rels.len()
}

const DOMAIN: [&str; 3] = ["a", "b", "c"];
const SCHEMA: [(&str, usize); 3] = [("R", 2), ("S", 1), ("T", 2)];

/// A random instance over relations R/2, S/1, T/2 with at most `max` tuples.
pub fn random_database<G: Rng>(rng: &mut G, max: usize) -> Database {
    let mut b = Database::builder();
    for (rel, arity) in SCHEMA {
        b.declare(rel, arity).unwrap();
    }
    let target = rng.gen_range(1..=max);
    let mut seen = BTreeSet::new();
    while seen.len() < target {
        let (rel, arity) = SCHEMA[rng.gen_range(0..SCHEMA.len())];
        let vals: Vec<&str> = (0..arity).map(|_| DOMAIN[rng.gen_range(0..3)]).collect();
        if seen.insert((rel, vals.clone())) {
            b.insert(rel, vals).unwrap();
        }
    }
    b.build()
}

/// A random Boolean query with `1..=max_atoms` atoms. Without `self_joins`
/// every atom uses a different relation.
pub fn random_query<G: Rng>(rng: &mut G, max_atoms: usize, self_joins: bool) -> ConjunctiveQuery {
    let k = rng.gen_range(1..=max_atoms.min(if self_joins { 6 } else { SCHEMA.len() }));
    let mut rels: Vec<(&str, usize)> = if self_joins {
        (0..k)
            .map(|_| SCHEMA[rng.gen_range(0..SCHEMA.len())])
            .collect()
    } else {
        let mut all = SCHEMA.to_vec();
        for i in (1..all.len()).rev() {
            all.swap(i, rng.gen_range(0..=i));
        }
        all.truncate(k);
        all
    };
    rels.truncate(k);
    let atoms: Vec<String> = rels
        .iter()
        .map(|(rel, arity)| {
            let terms: Vec<String> = (0..*arity)
                .map(|_| {
                    if rng.gen_bool(0.15) {
                        format!("\"{}\"", DOMAIN[rng.gen_range(0..3)])
                    } else {
                        ["x", "y", "z", "w"][rng.gen_range(0..4)].to_string()
                    }
                })
                .collect();
            format!("{rel}({})", terms.join(", "))
        })
        .collect();
    parse_query(&format!("Q() :- {}", atoms.join(", "))).unwrap()
}

/// Bit `i` of `bits` as feature `i`; labels are indexed by the entity bits.
fn agrees(a: u64, b: u64, mask: u64) -> bool {
    (a ^ b) & mask == 0
}

/// `E(L | e'_S = e_S)` computed straight from the entity masses.
/// `None` when the event has probability zero.
pub fn expectation_from_masses(
    masses: &[BigRational],
    labels: &[bool],
    e: u64,
    fixed: u64,
) -> Option<BigRational> {
    let (mut hit, mut total) = (BigRational::zero(), BigRational::zero());
    for (bits, p) in masses.iter().enumerate() {
        if agrees(bits as u64, e, fixed) {
            total += p;
            if labels[bits] {
                hit += p;
            }
        }
    }
    (!total.is_zero()).then(|| hit / total)
}

/// SHAP values of every feature by the permutation average over the
/// feature game `S -> E(L | e_S)`.
pub fn permutation_shap(
    masses: &[BigRational],
    labels: &[bool],
    n: usize,
    e: u64,
) -> Vec<BigRational> {
    permutation_shapley(n, |s| {
        expectation_from_masses(masses, labels, e, s).expect("positive mass")
    })
}

/// RESP by scanning every entity that changes feature `x`: the score is
/// `1 / (1 + k)` for the fewest other changed features `k` reaching label 0.
/// With `strict`, undoing the change of `x` must keep the label at 1.
pub fn brute_resp(labels: &[bool], n: usize, e: u64, x: usize, strict: bool) -> BigRational {
    let bit = 1u64 << x;
    (0..1u64 << n)
        .filter(|v| (v ^ e) & bit != 0)
        .filter(|&v| !labels[v as usize])
        .filter(|&v| !strict || labels[(v ^ bit) as usize])
        .map(|v| ((v ^ e) & !bit).count_ones())
        .min()
        .map_or_else(BigRational::zero, |k| q(1, 1 + i64::from(k)))
}

pub fn random_labels<G: Rng>(rng: &mut G, n: usize) -> Vec<bool> {
    (0..1usize << n).map(|_| rng.gen_bool(0.5)).collect()
}
