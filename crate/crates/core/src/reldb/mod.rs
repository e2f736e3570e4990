//! Relational instances, Boolean conjunctive queries and their lineage.

mod analysis;
mod csv;
mod database;
mod eval;
mod lineage;
mod query;

pub use analysis::{analyze, Dichotomy, QueryAnalysis};
pub use csv::{load_csv, CsvSource, ID_COLUMN};
pub use database::{Database, DatabaseBuilder, Relation, Tuple, TupleId};
pub use eval::{answers, answers_within, evaluate, evaluate_within, validate};
pub use lineage::{
    compile_lineage, parse_lineage, parse_lineage_unchecked, Formula, IndexedLineage, Lineage,
    Provenance,
};
pub use query::{parse_query, Atom, ConjunctiveQuery, Term};
