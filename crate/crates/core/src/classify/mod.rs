//! Binary entities, classifiers, constraints and distributions over
//! `{0,1}^n`.

mod classifier;
mod constraint;
mod distribution;
mod entity;
mod external;

pub use classifier::{Classifier, FnClassifier, SampleClassifier, TruthTable, LABEL_COLUMN};
pub use constraint::{
    check_satisfiable, parse_constraint, parse_constraints, satisfies, Constraint, Prop,
};
pub use distribution::{conditional_expectation, Distribution, Sample, SAMPLE_LABEL_COLUMN};
pub use entity::{all_entities, Entity, FeatureSpace, WIDTH_CAP};
pub use external::{handshake, serve, ExternalClassifier, HANDSHAKE_PREFIX};
