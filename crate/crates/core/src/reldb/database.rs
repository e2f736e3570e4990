use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Stable identifier of a tuple; the players of tuple-level games.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TupleId(String);

impl TupleId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for TupleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for TupleId {
    fn from(s: &str) -> Self {
        Self::new(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tuple {
    pub id: TupleId,
    pub values: Vec<String>,
    /// Position of `id` in the database's sorted id list.
    pub(crate) ordinal: usize,
}

impl Tuple {
    pub fn ordinal(&self) -> usize {
        self.ordinal
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub name: String,
    pub arity: usize,
    pub tuples: Vec<Tuple>,
}

/// An immutable relational instance with globally unique tuple ids.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Database {
    relations: BTreeMap<String, Relation>,
    ids: Vec<TupleId>,
    locate: HashMap<TupleId, (String, usize)>,
}

impl Database {
    pub fn builder() -> DatabaseBuilder {
        DatabaseBuilder::default()
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.relations.get(name)
    }

    pub fn relations(&self) -> impl Iterator<Item = &Relation> {
        self.relations.values()
    }

    /// All tuple ids in ascending order.
    pub fn ids(&self) -> &[TupleId] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn contains(&self, id: &TupleId) -> bool {
        self.locate.contains_key(id)
    }

    pub fn ordinal(&self, id: &TupleId) -> Option<usize> {
        self.ids.binary_search(id).ok()
    }

    /// The relation name and tuple behind `id`.
    pub fn tuple(&self, id: &TupleId) -> Option<(&str, &Tuple)> {
        let (rel, idx) = self.locate.get(id)?;
        let relation = &self.relations[rel];
        Some((&relation.name, &relation.tuples[*idx]))
    }

    pub fn find(&self, relation: &str, values: &[&str]) -> Option<&TupleId> {
        self.relations
            .get(relation)?
            .tuples
            .iter()
            .find(|t| {
                t.values
                    .iter()
                    .map(String::as_str)
                    .eq(values.iter().copied())
            })
            .map(|t| &t.id)
    }

    /// Human-readable fact, e.g. `R(a,b)`.
    pub fn fact(&self, id: &TupleId) -> Option<String> {
        let (rel, t) = self.tuple(id)?;
        Some(format!("{}({})", rel, t.values.join(",")))
    }

    /// Sub-instance keeping only the tuples accepted by `keep`; ids are preserved.
    pub fn restrict(&self, keep: impl Fn(&TupleId) -> bool) -> Database {
        let mut b = Database::builder();
        for rel in self.relations.values() {
            b.declare(&rel.name, rel.arity)
                .expect("arity is consistent");
            for t in rel.tuples.iter().filter(|t| keep(&t.id)) {
                b.insert_with_id(t.id.clone(), &rel.name, t.values.clone())
                    .expect("restriction of a valid database");
            }
        }
        b.build()
    }
}

#[derive(Debug, Default)]
pub struct DatabaseBuilder {
    relations: BTreeMap<String, Relation>,
    ids: HashSet<TupleId>,
    facts: HashSet<(String, Vec<String>)>,
}

impl DatabaseBuilder {
    /// Declares a relation, possibly empty. Re-declaring with the same arity is a no-op.
    pub fn declare(&mut self, name: &str, arity: usize) -> Result<&mut Self> {
        match self.relations.get(name) {
            Some(r) if r.arity != arity => {
                return Err(Error::ArityMismatch {
                    relation: name.to_string(),
                    expected: r.arity,
                    found: arity,
                })
            }
            Some(_) => {}
            None => {
                self.relations.insert(
                    name.to_string(),
                    Relation {
                        name: name.to_string(),
                        arity,
                        tuples: Vec::new(),
                    },
                );
            }
        }
        Ok(self)
    }

    /// Inserts a tuple with an id of the form `<relation>:<n>`, `n` counting from 1.
    pub fn insert<S: Into<String>>(
        &mut self,
        relation: &str,
        values: impl IntoIterator<Item = S>,
    ) -> Result<TupleId> {
        let next = self.relations.get(relation).map_or(0, |r| r.tuples.len()) + 1;
        self.insert_with_id(TupleId::new(format!("{relation}:{next}")), relation, values)
    }

    pub fn insert_with_id<S: Into<String>>(
        &mut self,
        id: TupleId,
        relation: &str,
        values: impl IntoIterator<Item = S>,
    ) -> Result<TupleId> {
        let values: Vec<String> = values.into_iter().map(Into::into).collect();
        self.declare(relation, values.len())?;
        if self.ids.contains(&id) {
            return Err(Error::DuplicateTupleId(id.to_string()));
        }
        let key = (relation.to_string(), values);
        if self.facts.contains(&key) {
            return Err(Error::DuplicateTuple(format!(
                "{}({})",
                relation,
                key.1.join(",")
            )));
        }
        self.ids.insert(id.clone());
        let values = key.1.clone();
        self.facts.insert(key);
        self.relations
            .get_mut(relation)
            .expect("declared above")
            .tuples
            .push(Tuple {
                id: id.clone(),
                values,
                ordinal: 0,
            });
        Ok(id)
    }

    pub fn build(self) -> Database {
        let mut relations = self.relations;
        let mut ids: Vec<TupleId> = self.ids.into_iter().collect();
        ids.sort();
        let mut locate = HashMap::with_capacity(ids.len());
        for rel in relations.values_mut() {
            for (idx, t) in rel.tuples.iter_mut().enumerate() {
                t.ordinal = ids.binary_search(&t.id).expect("id was registered");
                locate.insert(t.id.clone(), (rel.name.clone(), idx));
            }
        }
        Database {
            relations,
            ids,
            locate,
        }
    }
}
