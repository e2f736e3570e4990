use std::collections::BTreeSet;
use std::fs::File;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use super::classifier::{read_binary_csv, Classifier};
use super::constraint::{check_satisfiable, satisfies, Constraint};
use super::entity::{check_cap, check_width, Entity, FeatureSpace};
use crate::error::{Error, Result};
use crate::rational::{int, pow2};

/// Optional label column in sample files.
pub const SAMPLE_LABEL_COLUMN: &str = "_label";

/// A probability distribution over `{0,1}^n`.
#[derive(Clone, Debug, PartialEq)]
pub enum Distribution {
    Uniform {
        width: usize,
    },
    /// Mass `1/|S|` on each sample member.
    Empirical {
        width: usize,
        sample: BTreeSet<Entity>,
    },
    /// Independent features; `marginals[i]` is `P(F_i = 1)`.
    Product {
        marginals: Vec<BigRational>,
    },
    /// `base` restricted to the entities satisfying every constraint;
    /// `mass` is the base probability of that set.
    Conditioned {
        base: Box<Distribution>,
        constraints: Vec<Constraint>,
        mass: BigRational,
    },
}

impl Distribution {
    pub fn uniform(width: usize) -> Self {
        Distribution::Uniform { width }
    }

    /// Uniform over a finite sample. Repeated entities are an error unless
    /// `dedupe` is set, in which case they are counted once.
    pub fn empirical(entities: impl IntoIterator<Item = Entity>, dedupe: bool) -> Result<Self> {
        let mut sample = BTreeSet::new();
        let mut width = None;
        for e in entities {
            match width {
                None => width = Some(e.width()),
                Some(w) => check_width(w, &e)?,
            }
            if !sample.insert(e) && !dedupe {
                return Err(Error::InvalidParameter(format!(
                    "entity {e} occurs more than once in the sample"
                )));
            }
        }
        let width = width.ok_or_else(|| Error::InvalidParameter("empty sample".into()))?;
        Ok(Distribution::Empirical { width, sample })
    }

    pub fn product(marginals: Vec<BigRational>) -> Result<Self> {
        if marginals.is_empty() {
            return Err(Error::InvalidParameter("no marginals".into()));
        }
        if let Some(p) = marginals
            .iter()
            .find(|p| **p < BigRational::zero() || **p > BigRational::one())
        {
            return Err(Error::InvalidParameter(format!(
                "marginal {p} outside [0, 1]"
            )));
        }
        Ok(Distribution::Product { marginals })
    }

    /// Product of the per-feature frequencies observed in `sample`.
    pub fn product_from_sample(sample: &[Entity]) -> Result<Self> {
        let first = sample
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty sample".into()))?;
        let width = first.width();
        let n = BigInt::from(sample.len());
        let mut ones = vec![0i64; width];
        for e in sample {
            check_width(width, e)?;
            for (i, c) in ones.iter_mut().enumerate() {
                *c += i64::from(e.get(i));
            }
        }
        Self::product(
            ones.into_iter()
                .map(|c| BigRational::new(BigInt::from(c), n.clone()))
                .collect(),
        )
    }

    pub fn width(&self) -> usize {
        match self {
            Distribution::Uniform { width } | Distribution::Empirical { width, .. } => *width,
            Distribution::Product { marginals } => marginals.len(),
            Distribution::Conditioned { base, .. } => base.width(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Distribution::Uniform { .. } => "uniform",
            Distribution::Empirical { .. } => "empirical",
            Distribution::Product { .. } => "product",
            Distribution::Conditioned { .. } => "conditioned",
        }
    }

    pub fn prob(&self, e: &Entity) -> Result<BigRational> {
        check_width(self.width(), e)?;
        Ok(self.weight(e))
    }

    fn weight(&self, e: &Entity) -> BigRational {
        match self {
            Distribution::Uniform { width } => BigRational::one() / pow2(*width),
            Distribution::Empirical { sample, .. } => {
                if sample.contains(e) {
                    BigRational::new(BigInt::one(), BigInt::from(sample.len()))
                } else {
                    BigRational::zero()
                }
            }
            Distribution::Product { marginals } => {
                marginals
                    .iter()
                    .enumerate()
                    .fold(BigRational::one(), |acc, (i, p)| {
                        if e.get(i) {
                            acc * p
                        } else {
                            acc * (BigRational::one() - p)
                        }
                    })
            }
            Distribution::Conditioned {
                base,
                constraints,
                mass,
            } => {
                if satisfies(e, constraints) {
                    base.weight(e) / mass
                } else {
                    BigRational::zero()
                }
            }
        }
    }

    /// Entities with positive probability that agree with `e` on `fixed`,
    /// paired with their probability.
    fn event(&self, e: &Entity, fixed: u64) -> Result<Vec<(Entity, BigRational)>> {
        match self {
            Distribution::Empirical { sample, .. } => Ok(sample
                .iter()
                .filter(|s| s.agrees_on(e, fixed))
                .map(|s| (*s, self.weight(s)))
                .collect()),
            Distribution::Conditioned {
                base, constraints, ..
            } => Ok(base
                .event(e, fixed)?
                .into_iter()
                .filter(|(s, _)| satisfies(s, constraints))
                .map(|(s, _)| (s, self.weight(&s)))
                .collect()),
            Distribution::Uniform { .. } | Distribution::Product { .. } => {
                let points: Vec<Entity> = completions(e, fixed)?.collect();
                Ok(points
                    .into_par_iter()
                    .map(|s| (s, self.weight(&s)))
                    .filter(|(_, w)| !w.is_zero())
                    .collect())
            }
        }
    }

    /// Every entity with positive probability, with that probability.
    pub fn support(&self) -> Result<Vec<(Entity, BigRational)>> {
        let width = self.width();
        self.event(&Entity::new(0, width)?, 0)
    }

    /// Probability of each of the `2^n` entities, in counting order.
    pub fn masses(&self) -> Result<Vec<BigRational>> {
        let width = self.width();
        check_cap(width)?;
        (0..1u64 << width)
            .map(|bits| self.prob(&Entity::new(bits, width)?))
            .collect()
    }

    /// Restricts to the entities satisfying all of `theta` and renormalizes.
    pub fn condition(&self, theta: &[Constraint]) -> Result<Self> {
        if theta.is_empty() {
            return Ok(self.clone());
        }
        check_satisfiable(theta, self.width())?;
        let mass: BigRational = self
            .support()?
            .into_iter()
            .filter(|(e, _)| satisfies(e, theta))
            .map(|(_, w)| w)
            .sum();
        if mass.is_zero() {
            return Err(Error::InconsistentConstraint(
                "the constraints leave no probability mass".into(),
            ));
        }
        Ok(Distribution::Conditioned {
            base: Box::new(self.clone()),
            constraints: theta.to_vec(),
            mass,
        })
    }
}

/// All entities agreeing with `e` on `fixed`.
fn completions(e: &Entity, fixed: u64) -> Result<impl Iterator<Item = Entity>> {
    let width = e.width();
    let full = if width == 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    };
    let free = full & !fixed;
    check_cap(free.count_ones() as usize)?;
    let base = e.bits() & fixed;
    // Walk the submasks of `free` in increasing order.
    let mut next = Some(0u64);
    Ok(std::iter::from_fn(move || {
        let sub = next?;
        next = if sub == free {
            None
        } else {
            Some((sub | !free).wrapping_add(1) & free)
        };
        Some(Entity::new(base | sub, width).expect("bits within width"))
    }))
}

/// `E(L(e') | e'_S = e_S)` under `d`, where `S` is the feature mask `fixed`.
///
/// Fails with [`Error::ZeroMass`] when the conditioning event has probability 0.
pub fn conditional_expectation(
    d: &Distribution,
    c: &dyn Classifier,
    e: &Entity,
    fixed: u64,
) -> Result<BigRational> {
    check_width(d.width(), e)?;
    check_width(c.width(), e)?;
    if let Distribution::Uniform { .. } = d {
        return uniform_expectation(c, e, fixed);
    }
    weighted_expectation(d, c, e, fixed)
}

/// Counting path: the mean label over all completions.
fn uniform_expectation(c: &dyn Classifier, e: &Entity, fixed: u64) -> Result<BigRational> {
    let points: Vec<Entity> = completions(e, fixed)?.collect();
    let total = points.len();
    let hits = points
        .into_par_iter()
        .map(|s| c.label(&s).map(usize::from))
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(int(hits as i64) / int(total as i64))
}

fn weighted_expectation(
    d: &Distribution,
    c: &dyn Classifier,
    e: &Entity,
    fixed: u64,
) -> Result<BigRational> {
    let event = d.event(e, fixed)?;
    let mass: BigRational = event.iter().map(|(_, w)| w).sum();
    if mass.is_zero() {
        return Err(Error::ZeroMass(format!(
            "no probability on entities agreeing with {e} on mask {fixed:#b}"
        )));
    }
    let hit: BigRational = event
        .par_iter()
        .map(|(s, w)| {
            Ok(if c.label(s)? {
                w.clone()
            } else {
                BigRational::zero()
            })
        })
        .try_reduce(BigRational::zero, |a, b| Ok(a + b))?;
    Ok(hit / mass)
}

/// Entities read from a sample file, with labels when the file has a
/// `_label` column.
#[derive(Clone, Debug)]
pub struct Sample {
    pub space: FeatureSpace,
    pub entities: Vec<Entity>,
    pub labels: Option<Vec<bool>>,
}

impl Sample {
    /// Reads a 0/1 CSV. When `space` is given, the columns are matched to it
    /// by name and may come in any order.
    pub fn read_csv(path: &Path, space: Option<&FeatureSpace>) -> Result<Self> {
        let file = File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let raw = read_binary_csv(file, path, SAMPLE_LABEL_COLUMN)?;
        let Some(space) = space else {
            return Ok(Self {
                space: raw.space,
                entities: raw.rows,
                labels: raw.labels,
            });
        };
        if raw.space.width() != space.width() {
            return Err(raw.error(
                Some(1),
                format!(
                    "{} feature columns, expected {}",
                    raw.space.width(),
                    space.width()
                ),
            ));
        }
        let to_space = raw
            .space
            .names()
            .iter()
            .map(|n| space.index_of(n))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| raw.error(Some(1), e.to_string()))?;
        let entities = raw
            .rows
            .iter()
            .map(|r| {
                let bits = (0..r.width())
                    .filter(|&i| r.get(i))
                    .fold(0u64, |m, i| m | 1 << to_space[i]);
                Entity::new(bits, space.width())
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            space: space.clone(),
            entities,
            labels: raw.labels,
        })
    }
}
