use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use super::entity::{all_entities, check_cap, check_width, Entity, FeatureSpace};
use crate::error::{Error, Result};

/// Column holding the label in truth-table files.
pub const LABEL_COLUMN: &str = "label";

/// A binary classifier over entities of a fixed width.
///
/// Exact scores assume determinism: the same entity always gets the same label.
pub trait Classifier: Sync {
    fn width(&self) -> usize;

    fn label(&self, e: &Entity) -> Result<bool>;
}

impl<C: Classifier + ?Sized> Classifier for &C {
    fn width(&self) -> usize {
        (**self).width()
    }

    fn label(&self, e: &Entity) -> Result<bool> {
        (**self).label(e)
    }
}

type LabelFn = dyn Fn(&Entity) -> bool + Send + Sync;

pub struct FnClassifier {
    width: usize,
    f: Box<LabelFn>,
}

impl FnClassifier {
    pub fn new<F>(width: usize, f: F) -> Self
    where
        F: Fn(&Entity) -> bool + Send + Sync + 'static,
    {
        Self {
            width,
            f: Box::new(f),
        }
    }

    pub fn constant(width: usize, label: bool) -> Self {
        Self::new(width, move |_| label)
    }
}

impl Classifier for FnClassifier {
    fn width(&self) -> usize {
        self.width
    }

    fn label(&self, e: &Entity) -> Result<bool> {
        check_width(self.width, e)?;
        Ok((self.f)(e))
    }
}

/// A total classifier given by one label per entity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruthTable {
    space: FeatureSpace,
    labels: Vec<bool>,
}

impl TruthTable {
    /// `labels[e.bits()]` is the label of `e`.
    pub fn new(space: FeatureSpace, labels: Vec<bool>) -> Result<Self> {
        check_cap(space.width())?;
        if labels.len() != 1 << space.width() {
            return Err(Error::TruthTable(format!(
                "{} labels for {} entities",
                labels.len(),
                1u64 << space.width()
            )));
        }
        Ok(Self { space, labels })
    }

    /// Tabulates any classifier over the full entity space.
    pub fn tabulate(space: FeatureSpace, c: &dyn Classifier) -> Result<Self> {
        let labels = all_entities(space.width())?
            .map(|e| c.label(&e))
            .collect::<Result<_>>()?;
        Self::new(space, labels)
    }

    pub fn space(&self) -> &FeatureSpace {
        &self.space
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_reader(file, path)
    }

    /// Reads feature columns plus a `label` column; every one of the `2^n`
    /// rows must appear exactly once.
    pub fn from_reader<R: Read>(reader: R, path: &Path) -> Result<Self> {
        let table = read_binary_csv(reader, path, LABEL_COLUMN)?;
        let Some(labels) = table.labels.clone() else {
            return Err(table.error(None, format!("missing `{LABEL_COLUMN}` column")));
        };
        check_cap(table.space.width())?;
        let mut slots: Vec<Option<bool>> = vec![None; 1 << table.space.width()];
        for (row, (e, l)) in table.rows.iter().zip(&labels).enumerate() {
            let slot = &mut slots[e.bits() as usize];
            if slot.is_some() {
                return Err(table.error(Some(row + 2), format!("entity {e} listed twice")));
            }
            *slot = Some(*l);
        }
        if let Some(missing) = slots.iter().position(Option::is_none) {
            let e = Entity::new(missing as u64, table.space.width())?;
            return Err(table.error(None, format!("no row for entity {e}")));
        }
        Self::new(table.space, slots.into_iter().flatten().collect())
    }

    pub fn write_csv<W: Write>(&self, w: W) -> std::io::Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        let mut header: Vec<&str> = self.space.names().iter().map(String::as_str).collect();
        header.push(LABEL_COLUMN);
        wtr.write_record(&header)?;
        for (bits, &l) in self.labels.iter().enumerate() {
            let e = Entity {
                bits: bits as u64,
                width: self.space.width(),
            };
            let mut row: Vec<&str> = (0..e.width())
                .map(|i| if e.get(i) { "1" } else { "0" })
                .collect();
            row.push(if l { "1" } else { "0" });
            wtr.write_record(&row)?;
        }
        wtr.flush()
    }
}

impl Classifier for TruthTable {
    fn width(&self) -> usize {
        self.space.width()
    }

    fn label(&self, e: &Entity) -> Result<bool> {
        self.space.check(e)?;
        Ok(self.labels[e.bits() as usize])
    }
}

/// A labelled sample used as a partial classifier: entities outside the
/// sample have no label.
#[derive(Clone, Debug)]
pub struct SampleClassifier {
    width: usize,
    labels: BTreeMap<Entity, bool>,
}

impl SampleClassifier {
    pub fn new(width: usize, labelled: impl IntoIterator<Item = (Entity, bool)>) -> Result<Self> {
        let mut labels = BTreeMap::new();
        for (e, l) in labelled {
            check_width(width, &e)?;
            if labels.insert(e, l).is_some_and(|old| old != l) {
                return Err(Error::InvalidParameter(format!(
                    "entity {e} carries both labels in the sample"
                )));
            }
        }
        Ok(Self { width, labels })
    }
}

impl Classifier for SampleClassifier {
    fn width(&self) -> usize {
        self.width
    }

    fn label(&self, e: &Entity) -> Result<bool> {
        check_width(self.width, e)?;
        self.labels
            .get(e)
            .copied()
            .ok_or_else(|| Error::Protocol(format!("entity {e} is not in the labelled sample")))
    }
}

/// Rows of a 0/1 CSV file, with an optional label column split off.
pub(crate) struct BinaryCsv {
    pub path: PathBuf,
    pub space: FeatureSpace,
    pub rows: Vec<Entity>,
    pub labels: Option<Vec<bool>>,
}

impl BinaryCsv {
    pub fn error(&self, row: Option<usize>, message: String) -> Error {
        Error::Csv {
            path: self.path.clone(),
            row,
            message,
        }
    }
}

fn bit(text: &str) -> Option<bool> {
    match text {
        "0" => Some(false),
        "1" => Some(true),
        _ => None,
    }
}

pub(crate) fn read_binary_csv<R: Read>(
    reader: R,
    path: &Path,
    label_column: &str,
) -> Result<BinaryCsv> {
    let csv_err = |row: Option<usize>, message: String| Error::Csv {
        path: path.to_path_buf(),
        row,
        message,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| csv_err(None, e.to_string()))?
        .clone();
    let label_at = header.iter().position(|h| h == label_column);
    let names: Vec<&str> = header
        .iter()
        .enumerate()
        .filter(|&(i, _)| Some(i) != label_at)
        .map(|(_, h)| h)
        .collect();
    let space = FeatureSpace::new(names).map_err(|e| csv_err(Some(1), e.to_string()))?;

    let mut rows = Vec::new();
    let mut labels = label_at.map(|_| Vec::new());
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| csv_err(Some(line), e.to_string()))?;
        let mut values = Vec::with_capacity(space.width());
        for (j, field) in rec.iter().enumerate() {
            let v = bit(field).ok_or_else(|| {
                csv_err(
                    Some(line),
                    format!("`{field}` in column {} is not 0 or 1", j + 1),
                )
            })?;
            if Some(j) == label_at {
                labels.as_mut().expect("label column present").push(v);
            } else {
                values.push(v);
            }
        }
        rows.push(Entity::from_values(&values)?);
    }
    Ok(BinaryCsv {
        path: path.to_path_buf(),
        space,
        rows,
        labels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const EX6: &str = "F1,F2,F3,label\n\
        0,1,1,1\n1,1,1,1\n1,1,0,1\n1,0,1,0\n1,0,0,1\n0,1,0,1\n0,0,1,0\n0,0,0,0\n";

    fn ex6() -> TruthTable {
        TruthTable::from_reader(EX6.as_bytes(), Path::new("ex6.csv")).unwrap()
    }

    #[test]
    fn truth_table_rows() {
        let t = ex6();
        assert!(t.label(&Entity::parse("011").unwrap()).unwrap());
        assert!(!t.label(&Entity::parse("001").unwrap()).unwrap());
        assert!(t.label(&Entity::parse("01").unwrap()).is_err());
    }

    #[test]
    fn truth_table_round_trips_through_csv() {
        let t = ex6();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(
            TruthTable::from_reader(&buf[..], Path::new("x")).unwrap(),
            t
        );
    }

    #[test]
    fn incomplete_or_repeated_tables_fail() {
        let short = "F1,F2,F3,label\n0,1,1,1\n";
        assert!(TruthTable::from_reader(short.as_bytes(), Path::new("x")).is_err());
        let twice = format!("{EX6}0,0,0,1\n");
        assert!(TruthTable::from_reader(twice.as_bytes(), Path::new("x")).is_err());
        let bad = "F1,label\n0,1\n2,0\n";
        assert!(matches!(
            TruthTable::from_reader(bad.as_bytes(), Path::new("x")),
            Err(Error::Csv { row: Some(3), .. })
        ));
    }

    #[test]
    fn constant_and_sample_classifiers() {
        let zero = FnClassifier::constant(3, false);
        for e in all_entities(3).unwrap() {
            assert!(!zero.label(&e).unwrap());
        }
        let e = Entity::parse("10").unwrap();
        let s = SampleClassifier::new(2, [(e, true)]).unwrap();
        assert!(s.label(&e).unwrap());
        assert!(matches!(s.label(&e.flip(0)), Err(Error::Protocol(_))));
        assert!(SampleClassifier::new(2, [(e, true), (e, false)]).is_err());
    }
}
