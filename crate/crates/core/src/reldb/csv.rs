use std::fs::File;
use std::io::Read;
use std::path::PathBuf;

use super::{Database, DatabaseBuilder, TupleId};
use crate::error::{Error, Result};

/// Column holding explicit tuple ids.
pub const ID_COLUMN: &str = "_id";

/// One relation to load: its name, file, and optionally the expected columns.
#[derive(Clone, Debug)]
pub struct CsvSource {
    pub relation: String,
    pub path: PathBuf,
    pub columns: Option<Vec<String>>,
}

impl CsvSource {
    pub fn new(relation: impl Into<String>, path: impl Into<PathBuf>) -> Self {
        Self {
            relation: relation.into(),
            path: path.into(),
            columns: None,
        }
    }

    pub fn with_columns<S: Into<String>>(mut self, cols: impl IntoIterator<Item = S>) -> Self {
        self.columns = Some(cols.into_iter().map(Into::into).collect());
        self
    }
}

/// Loads one CSV file per relation. Tuple ids come from an `_id` column when
/// present, otherwise `<relation>:<row>` with rows counted from 1.
pub fn load_csv(sources: &[CsvSource]) -> Result<Database> {
    let mut builder = Database::builder();
    for src in sources {
        let file = File::open(&src.path).map_err(|source| Error::Io {
            path: src.path.clone(),
            source,
        })?;
        read_relation(&mut builder, src, file)?;
    }
    Ok(builder.build())
}

pub(crate) fn read_relation<R: Read>(
    builder: &mut DatabaseBuilder,
    src: &CsvSource,
    reader: R,
) -> Result<()> {
    let path = &src.path;
    let csv_err = |row: Option<usize>, message: String| Error::Csv {
        path: path.clone(),
        row,
        message,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| csv_err(None, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(csv_err(Some(1), "missing header row".into()));
    }
    let id_col = header.iter().position(|h| h == ID_COLUMN);
    let data_cols: Vec<&String> = header.iter().filter(|h| *h != ID_COLUMN).collect();
    if let Some(expected) = &src.columns {
        if !data_cols
            .iter()
            .map(|s| s.as_str())
            .eq(expected.iter().map(String::as_str))
        {
            return Err(csv_err(
                Some(1),
                format!("header {data_cols:?} does not match schema {expected:?}"),
            ));
        }
    }
    builder.declare(&src.relation, data_cols.len())?;

    for (index, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| csv_err(None, e.to_string()))?;
        let line = record.position().map_or(index + 2, |p| p.line() as usize);
        if record.len() != header.len() {
            return Err(csv_err(
                Some(line),
                format!(
                    "row {line}: expected {} fields, found {}",
                    header.len(),
                    record.len()
                ),
            ));
        }
        let values: Vec<&str> = record
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != id_col)
            .map(|(_, v)| v)
            .collect();
        let inserted = match id_col {
            Some(i) => builder.insert_with_id(TupleId::new(&record[i]), &src.relation, values),
            None => builder.insert(&src.relation, values),
        };
        inserted.map_err(|e| match e {
            Error::DuplicateTupleId(_) | Error::DuplicateTuple(_) => {
                csv_err(Some(line), format!("row {line}: {e}"))
            }
            other => other,
        })?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load_str(relation: &str, text: &str) -> Result<Database> {
        let mut b = Database::builder();
        read_relation(
            &mut b,
            &CsvSource::new(relation, "mem.csv"),
            text.as_bytes(),
        )?;
        Ok(b.build())
    }

    #[test]
    fn auto_ids() {
        let db = load_str("R", "A,B\na,b\nc,d\n").unwrap();
        assert_eq!(db.fact(&"R:2".into()).unwrap(), "R(c,d)");
    }

    #[test]
    fn explicit_ids() {
        let db = load_str("E", "_id,X,Y\nt1,a,b\nt2,a,c\n").unwrap();
        assert_eq!(db.fact(&"t2".into()).unwrap(), "E(a,c)");
        let err = load_str("E", "_id,X,Y\nt1,a,b\nt1,a,c\n").unwrap_err();
        assert!(matches!(err, Error::Csv { row: Some(3), .. }), "{err}");
    }

    #[test]
    fn empty_relation() {
        let db = load_str("S", "A\n").unwrap();
        assert_eq!(db.relation("S").unwrap().arity, 1);
        assert!(db.is_empty());
    }

    #[test]
    fn wrong_column_count_names_row() {
        let err = load_str("R", "A,B\na,b\nc\n").unwrap_err();
        match err {
            Error::Csv { row, message, .. } => {
                assert_eq!(row, Some(3));
                assert!(message.contains("row 3"));
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn schema_mismatch() {
        let mut b = Database::builder();
        let src = CsvSource::new("R", "mem.csv").with_columns(["A", "C"]);
        assert!(read_relation(&mut b, &src, "A,B\n".as_bytes()).is_err());
    }
}
