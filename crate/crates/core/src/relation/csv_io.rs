//! CSV ingestion and export, one file per relation.
//!
//! Each file is named `<relation>.csv`, starts with a header of attribute
//! names and may carry a leading `#tid` column with explicit tuple ids.

use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use super::instance::{Instance, RawRow};
use super::schema::{RelId, RelationSchema, Schema};
use crate::error::{Error, Result};

pub const TID_COLUMN: &str = "#tid";

/// Reads rows for `rel` from CSV text. Header columns may appear in any order.
pub fn read_rows<R: Read>(rel: &RelationSchema, reader: R, path: &Path) -> Result<Vec<RawRow>> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let headers = rdr.headers().map_err(csv_err)?.clone();

    let mut tid_col = None;
    let mut order = vec![None; rel.arity()];
    for (i, h) in headers.iter().enumerate() {
        let h = h.trim();
        if h == TID_COLUMN {
            tid_col = Some(i);
            continue;
        }
        let a = rel.attr_index(h).ok_or_else(|| {
            Error::Schema(format!(
                "{}: column {h:?} is not an attribute of {}",
                path.display(),
                rel.name
            ))
        })?;
        if order[a].replace(i).is_some() {
            return Err(Error::Schema(format!(
                "{}: duplicate column {h:?}",
                path.display()
            )));
        }
    }
    if let Some(missing) = order.iter().position(Option::is_none) {
        return Err(Error::Schema(format!(
            "{}: missing column {}",
            path.display(),
            rel.attributes[missing].name
        )));
    }

    let width = headers.len();
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let rowno = i + 1;
        if rec.len() != width {
            return Err(Error::Arity {
                relation: rel.name.clone(),
                row: rowno,
                expected: rel.arity(),
                found: rec.len() - usize::from(tid_col.is_some() && !rec.is_empty()),
            });
        }
        let tid = match tid_col {
            Some(c) => {
                let raw = rec[c].trim();
                Some(raw.parse::<u64>().map_err(|_| Error::Domain {
                    relation: rel.name.clone(),
                    row: rowno,
                    msg: format!("tuple id {raw:?} is not a non-negative integer"),
                })?)
            }
            None => None,
        };
        let values = order
            .iter()
            .map(|c| rec[c.expect("checked above")].to_string())
            .collect();
        rows.push(RawRow { tid, values });
    }
    Ok(rows)
}

/// Loads `<dir>/<R>.csv` for every relation `R` of the schema. A missing file
/// stands for an empty relation.
pub fn load_dir(schema: Arc<Schema>, dir: &Path) -> Result<Instance> {
    let mut staged = Vec::new();
    for rel in schema.relations() {
        let path = dir.join(format!("{}.csv", rel.name));
        let rows = if path.exists() {
            let f = std::fs::File::open(&path).map_err(|e| Error::io(&path, e))?;
            read_rows(rel, f, &path)?
        } else {
            Vec::new()
        };
        staged.push((rel.name.clone(), rows));
    }
    Instance::load(
        schema.clone(),
        staged.iter().map(|(n, r)| (n.as_str(), r.clone())),
    )
}

/// Writes one relation as CSV with a leading `#tid` column.
pub fn write_relation<W: Write>(inst: &Instance, rel: RelId, w: W) -> Result<()> {
    let to_err = |source| Error::Csv {
        path: inst.schema().rel_name(rel).into(),
        source,
    };
    let mut wtr = csv::Writer::from_writer(w);
    let rschema = inst.schema().relation(rel);
    let mut header = vec![TID_COLUMN.to_string()];
    header.extend(rschema.attributes.iter().map(|a| a.name.clone()));
    wtr.write_record(&header).map_err(to_err)?;
    for (tid, vals) in inst.tuples(rel) {
        let mut rec = vec![tid.to_string()];
        rec.extend(vals.iter().map(|v| v.to_string()));
        wtr.write_record(&rec).map_err(to_err)?;
    }
    wtr.flush()
        .map_err(|e| Error::io(inst.schema().rel_name(rel), e))
}

/// Writes every relation of `inst` into `dir` as `<R>.csv`.
pub fn write_dir(inst: &Instance, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for rel in 0..inst.schema().relations().len() {
        let path = dir.join(format!("{}.csv", inst.schema().rel_name(rel)));
        let f = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        write_relation(inst, rel, f)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relation::Tid;

    fn schema() -> Arc<Schema> {
        Arc::new(Schema::parse("relation R(A, B:int)", "s").unwrap())
    }

    #[test]
    fn header_order_and_tid_column() {
        let s = schema();
        let text = "B,#tid,A\n 3,7,x\n4,9,y\n";
        let rows = read_rows(s.relation(0), text.as_bytes(), Path::new("R.csv")).unwrap();
        assert_eq!(rows[0], RawRow::with_tid(7, ["x", " 3"]));
        let d = Instance::load(s, [("R", rows)]).unwrap();
        assert_eq!(d.tuple(0, Tid(7)).unwrap()[1].to_string(), "3");
    }

    #[test]
    fn ragged_row_is_an_arity_error() {
        let s = schema();
        let e = read_rows(s.relation(0), "A,B\nx,1\ny,2,3\n".as_bytes(), Path::new("R.csv"))
            .unwrap_err();
        assert!(matches!(e, Error::Arity { row: 2, .. }), "{e}");
    }

    #[test]
    fn unknown_column_is_rejected() {
        let s = schema();
        assert!(read_rows(s.relation(0), "A,C\nx,1\n".as_bytes(), Path::new("R.csv")).is_err());
        assert!(read_rows(s.relation(0), "A\nx\n".as_bytes(), Path::new("R.csv")).is_err());
    }

    #[test]
    fn write_then_read_round_trips() {
        let s = schema();
        let d = Instance::load(
            s.clone(),
            [("R", vec![RawRow::new(["a,b", "1"]), RawRow::new(["\"q\"", "2"])])],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_relation(&d, 0, &mut buf).unwrap();
        let rows = read_rows(s.relation(0), buf.as_slice(), Path::new("R.csv")).unwrap();
        let back = Instance::load(s, [("R", rows)]).unwrap();
        assert_eq!(back, d);
    }
}
