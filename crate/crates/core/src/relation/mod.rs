//! Schemas, instances with stable tuple identifiers, value positions and change sets.

mod csv_io;
mod instance;
mod schema;

pub use csv_io::{load_dir, read_rows, write_dir, write_relation, TID_COLUMN};
pub use instance::{ChangeSet, Instance, Position, RawRow, Tid, Value};
pub use schema::{AttrRef, Attribute, Domain, RelId, RelationSchema, Schema};

pub(crate) use schema::{is_ident, strip_comment};

use crate::error::Result;

/// Positions whose values differ between two correlated instances.
pub fn diff_changeset(d: &Instance, d2: &Instance) -> Result<ChangeSet> {
    d.diff(d2)
}
