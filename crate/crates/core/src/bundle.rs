//! Loading a schema, instance, similarities and MDs from files.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::md::MdSet;
use crate::query::ConjunctiveQuery;
use crate::relation::{load_dir, Instance, Schema};
use crate::similarity::Similarities;

/// Paths of the input files. A missing similarity file means equality only.
#[derive(Debug, Clone, Default)]
pub struct BundlePaths {
    pub schema: PathBuf,
    pub data: PathBuf,
    pub mds: PathBuf,
    pub sims: Option<PathBuf>,
}

impl BundlePaths {
    /// The conventional layout of a directory: `schema.txt`, `data/`, `mds.txt`
    /// and, if present, `sims.txt`.
    pub fn in_dir(dir: &Path) -> Self {
        let sims = dir.join("sims.txt");
        BundlePaths {
            schema: dir.join("schema.txt"),
            data: dir.join("data"),
            mds: dir.join("mds.txt"),
            sims: sims.exists().then_some(sims),
        }
    }
}

/// An instance with the MDs that apply to it.
#[derive(Debug, Clone)]
pub struct Bundle {
    pub schema: Arc<Schema>,
    pub instance: Instance,
    pub mds: MdSet,
}

pub(crate) fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

impl Bundle {
    pub fn load(paths: &BundlePaths) -> Result<Self> {
        let schema = Arc::new(Schema::parse(
            &read(&paths.schema)?,
            &paths.schema.display().to_string(),
        )?);
        let sims = match &paths.sims {
            Some(p) => Similarities::load(p)?,
            None => Similarities::new(),
        };
        let mds = MdSet::parse(
            &read(&paths.mds)?,
            &paths.mds.display().to_string(),
            schema.clone(),
            Arc::new(sims),
        )?;
        let instance = load_dir(schema.clone(), &paths.data)?;
        Ok(Bundle {
            schema,
            instance,
            mds,
        })
    }

    pub fn load_dir(dir: &Path) -> Result<Self> {
        Bundle::load(&BundlePaths::in_dir(dir))
    }

    pub fn query(&self, path: &Path) -> Result<ConjunctiveQuery> {
        ConjunctiveQuery::parse_file(&read(path)?, &path.display().to_string(), &self.schema)
    }
}
