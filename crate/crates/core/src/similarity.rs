//! Symmetric, reflexive similarity relations on attribute values.
//!
//! Every relation here is reflexive and symmetric by construction. Transitivity is
//! only ever *declared* by the user; [`Similarities::check_transitivity`] verifies
//! the declaration against a concrete domain before anything relies on it.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use crate::error::{Error, Result};
use crate::relation::{is_ident, strip_comment, Value};

/// Name of the built-in equality similarity written `=` in the MD language.
pub const EQUALITY: &str = "=";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SimilarityKind {
    Equality,
    /// Unit-cost Levenshtein distance at most `k`.
    EditDistance(usize),
    /// Explicit list of similar pairs, closed under symmetry and reflexivity.
    Table(BTreeSet<(String, String)>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimilaritySpec {
    pub name: String,
    pub kind: SimilarityKind,
    pub declared_transitive: bool,
}

impl SimilaritySpec {
    pub fn equality(name: &str) -> Self {
        SimilaritySpec {
            name: name.to_string(),
            kind: SimilarityKind::Equality,
            declared_transitive: true,
        }
    }

    pub fn edit_distance(name: &str, k: usize, declared_transitive: bool) -> Self {
        SimilaritySpec {
            name: name.to_string(),
            kind: SimilarityKind::EditDistance(k),
            declared_transitive,
        }
    }

    pub fn table<'a>(
        name: &str,
        pairs: impl IntoIterator<Item = (&'a str, &'a str)>,
        declared_transitive: bool,
    ) -> Self {
        let mut set = BTreeSet::new();
        for (a, b) in pairs {
            set.insert((a.to_string(), b.to_string()));
            set.insert((b.to_string(), a.to_string()));
        }
        SimilaritySpec {
            name: name.to_string(),
            kind: SimilarityKind::Table(set),
            declared_transitive,
        }
    }

    pub fn is_equality(&self) -> bool {
        self.kind == SimilarityKind::Equality
    }

    pub fn similar(&self, a: &Value, b: &Value) -> bool {
        if a == b {
            return true;
        }
        let (Some(x), Some(y)) = (a.as_str(), b.as_str()) else {
            return false;
        };
        match &self.kind {
            SimilarityKind::Equality => false,
            SimilarityKind::EditDistance(k) => strsim::levenshtein(x, y) <= *k,
            SimilarityKind::Table(pairs) => pairs.contains(&(x.to_string(), y.to_string())),
        }
    }
}

/// Free-function form of [`SimilaritySpec::similar`].
pub fn similar(spec: &SimilaritySpec, a: &Value, b: &Value) -> bool {
    spec.similar(a, b)
}

/// Triples `(x, y, z)` over `domain` with `x ≈ y`, `y ≈ z` and `x ≉ z`.
///
/// Each violation is reported once, with `x < z`, in lexicographic order.
pub fn verify_transitivity(
    spec: &SimilaritySpec,
    domain: &BTreeSet<Value>,
) -> Vec<(Value, Value, Value)> {
    if spec.is_equality() {
        return Vec::new();
    }
    let vals: Vec<&Value> = domain.iter().collect();
    let neighbours: Vec<Vec<usize>> = (0..vals.len())
        .map(|i| {
            (0..vals.len())
                .filter(|&j| j != i && spec.similar(vals[i], vals[j]))
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    for (y, ns) in neighbours.iter().enumerate() {
        for (k, &x) in ns.iter().enumerate() {
            for &z in &ns[k + 1..] {
                if !neighbours[x].contains(&z) {
                    let (x, z) = if vals[x] < vals[z] { (x, z) } else { (z, x) };
                    out.push((vals[x].clone(), vals[y].clone(), vals[z].clone()));
                }
            }
        }
    }
    out.sort();
    out
}

/// Index of a similarity inside a [`Similarities`] registry.
pub type SimId = usize;

/// A registry of named similarity relations. Index 0 is always built-in equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Similarities {
    specs: Vec<SimilaritySpec>,
    by_name: HashMap<String, SimId>,
}

impl Default for Similarities {
    fn default() -> Self {
        let mut by_name = HashMap::new();
        by_name.insert(EQUALITY.to_string(), 0);
        Similarities {
            specs: vec![SimilaritySpec::equality(EQUALITY)],
            by_name,
        }
    }
}

impl Similarities {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, spec: SimilaritySpec) -> Result<SimId> {
        if self.by_name.contains_key(&spec.name) {
            return Err(Error::Config(format!("similarity {} defined twice", spec.name)));
        }
        let id = self.specs.len();
        self.by_name.insert(spec.name.clone(), id);
        self.specs.push(spec);
        Ok(id)
    }

    pub fn id(&self, name: &str) -> Option<SimId> {
        self.by_name.get(name).copied()
    }

    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }

    pub fn get(&self, id: SimId) -> &SimilaritySpec {
        &self.specs[id]
    }

    pub fn iter(&self) -> impl Iterator<Item = (SimId, &SimilaritySpec)> {
        self.specs.iter().enumerate()
    }

    pub fn similar(&self, id: SimId, a: &Value, b: &Value) -> bool {
        self.specs[id].similar(a, b)
    }

    /// Parses the line-based similarity format.
    ///
    /// ```text
    /// sim name = eq
    /// sim name = lev <= 2 transitive
    /// sim name = table pairs.csv
    /// ```
    ///
    /// Table paths are resolved against `base_dir`.
    pub fn parse(text: &str, file: &str, base_dir: &Path) -> Result<Self> {
        let mut sims = Similarities::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::syntax(file, lineno + 1, 1, msg);
            let rest = line
                .strip_prefix("sim")
                .filter(|r| r.starts_with(char::is_whitespace))
                .ok_or_else(|| err("expected `sim NAME = ...`".into()))?;
            let (name, def) = rest
                .split_once('=')
                .ok_or_else(|| err("missing `=`".into()))?;
            let name = name.trim();
            if !is_ident(name) {
                return Err(err(format!("invalid similarity name {name:?}")));
            }
            let mut words = def.split_whitespace().collect::<Vec<_>>();
            let transitive = words.last() == Some(&"transitive");
            if transitive {
                words.pop();
            }
            let spec = match words.as_slice() {
                ["eq"] => SimilaritySpec::equality(name),
                ["lev", "<=", k] => {
                    let k = k
                        .parse()
                        .map_err(|_| err(format!("edit distance bound {k:?} is not a number")))?;
                    SimilaritySpec::edit_distance(name, k, transitive)
                }
                ["table", path] => {
                    let path = base_dir.join(path);
                    let body =
                        std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
                    let pairs = parse_table(&body, &path.display().to_string())?;
                    SimilaritySpec::table(
                        name,
                        pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())),
                        transitive,
                    )
                }
                _ => {
                    return Err(err(format!(
                        "unrecognized similarity definition {:?}",
                        def.trim()
                    )))
                }
            };
            sims.add(spec).map_err(|e| err(e.to_string()))?;
        }
        Ok(sims)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Similarities::parse(&text, &path.display().to_string(), base)
    }

    /// Checks every similarity against its domain and downgrades declarations that fail.
    ///
    /// `domains` maps a similarity to the values it is applied to; similarities without
    /// an entry are checked against the empty domain.
    pub fn check_transitivity(&self, domains: &BTreeMap<SimId, BTreeSet<Value>>) -> Transitivity {
        let empty = BTreeSet::new();
        let entries = self
            .specs
            .iter()
            .enumerate()
            .map(|(id, spec)| {
                let violations = verify_transitivity(spec, domains.get(&id).unwrap_or(&empty));
                let transitive =
                    spec.is_equality() || (spec.declared_transitive && violations.is_empty());
                TransitivityCheck {
                    name: spec.name.clone(),
                    declared: spec.declared_transitive,
                    transitive,
                    violations,
                }
            })
            .collect();
        Transitivity { entries }
    }
}

/// Outcome of checking one similarity's transitivity declaration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitivityCheck {
    pub name: String,
    pub declared: bool,
    pub transitive: bool,
    pub violations: Vec<(Value, Value, Value)>,
}

/// Checked transitivity flags for every similarity in a registry, indexed by [`SimId`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transitivity {
    pub entries: Vec<TransitivityCheck>,
}

impl Transitivity {
    /// Takes every declaration at face value. Only meant for tests and for callers
    /// that have verified transitivity by other means.
    pub fn trusting(sims: &Similarities) -> Self {
        Transitivity {
            entries: sims
                .specs
                .iter()
                .map(|s| TransitivityCheck {
                    name: s.name.clone(),
                    declared: s.declared_transitive,
                    transitive: s.declared_transitive || s.is_equality(),
                    violations: Vec::new(),
                })
                .collect(),
        }
    }

    pub fn is_transitive(&self, id: SimId) -> bool {
        self.entries.get(id).is_some_and(|e| e.transitive)
    }
}

fn parse_table(body: &str, file: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in body.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (a, b) = line
            .split_once(',')
            .ok_or_else(|| Error::syntax(file, i + 1, 1, "expected `value,value`"))?;
        out.push((a.trim().to_string(), b.trim().to_string()));
    }
    Ok(out)
}
