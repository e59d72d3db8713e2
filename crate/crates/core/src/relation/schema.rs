use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Domain tag of an attribute. Integer values are canonicalized before comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    Str,
    Int,
}

impl Domain {
    fn parse(s: &str) -> Option<Domain> {
        match s {
            "str" | "string" => Some(Domain::Str),
            "int" | "integer" => Some(Domain::Int),
            _ => None,
        }
    }

    /// Canonical textual form of `raw` under this domain, or a description of why it is invalid.
    pub fn canonicalize(self, raw: &str) -> Result<String, String> {
        if raw.is_empty() {
            return Err("blank value (null values are not supported)".into());
        }
        match self {
            Domain::Str => Ok(raw.to_string()),
            Domain::Int => raw
                .trim()
                .parse::<i64>()
                .map(|n| n.to_string())
                .map_err(|_| format!("{raw:?} is not an integer")),
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Domain::Str => "str",
            Domain::Int => "int",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attribute {
    pub name: String,
    pub domain: Domain,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationSchema {
    pub name: String,
    pub attributes: Vec<Attribute>,
}

impl RelationSchema {
    pub fn arity(&self) -> usize {
        self.attributes.len()
    }

    pub fn attr_index(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }
}

/// Index of a relation in its schema.
pub type RelId = usize;

/// A relation-qualified attribute, `R[A]`, stored as indices into the schema.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AttrRef {
    pub rel: RelId,
    pub attr: usize,
}

impl AttrRef {
    pub fn new(rel: RelId, attr: usize) -> Self {
        AttrRef { rel, attr }
    }
}

/// Relation names with ordered, domain-tagged attributes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Schema {
    relations: Vec<RelationSchema>,
    by_name: HashMap<String, RelId>,
}

impl Schema {
    pub fn new(relations: Vec<RelationSchema>) -> Result<Self> {
        let mut by_name = HashMap::new();
        for (i, rel) in relations.iter().enumerate() {
            if by_name.insert(rel.name.clone(), i).is_some() {
                return Err(Error::Schema(format!("duplicate relation {}", rel.name)));
            }
            for (j, a) in rel.attributes.iter().enumerate() {
                if rel.attributes[..j].iter().any(|b| b.name == a.name) {
                    return Err(Error::Schema(format!(
                        "duplicate attribute {}[{}]",
                        rel.name, a.name
                    )));
                }
            }
        }
        Ok(Schema { relations, by_name })
    }

    /// Parses the line-based schema format: `relation R(A:str, B:int)`.
    /// Blank lines and `#` comments are ignored; an omitted tag means `str`.
    pub fn parse(text: &str, file: &str) -> Result<Self> {
        let mut relations = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| Error::syntax(file, lineno + 1, 1, msg);
            let rest = line
                .strip_prefix("relation")
                .filter(|r| r.starts_with(char::is_whitespace))
                .ok_or_else(|| err("expected `relation NAME(ATTR:TYPE, ...)`"))?
                .trim();
            let open = rest.find('(').ok_or_else(|| err("missing `(`"))?;
            let close = rest.rfind(')').ok_or_else(|| err("missing `)`"))?;
            if close < open || !rest[close + 1..].trim().is_empty() {
                return Err(err("malformed attribute list"));
            }
            let name = rest[..open].trim();
            if !is_ident(name) {
                return Err(err(&format!("invalid relation name {name:?}")));
            }
            let mut attributes = Vec::new();
            for item in rest[open + 1..close].split(',') {
                let item = item.trim();
                if item.is_empty() {
                    return Err(err("empty attribute declaration"));
                }
                let (aname, tag) = match item.split_once(':') {
                    Some((a, t)) => (a.trim(), t.trim()),
                    None => (item, "str"),
                };
                if !is_ident(aname) {
                    return Err(err(&format!("invalid attribute name {aname:?}")));
                }
                let domain =
                    Domain::parse(tag).ok_or_else(|| err(&format!("unknown domain tag {tag:?}")))?;
                attributes.push(Attribute {
                    name: aname.to_string(),
                    domain,
                });
            }
            relations.push(RelationSchema {
                name: name.to_string(),
                attributes,
            });
        }
        Schema::new(relations)
    }

    pub fn relations(&self) -> &[RelationSchema] {
        &self.relations
    }

    pub fn relation(&self, rel: RelId) -> &RelationSchema {
        &self.relations[rel]
    }

    pub fn rel_id(&self, name: &str) -> Option<RelId> {
        self.by_name.get(name).copied()
    }

    pub fn resolve(&self, rel: &str, attr: &str) -> Result<AttrRef> {
        let r = self
            .rel_id(rel)
            .ok_or_else(|| Error::UnknownRelation(rel.to_string()))?;
        let a = self.relations[r]
            .attr_index(attr)
            .ok_or_else(|| Error::UnknownAttribute(format!("{rel}[{attr}]")))?;
        Ok(AttrRef::new(r, a))
    }

    pub fn domain(&self, a: AttrRef) -> Domain {
        self.relations[a.rel].attributes[a.attr].domain
    }

    pub fn attr_name(&self, a: AttrRef) -> &str {
        &self.relations[a.rel].attributes[a.attr].name
    }

    pub fn rel_name(&self, rel: RelId) -> &str {
        &self.relations[rel].name
    }

    /// `R[A]`
    pub fn attr_label(&self, a: AttrRef) -> String {
        format!("{}[{}]", self.rel_name(a.rel), self.attr_name(a))
    }

    pub fn all_attrs(&self) -> impl Iterator<Item = AttrRef> + '_ {
        self.relations
            .iter()
            .enumerate()
            .flat_map(|(r, rel)| (0..rel.arity()).map(move |a| AttrRef::new(r, a)))
    }

    /// Renders the schema back into its text format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for rel in &self.relations {
            let attrs: Vec<String> = rel
                .attributes
                .iter()
                .map(|a| format!("{}:{}", a.name, a.domain))
                .collect();
            out.push_str(&format!("relation {}({})\n", rel.name, attrs.join(", ")));
        }
        out
    }
}

pub(crate) fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

pub(crate) fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}
