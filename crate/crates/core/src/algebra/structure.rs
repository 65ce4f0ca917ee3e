use super::{check_domain, Relation};
use crate::error::{Error, Result};

/// A finite relational structure: a domain `{0..d-1}` and named relations in a fixed order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Structure {
    d: usize,
    relations: Vec<(String, Relation)>,
}

impl Structure {
    pub fn new(d: usize) -> Result<Self> {
        check_domain(d)?;
        Ok(Structure {
            d,
            relations: Vec::new(),
        })
    }

    pub fn with(mut self, name: impl Into<String>, rel: Relation) -> Result<Self> {
        self.add(name, rel)?;
        Ok(self)
    }

    pub fn add(&mut self, name: impl Into<String>, rel: Relation) -> Result<()> {
        let name = name.into();
        if rel.domain_size() != self.d {
            return Err(Error::DomainMismatch(self.d, rel.domain_size()));
        }
        if self.get(&name).is_some() {
            return Err(Error::DuplicateRelation(name));
        }
        self.relations.push((name, rel));
        Ok(())
    }

    pub fn domain_size(&self) -> usize {
        self.d
    }

    pub fn get(&self, name: &str) -> Option<&Relation> {
        self.relations
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, r)| r)
    }

    pub fn relation(&self, name: &str) -> Result<&Relation> {
        self.get(name)
            .ok_or_else(|| Error::UnknownRelation(name.to_string()))
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, &Relation)> {
        self.relations.iter().map(|(n, r)| (n.as_str(), r))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.relations.iter().map(|(n, _)| n.as_str())
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    /// Names and arities, in order.
    pub fn signature(&self) -> Vec<(String, usize)> {
        self.relations
            .iter()
            .map(|(n, r)| (n.clone(), r.arity()))
            .collect()
    }

    /// Same relation names with the same arities, in any order.
    pub fn same_signature(&self, other: &Structure) -> bool {
        self.len() == other.len()
            && self
                .relations()
                .all(|(n, r)| other.get(n).is_some_and(|o| o.arity() == r.arity()))
    }

    /// Adds the singleton relations `c0 .. c{d-1}` unless already present.
    pub fn expand_with_singletons(&self) -> Structure {
        let mut out = self.clone();
        for v in 0..self.d {
            let name = singleton_name(v as u8);
            if out.get(&name).is_none() {
                let rel = Relation::from_tuples(self.d, 1, [[v as u8]])
                    .expect("singleton fits its own domain");
                out.relations.push((name, rel));
            }
        }
        out
    }

    /// Keeps only the named relations, in the given order.
    pub fn reduct(&self, names: &[&str]) -> Result<Structure> {
        let mut out = Structure::new(self.d)?;
        for &n in names {
            out.add(n, self.relation(n)?.clone())?;
        }
        Ok(out)
    }
}

/// Name of the unary relation `{v}`.
pub fn singleton_name(v: u8) -> String {
    format!("c{v}")
}
