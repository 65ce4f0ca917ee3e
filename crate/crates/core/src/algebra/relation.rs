use std::fmt;

use fixedbitset::FixedBitSet;

use super::tuple::{decode, decode_into, encode, table_len, Tuples};
use super::{check_domain, Permutation};
use crate::error::{Error, Result};

/// A finitary relation on `{0..d-1}`, stored as a bitset over encoded tuples.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    d: usize,
    arity: usize,
    members: FixedBitSet,
}

impl Relation {
    pub fn empty(d: usize, arity: usize) -> Result<Self> {
        check_domain(d)?;
        let len = table_len(d, arity)?;
        Ok(Relation {
            d,
            arity,
            members: FixedBitSet::with_capacity(len),
        })
    }

    pub fn full(d: usize, arity: usize) -> Result<Self> {
        let mut rel = Self::empty(d, arity)?;
        rel.members.insert_range(..);
        Ok(rel)
    }

    pub fn from_tuples<I, T>(d: usize, arity: usize, tuples: I) -> Result<Self>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[u8]>,
    {
        let mut rel = Self::empty(d, arity)?;
        for t in tuples {
            rel.insert(t.as_ref())?;
        }
        Ok(rel)
    }

    /// All tuples satisfying `pred`.
    pub fn from_predicate(d: usize, arity: usize, pred: impl Fn(&[u8]) -> bool) -> Result<Self> {
        let mut rel = Self::empty(d, arity)?;
        for (i, t) in Tuples::new(d, arity).enumerate() {
            if pred(&t) {
                rel.members.insert(i);
            }
        }
        Ok(rel)
    }

    /// Wraps a raw bitset of length `d^arity`.
    pub fn from_bits(d: usize, arity: usize, members: FixedBitSet) -> Result<Self> {
        check_domain(d)?;
        let len = table_len(d, arity)?;
        if members.len() != len {
            return Err(Error::Invalid(format!(
                "bitset of length {} for a relation with {} candidate tuples",
                members.len(),
                len
            )));
        }
        Ok(Relation { d, arity, members })
    }

    pub fn domain_size(&self) -> usize {
        self.d
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_clear()
    }

    pub fn check_tuple(&self, t: &[u8]) -> Result<()> {
        if t.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: t.len(),
            });
        }
        if let Some(&v) = t.iter().find(|&&v| v as usize >= self.d) {
            return Err(Error::ValueOutOfDomain {
                value: v as usize,
                size: self.d,
            });
        }
        Ok(())
    }

    pub fn insert(&mut self, t: &[u8]) -> Result<()> {
        self.check_tuple(t)?;
        self.members.insert(encode(self.d, t));
        Ok(())
    }

    /// Membership test; tuples of the wrong shape are simply not members.
    pub fn contains(&self, t: &[u8]) -> bool {
        t.len() == self.arity
            && t.iter().all(|&v| (v as usize) < self.d)
            && self.members.contains(encode(self.d, t))
    }

    #[inline]
    pub fn contains_index(&self, index: usize) -> bool {
        self.members.contains(index)
    }

    /// Encoded indices of the members, ascending.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.ones()
    }

    /// Member tuples in encoding order.
    pub fn iter(&self) -> impl Iterator<Item = Vec<u8>> + '_ {
        let (d, n) = (self.d, self.arity);
        self.members.ones().map(move |i| decode(d, n, i))
    }

    /// Member tuples flattened into one buffer, `arity` values per tuple.
    pub fn flat_tuples(&self) -> Vec<u8> {
        let mut out = vec![0; self.len() * self.arity];
        for (chunk, i) in out.chunks_mut(self.arity.max(1)).zip(self.members.ones()) {
            if self.arity > 0 {
                decode_into(self.d, i, chunk);
            }
        }
        out
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.d == other.d && self.arity == other.arity && self.members.is_subset(&other.members)
    }

    pub fn intersection(&self, other: &Relation) -> Result<Relation> {
        self.same_shape(other)?;
        let mut members = self.members.clone();
        members.intersect_with(&other.members);
        Ok(Relation { members, ..*self })
    }

    fn same_shape(&self, other: &Relation) -> Result<()> {
        if self.d != other.d {
            return Err(Error::DomainMismatch(self.d, other.d));
        }
        if self.arity != other.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: other.arity,
            });
        }
        Ok(())
    }

    /// `{ (σ(x_1), ..., σ(x_n)) | x ∈ R }`.
    pub fn dual(&self, sigma: &Permutation) -> Result<Relation> {
        if sigma.len() != self.d {
            return Err(Error::DomainMismatch(self.d, sigma.len()));
        }
        let image = self.iter().map(|t| t.iter().map(|&v| sigma.apply(v)).collect::<Vec<_>>());
        Relation::from_tuples(self.d, self.arity, image)
    }

    /// Projection onto the given coordinates (0-based, any order, repeats allowed).
    pub fn project(&self, coords: &[usize]) -> Result<Relation> {
        if let Some(&c) = coords.iter().find(|&&c| c >= self.arity) {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: c + 1,
            });
        }
        let image = self
            .iter()
            .map(|t| coords.iter().map(|&c| t[c]).collect::<Vec<_>>());
        Relation::from_tuples(self.d, coords.len(), image)
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Relation(d={}, arity={}, {{", self.d, self.arity)?;
        for (i, t) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "(")?;
            for (j, v) in t.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{v}")?;
            }
            write!(f, ")")?;
        }
        write!(f, "}})")
    }
}
