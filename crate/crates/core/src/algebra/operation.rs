use std::fmt;

use super::tuple::{decode_into, encode, increment, increment_mixed, table_len, Tuples};
use super::{check_domain, Permutation, Relation, VarMap};
use crate::error::{Error, Result};

/// A total operation `{0..d-1}^n -> {0..d-1}` stored as its value table.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Operation {
    d: usize,
    arity: usize,
    table: Vec<u8>,
}

/// Columns `t_1..t_k` drawn from a relation whose componentwise image leaves it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub columns: Vec<Vec<u8>>,
    pub image: Vec<u8>,
}

/// Result of a preservation check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Preservation {
    Preserved,
    Violated(Counterexample),
}

impl Preservation {
    pub fn holds(&self) -> bool {
        matches!(self, Preservation::Preserved)
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        match self {
            Preservation::Preserved => None,
            Preservation::Violated(c) => Some(c),
        }
    }
}

impl Operation {
    pub fn new(d: usize, arity: usize, table: Vec<u8>) -> Result<Self> {
        check_domain(d)?;
        let len = table_len(d, arity)?;
        if table.len() != len {
            return Err(Error::Invalid(format!(
                "operation table has {} entries, expected {}",
                table.len(),
                len
            )));
        }
        if let Some(&v) = table.iter().find(|&&v| v as usize >= d) {
            return Err(Error::ValueOutOfDomain {
                value: v as usize,
                size: d,
            });
        }
        Ok(Operation { d, arity, table })
    }

    pub fn from_fn(d: usize, arity: usize, mut f: impl FnMut(&[u8]) -> u8) -> Result<Self> {
        check_domain(d)?;
        table_len(d, arity)?;
        let table = Tuples::new(d, arity).map(|t| f(&t)).collect();
        Self::new(d, arity, table)
    }

    /// The `index`-th (0-based) projection of the given arity.
    pub fn projection(d: usize, arity: usize, index: usize) -> Result<Self> {
        if index >= arity {
            return Err(Error::ArityMismatch {
                expected: arity,
                found: index + 1,
            });
        }
        Self::from_fn(d, arity, |t| t[index])
    }

    pub fn constant(d: usize, arity: usize, value: u8) -> Result<Self> {
        if value as usize >= d {
            return Err(Error::ValueOutOfDomain {
                value: value as usize,
                size: d,
            });
        }
        Self::from_fn(d, arity, |_| value)
    }

    pub fn domain_size(&self) -> usize {
        self.d
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn table(&self) -> &[u8] {
        &self.table
    }

    /// Table entry at an encoded argument index.
    #[inline]
    pub fn at(&self, index: usize) -> u8 {
        self.table[index]
    }

    pub fn eval(&self, args: &[u8]) -> Result<u8> {
        if args.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: args.len(),
            });
        }
        if let Some(&v) = args.iter().find(|&&v| v as usize >= self.d) {
            return Err(Error::ValueOutOfDomain {
                value: v as usize,
                size: self.d,
            });
        }
        Ok(self.table[encode(self.d, args)])
    }

    /// `f_π(a_1..a_r) = f(a_π(1), .., a_π(n))`.
    pub fn minor(&self, map: &VarMap) -> Result<Operation> {
        if map.source_arity() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: map.source_arity(),
            });
        }
        let images = map.images();
        let mut args = vec![0u8; self.arity];
        Self::from_fn(self.d, map.target_arity(), |t| {
            for (slot, &j) in args.iter_mut().zip(images) {
                *slot = t[j];
            }
            self.table[encode(self.d, &args)]
        })
    }

    /// `h(ā) = f(g_1(ā), .., g_k(ā))`.
    pub fn compose(&self, inner: &[Operation]) -> Result<Operation> {
        if inner.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: inner.len(),
            });
        }
        let m = match inner.first() {
            Some(g) => g.arity,
            // Composing a constant with nothing yields the constant itself.
            None => return Ok(self.clone()),
        };
        for g in inner {
            if g.d != self.d {
                return Err(Error::DomainMismatch(self.d, g.d));
            }
            if g.arity != m {
                return Err(Error::ArityMismatch {
                    expected: m,
                    found: g.arity,
                });
            }
        }
        let len = table_len(self.d, m)?;
        let mut table = Vec::with_capacity(len);
        for idx in 0..len {
            let outer = inner
                .iter()
                .fold(0usize, |acc, g| acc * self.d + g.table[idx] as usize);
            table.push(self.table[outer]);
        }
        Ok(Operation {
            d: self.d,
            arity: m,
            table,
        })
    }

    /// Checks that applying `self` componentwise to any `arity` members of `rel` stays in `rel`.
    pub fn preserves(&self, rel: &Relation) -> Result<Preservation> {
        if rel.domain_size() != self.d {
            return Err(Error::DomainMismatch(self.d, rel.domain_size()));
        }
        let r = rel.arity();
        let members = rel.flat_tuples();
        let count = rel.len();
        let k = self.arity;
        if count == 0 {
            return Ok(Preservation::Preserved);
        }
        let radices = vec![count; k];
        let mut choice = vec![0usize; k];
        let mut image = vec![0u8; r];
        loop {
            let mut out_index = 0usize;
            for (row, slot) in image.iter_mut().enumerate() {
                let arg = choice
                    .iter()
                    .fold(0usize, |acc, &c| acc * self.d + members[c * r + row] as usize);
                *slot = self.table[arg];
                out_index = out_index * self.d + *slot as usize;
            }
            if !rel.contains_index(out_index) {
                let columns = choice
                    .iter()
                    .map(|&c| members[c * r..(c + 1) * r].to_vec())
                    .collect();
                return Ok(Preservation::Violated(Counterexample { columns, image }));
            }
            if !increment_mixed(&mut choice, &radices) {
                return Ok(Preservation::Preserved);
            }
        }
    }

    /// `f^(σ)(x_1..x_n) = σ(f(σ^-1(x_1), .., σ^-1(x_n)))`.
    pub fn dual(&self, sigma: &Permutation) -> Result<Operation> {
        if sigma.len() != self.d {
            return Err(Error::DomainMismatch(self.d, sigma.len()));
        }
        let inv = sigma.inverse();
        let mut pre = vec![0u8; self.arity];
        Self::from_fn(self.d, self.arity, |t| {
            for (slot, &v) in pre.iter_mut().zip(t) {
                *slot = inv.apply(v);
            }
            sigma.apply(self.table[encode(self.d, &pre)])
        })
    }

    /// `Some(i)` when this is the `i`-th (0-based) projection.
    pub fn projection_index(&self) -> Option<usize> {
        (0..self.arity).find(|&i| {
            let mut t = vec![0u8; self.arity];
            (0..self.table.len()).all(|idx| {
                decode_into(self.d, idx, &mut t);
                self.table[idx] == t[i]
            })
        })
    }

    pub fn is_idempotent(&self) -> bool {
        (0..self.d as u8).all(|x| {
            let diag = vec![x; self.arity];
            self.table[encode(self.d, &diag)] == x
        })
    }

    /// Restriction to a subset, relabelled so that the `i`-th smallest element becomes `i`.
    pub fn restrict(&self, subset: &[u8]) -> Result<Operation> {
        let mut elems = subset.to_vec();
        elems.sort_unstable();
        elems.dedup();
        if let Some(&v) = elems.iter().find(|&&v| v as usize >= self.d) {
            return Err(Error::ValueOutOfDomain {
                value: v as usize,
                size: self.d,
            });
        }
        let e = elems.len();
        check_domain(e)?;
        let mut local = vec![0u8; self.arity];
        let mut global = vec![0u8; self.arity];
        let mut table = Vec::with_capacity(table_len(e, self.arity)?);
        loop {
            for (g, &l) in global.iter_mut().zip(&local) {
                *g = elems[l as usize];
            }
            let v = self.table[encode(self.d, &global)];
            match elems.binary_search(&v) {
                Ok(pos) => table.push(pos as u8),
                Err(_) => return Err(Error::SubsetNotPreserved(elems)),
            }
            if !increment(&mut local, e as u8) {
                break;
            }
        }
        Operation::new(e, self.arity, table)
    }
}

impl fmt::Debug for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Operation(d={}, arity={}, table=", self.d, self.arity)?;
        for v in &self.table {
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn add3() -> Operation {
        Operation::from_fn(3, 2, |t| (t[0] + t[1]) % 3).unwrap()
    }

    #[test]
    fn eval_checks_shape() {
        let f = add3();
        assert_eq!(f.eval(&[2, 2]).unwrap(), 1);
        assert!(matches!(f.eval(&[1]), Err(Error::ArityMismatch { .. })));
        assert!(matches!(f.eval(&[3, 0]), Err(Error::ValueOutOfDomain { .. })));
    }

    #[test]
    fn projections_evaluate_to_their_coordinate() {
        for n in 1..=4 {
            for i in 0..n {
                let p = Operation::projection(3, n, i).unwrap();
                assert_eq!(p.projection_index(), Some(i));
                for t in Tuples::new(3, n) {
                    assert_eq!(p.eval(&t).unwrap(), t[i]);
                }
            }
        }
    }

    #[test]
    fn identity_minor_is_noop() {
        let f = Operation::from_fn(3, 3, |t| (t[0] * 2 + t[1] + t[2] * t[2]) % 3).unwrap();
        let id = VarMap::new(3, vec![0, 1, 2]).unwrap();
        assert_eq!(f.minor(&id).unwrap(), f);
    }

    #[test]
    fn compose_with_projections_is_identity() {
        let f = add3();
        let projs = vec![
            Operation::projection(3, 2, 0).unwrap(),
            Operation::projection(3, 2, 1).unwrap(),
        ];
        assert_eq!(f.compose(&projs).unwrap(), f);
    }

    #[test]
    fn compose_rejects_mixed_arities() {
        let f = add3();
        let gs = vec![
            Operation::projection(3, 2, 0).unwrap(),
            Operation::projection(3, 3, 1).unwrap(),
        ];
        assert!(f.compose(&gs).is_err());
    }

    #[test]
    fn constants_have_one_entry() {
        let c = Operation::constant(3, 0, 2).unwrap();
        assert_eq!(c.table(), &[2]);
        assert_eq!(c.eval(&[]).unwrap(), 2);
        assert!(!c.is_idempotent());
    }

    #[test]
    fn restrict_rejects_unpreserved_subset() {
        let f = add3();
        assert!(matches!(f.restrict(&[1, 2]), Err(Error::SubsetNotPreserved(_))));
        let g = Operation::from_fn(3, 2, |t| t[0].max(t[1])).unwrap();
        let r = g.restrict(&[1, 2]).unwrap();
        assert_eq!(r.table(), &[0, 1, 1, 1]);
    }

    #[test]
    fn preservation_reports_columns() {
        let le = Relation::from_tuples(2, 2, [[0, 0], [0, 1], [1, 1]]).unwrap();
        let neg = Operation::from_fn(2, 1, |t| 1 - t[0]).unwrap();
        let res = neg.preserves(&le).unwrap();
        let cex = res.counterexample().unwrap();
        assert!(le.contains(&cex.columns[0]));
        assert!(!le.contains(&cex.image));
        let min = Operation::from_fn(2, 2, |t| t[0].min(t[1])).unwrap();
        assert!(min.preserves(&le).unwrap().holds());
    }
}
