//! Finite operations, relations and structures.
//!
//! Domains are always `{0, .., d-1}`; tuples are encoded base `d`, most
//! significant coordinate first (see [`tuple`]).

mod operation;
mod relation;
mod structure;
pub mod tuple;

pub use operation::{Counterexample, Operation, Preservation};
pub use relation::Relation;
pub use structure::{singleton_name, Structure};

use crate::error::{Error, Result};

/// Largest domain any object may live on. Named objects use `d <= 9`; pp-powers go beyond.
pub const MAX_DOMAIN: usize = 255;

/// Number of domain elements; elements are `0..d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DomainSize(usize);

impl DomainSize {
    pub fn new(d: usize) -> Result<Self> {
        check_domain(d)?;
        Ok(DomainSize(d))
    }

    pub fn get(self) -> usize {
        self.0
    }
}

pub(crate) fn check_domain(d: usize) -> Result<()> {
    if (2..=MAX_DOMAIN).contains(&d) {
        Ok(())
    } else {
        Err(Error::DomainSize(d))
    }
}

/// A bijection of `{0..d-1}`, given by its image list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<u8>);

impl Permutation {
    pub fn new(images: Vec<u8>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &v in &images {
            match seen.get_mut(v as usize) {
                Some(s) if !*s => *s = true,
                _ => return Err(Error::NotAPermutation),
            }
        }
        Ok(Permutation(images))
    }

    pub fn identity(d: usize) -> Self {
        Permutation((0..d as u8).collect())
    }

    /// `x ↦ x + 1 mod d`.
    pub fn cyclic(d: usize) -> Self {
        Permutation((0..d).map(|x| ((x + 1) % d) as u8).collect())
    }

    /// Swaps 0 and 1, fixing everything else.
    pub fn swap01(d: usize) -> Self {
        let mut images: Vec<u8> = (0..d as u8).collect();
        images.swap(0, 1);
        Permutation(images)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn apply(&self, v: u8) -> u8 {
        self.0[v as usize]
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u8; self.0.len()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v as usize] = i as u8;
        }
        Permutation(inv)
    }
}

/// A map `π: {1..n} -> {1..r}` used to take minors, stored 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VarMap {
    target_arity: usize,
    images: Vec<usize>,
}

impl VarMap {
    pub fn new(target_arity: usize, images: Vec<usize>) -> Result<Self> {
        if let Some(&j) = images.iter().find(|&&j| j >= target_arity) {
            return Err(Error::ArityMismatch {
                expected: target_arity,
                found: j + 1,
            });
        }
        Ok(VarMap {
            target_arity,
            images,
        })
    }

    pub fn identity(n: usize) -> Self {
        VarMap {
            target_arity: n,
            images: (0..n).collect(),
        }
    }

    pub fn source_arity(&self) -> usize {
        self.images.len()
    }

    pub fn target_arity(&self) -> usize {
        self.target_arity
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// `(ρ ∘ π)(i) = ρ(π(i))`, so that `(f_π)_ρ = f_{ρ∘π}`.
    pub fn then(&self, rho: &VarMap) -> Result<VarMap> {
        if rho.source_arity() != self.target_arity {
            return Err(Error::ArityMismatch {
                expected: self.target_arity,
                found: rho.source_arity(),
            });
        }
        VarMap::new(
            rho.target_arity,
            self.images.iter().map(|&j| rho.images[j]).collect(),
        )
    }

    /// Every map `{0..n-1} -> {0..r-1}`.
    pub fn all(n: usize, r: usize) -> impl Iterator<Item = VarMap> {
        let radices = vec![r; n];
        let mut counter = vec![0usize; n];
        let mut done = r == 0 && n > 0;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            let out = VarMap {
                target_arity: r,
                images: counter.clone(),
            };
            if !tuple::increment_mixed(&mut counter, &radices) {
                done = true;
            }
            Some(out)
        })
    }
}
