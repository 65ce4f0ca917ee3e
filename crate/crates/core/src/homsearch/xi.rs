//! The minor-preserving map from the polymorphisms of `DM` into those of `TN`.

use std::collections::HashMap;

use crate::algebra::tuple::{encode, Tuples};
use crate::algebra::{Operation, VarMap};
use crate::catalog;
use crate::error::{Error, Result};
use crate::galois::{clone_generate, polymorphisms, CloneGenQuery, PolQuery};

fn majority_on_01(f: &Operation) -> bool {
    [[0, 0, 1], [0, 1, 0], [1, 0, 0], [1, 1, 0], [1, 0, 1], [0, 1, 1]]
        .iter()
        .all(|t| f.at(encode(3, t)) == (t.iter().sum::<u8>() >= 2) as u8)
}

/// `xi` on polymorphisms of `DM` of arity at most three.
pub fn xi(f: &Operation) -> Result<Operation> {
    if f.domain_size() != 3 || f.arity() > 3 || f.arity() == 0 {
        return Err(Error::Invalid("xi is defined on operations on three elements of arity 1..=3".into()));
    }
    let on01 = f.restrict(&[0, 1])?;
    if let Some(i) = on01.projection_index() {
        return Operation::projection(3, f.arity(), i);
    }
    if f.arity() != 3 || !majority_on_01(f) {
        return Err(Error::Invalid(
            "restriction to {0,1} is neither a projection nor the majority".into(),
        ));
    }
    let m = catalog::operation("m")?;
    let diff = (3 + f.at(encode(3, &[0, 1, 2])) - f.at(encode(3, &[0, 2, 1]))) % 3;
    let images = match diff {
        0 => vec![0, 1, 2],
        // m(z,y,x)
        1 => vec![2, 1, 0],
        // m(y,x,z)
        _ => vec![1, 0, 2],
    };
    m.minor(&VarMap::new(3, images)?)
}

/// `Xi(f)(a) = xi(f')(0,1,2)` where `f'(x0,x1,x2) = f(x_{a1},..,x_{an})`.
pub fn big_xi(f: &Operation) -> Result<Operation> {
    let mut memo: HashMap<Vec<u8>, u8> = HashMap::new();
    let at012 = encode(3, &[0, 1, 2]);
    let mut table = Vec::new();
    for a in Tuples::new(3, f.arity()) {
        let images = a.iter().map(|&v| v as usize).collect();
        let reduced = f.minor(&VarMap::new(3, images)?)?;
        let v = match memo.get(reduced.table()) {
            Some(&v) => v,
            None => {
                let v = xi(&reduced)?.at(at012);
                memo.insert(reduced.table().to_vec(), v);
                v
            }
        };
        table.push(v);
    }
    Operation::new(3, f.arity(), table)
}

/// Machine check of the map: on ternary polymorphisms of `DM` it lands in the
/// clone generated by `m` and commutes with minors, and `Xi` sends 4-ary
/// polymorphisms of `DM` into polymorphisms of `TN`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XiReport {
    pub ternary: usize,
    pub quaternary: usize,
    /// Whether the 4-ary enumeration finished below the cap.
    pub quaternary_complete: bool,
    pub failures: Vec<String>,
}

impl XiReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn check_xi(cap: usize) -> Result<XiReport> {
    let dm = catalog::structure("DM")?;
    let tn = catalog::structure("TN")?;
    let m = catalog::operation("m")?;
    let generated = clone_generate(&CloneGenQuery::new(vec![m], 3))?;
    let mut failures = Vec::new();

    let ternary = polymorphisms(&dm, &PolQuery::new(3).quotient(true).cap(cap))?;
    if !ternary.exhausted {
        failures.push("ternary polymorphisms were not fully enumerated".into());
    }
    let maps: Vec<VarMap> = VarMap::all(3, 3).collect();
    for f in &ternary.operations {
        let image = xi(f)?;
        if !generated.contains(&image) {
            failures.push(format!("xi({:?}) is outside the clone of m", f.table()));
        }
        for pi in &maps {
            if xi(&f.minor(pi)?)? != image.minor(pi)? {
                failures.push(format!("xi does not commute with {:?} at {:?}", pi.images(), f.table()));
            }
        }
    }

    let quaternary = polymorphisms(&dm, &PolQuery::new(4).quotient(true).cap(cap))?;
    for f in &quaternary.operations {
        let image = big_xi(f)?;
        for (name, rel) in tn.relations() {
            if !image.preserves(rel)?.holds() {
                failures.push(format!("Xi({:?}) does not preserve {name}", f.table()));
            }
        }
    }
    Ok(XiReport {
        ternary: ternary.operations.len(),
        quaternary: quaternary.operations.len(),
        quaternary_complete: quaternary.exhausted,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators() {
        let m = catalog::operation("m").unwrap();
        assert_eq!(xi(&m).unwrap(), m);
        let p = catalog::operation("p").unwrap();
        // p is the first projection on {0,1}.
        assert_eq!(xi(&p).unwrap(), Operation::projection(3, 3, 0).unwrap());
        let swapped = m.minor(&VarMap::new(3, vec![1, 0, 2]).unwrap()).unwrap();
        assert_eq!(xi(&swapped).unwrap(), swapped);
        let pr = Operation::projection(3, 2, 1).unwrap();
        assert_eq!(xi(&pr).unwrap(), pr);
    }

    #[test]
    fn xi_rejects_non_members() {
        let plus = catalog::operation("plus").unwrap();
        assert!(xi(&plus).is_err());
        let c = Operation::constant(3, 3, 0).unwrap();
        assert!(xi(&c).is_err());
    }

    #[test]
    fn big_xi_agrees_with_xi_on_ternary() {
        let m = catalog::operation("m").unwrap();
        let p = catalog::operation("p").unwrap();
        for f in [m, p] {
            assert_eq!(big_xi(&f).unwrap(), xi(&f).unwrap());
        }
    }

    #[test]
    fn full_check() {
        let cap = 100_000;
        let r = check_xi(cap).unwrap();
        assert!(r.holds(), "{:?}", r.failures);
        assert!(r.ternary > 0);
        // The 4-ary polymorphisms run into the millions; the check covers the first `cap`.
        assert!(r.quaternary_complete || r.quaternary == cap);
    }
}
