//! Generates the clone of a few operations up to arity 3 and compares it
//! with the polymorphisms of the matching structure.

use clonelab::galois::{clone_generate, polymorphisms, CloneGenQuery, PolQuery};
use clonelab::{catalog, Result};

fn main() -> Result<()> {
    for (gen, structure) in [("m", "TN"), ("plus", "TL2")] {
        let g = clone_generate(&CloneGenQuery::new(vec![catalog::operation(gen)?], 3))?;
        let s = catalog::structure(structure)?;
        for n in 1..=3 {
            let pol = polymorphisms(&s, &PolQuery::new(n))?;
            let generated = g.of_arity(n).count();
            println!(
                "[{gen}] has {generated} operations of arity {n}; Pol({structure}) has {}",
                pol.operations.len()
            );
        }
    }
    Ok(())
}
