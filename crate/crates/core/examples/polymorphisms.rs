//! Enumerates the binary and ternary polymorphisms of a few structures, with
//! and without the cyclic-shift quotient.

use clonelab::galois::{polymorphisms, PolQuery};
use clonelab::{catalog, Result};

fn main() -> Result<()> {
    for key in ["TN", "L3", "W", "D"] {
        let s = catalog::structure(key)?;
        for k in [2, 3] {
            let plain = polymorphisms(&s, &PolQuery::new(k).cap(100_000))?;
            let quotient = polymorphisms(&s, &PolQuery::new(k).quotient(true).cap(100_000))?;
            assert_eq!(plain.operations, quotient.operations);
            println!(
                "{key}: {} polymorphisms of arity {k} ({} vs {} search nodes)",
                plain.operations.len(),
                plain.stats.nodes,
                quotient.stats.nodes
            );
        }
    }
    Ok(())
}
