//! Decides pp-definability through the closure under polymorphisms. The
//! closure method handles relations of at most six tuples.

use clonelab::galois::pp_definable;
use clonelab::{catalog, Result};

fn main() -> Result<()> {
    for (rel, structure) in [("B2", "W"), ("le2", "N2"), ("C2", "W"), ("T", "D"), ("le2", "W")] {
        let r = catalog::relation(rel)?;
        let p = pp_definable(&r, &catalog::structure(structure)?)?;
        println!(
            "{rel} in {structure}: {} (closure {} tuples, relation {})",
            if p.definable { "definable" } else { "not definable" },
            p.closure.len(),
            r.len()
        );
    }
    Ok(())
}
