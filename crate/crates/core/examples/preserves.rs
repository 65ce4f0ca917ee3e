//! Checks whether catalog operations preserve catalog relations and prints a
//! counterexample when they do not.

use clonelab::{catalog, Result};

fn main() -> Result<()> {
    for (op, rel) in [("vee3", "C3"), ("m", "T"), ("plus", "L3"), ("vee3", "L3")] {
        let f = catalog::operation(op)?;
        let r = catalog::relation(rel)?;
        match f.preserves(&r)?.counterexample() {
            None => println!("{op} preserves {rel}"),
            Some(c) => println!("{op} violates {rel}: columns {:?} map to {:?}", c.columns, c.image),
        }
    }
    Ok(())
}
