//! Refutes a partial table of a guarded 3-cyclic polymorphism of W by
//! propagation alone, without search.

use clonelab::minorcond::{builtin, Indicator};
use clonelab::{catalog, Result};

fn main() -> Result<()> {
    let w = catalog::structure("W")?;
    let cond = builtin("gSigma3", &[])?;
    let ind = Indicator::new(&w, &cond, false)?;
    for a in 0..3u8 {
        let refuted = ind.propagate_assuming(&[("r", &[0, 1, 2, 0], a)])?.is_none();
        println!("r(0,1,2,0) = {a}: {}", if refuted { "refuted" } else { "consistent" });
    }
    Ok(())
}
