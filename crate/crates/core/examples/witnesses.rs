//! Checks a witness given as terms over catalog operations.

use clonelab::minorcond::{builtin, builtin_key, check_witness, parse_witness};
use clonelab::{catalog, Result};

const WITNESS: &str = "\
condition QHM(3)
in B2 B3
let p0(x,y,z) := f0inf(x,x,x)
let p1(x,y,z) := f0inf(x,z,y)
let p2(x,y,z) := f0inf(z,x,y)
let p3(x,y,z) := f0inf(z,z,z)
";

fn main() -> Result<()> {
    let w = parse_witness(WITNESS)?;
    let (name, params) = builtin_key(w.condition.as_deref().unwrap_or_default())?;
    let cond = builtin(&name, &params)?;
    let ops = w.assignment()?;
    println!("identities: {:?}", check_witness(&cond, &ops)?);
    for key in &w.structures {
        let s = catalog::structure(key)?;
        let preserved = ops
            .values()
            .all(|f| s.relations().all(|(_, r)| f.preserves(r).is_ok_and(|p| p.holds())));
        println!("all operations preserve {key}: {preserved}");
    }
    Ok(())
}
