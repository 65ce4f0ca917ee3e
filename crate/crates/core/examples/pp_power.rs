//! Builds a pp-power of a structure from a power spec.

use clonelab::ppform::{parse_power, pp_power};
use clonelab::{catalog, Result};

const SPEC: &str = "\
source L2
dim 2 from 1
constants
power C3(x,y) := C3(x1,y1) & C3(y2,x2)
power T(x,y) := x1 = y2 & x2 = y1
";

fn main() -> Result<()> {
    let spec = parse_power(SPEC)?;
    let power = pp_power(&spec, &catalog::structure(&spec.source)?)?;
    println!("power of {} with dimension {}: {} elements", spec.source, spec.dim, power.domain_size());
    for (name, rel) in power.relations() {
        println!("  {name}: arity {}, {} tuples", rel.arity(), rel.len());
    }
    Ok(())
}
