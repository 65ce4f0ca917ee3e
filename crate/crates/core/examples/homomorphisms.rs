//! Searches homomorphisms between catalog structures.

use clonelab::homsearch::{find_homomorphism, find_homomorphisms, homomorphically_equivalent, HomQuery};
use clonelab::{catalog, Result};

fn main() -> Result<()> {
    let c3 = catalog::structure("C3")?;
    let mut q = HomQuery::new(&c3, &c3);
    q.all = true;
    println!("endomorphisms of C3: {:?}", find_homomorphisms(&q)?.maps);

    let tn = catalog::structure("TN")?;
    println!("TN to itself: {:?}", find_homomorphism(&tn, &tn)?);
    let d = catalog::structure("D")?;
    println!("D equivalent to itself: {}", homomorphically_equivalent(&d, &d)?);
    Ok(())
}
