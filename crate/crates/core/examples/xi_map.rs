//! The minor-preserving map from the polymorphisms of DM to those of TN,
//! checked on all ternary members and a sample of 4-ary ones.

use clonelab::homsearch::{check_xi, xi};
use clonelab::{catalog, Result};

fn main() -> Result<()> {
    let p = catalog::operation("p")?;
    println!("xi(p) = {:?}", xi(&p)?.table());
    let r = check_xi(2_000)?;
    println!(
        "{} ternary and {} 4-ary polymorphisms checked, {} failures",
        r.ternary,
        r.quaternary,
        r.failures.len()
    );
    Ok(())
}
