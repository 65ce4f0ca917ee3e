//! Takes minors of an operation and shows duals under the cyclic shift.

use clonelab::{catalog, Permutation, Result, VarMap};

fn main() -> Result<()> {
    let m = catalog::operation("m")?;
    // m(x,x,y) as a binary operation.
    let pi = VarMap::new(2, vec![0, 0, 1])?;
    let b = m.minor(&pi)?;
    println!("m(x,x,y): {:?}", b.table());
    println!("is the first projection: {}", b.projection_index() == Some(0));
    let shift = Permutation::cyclic(3);
    println!("m is self-dual: {}", m.dual(&shift)? == m);
    let unary = VarMap::all(3, 1).count();
    println!("maps from 3 arguments onto 1: {unary}");
    Ok(())
}
