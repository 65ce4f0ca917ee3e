//! Uses the table-constraint solver directly: 3-colouring a wheel graph.

use clonelab::csp::{default_node_cap, CspBuilder};
use clonelab::{Relation, Result};

fn main() -> Result<()> {
    let neq = Relation::from_predicate(3, 2, |t| t[0] != t[1])?;
    for rim in [4, 5] {
        let mut b = CspBuilder::new(3)?;
        let hub = b.add_vars(rim + 1);
        let ne = b.add_relation(&neq)?;
        for i in 0..rim {
            let (u, v) = (hub + 1 + i, hub + 1 + (i + 1) % rim);
            b.post(ne, &[u, v])?;
            b.post(ne, &[hub, u])?;
        }
        let inst = b.build();
        let out = inst.solve_one(default_node_cap());
        match out.assignment() {
            Some(a) => println!("wheel with rim {rim}: colouring {a:?}"),
            None => println!("wheel with rim {rim}: not 3-colourable ({} nodes)", out.stats.nodes),
        }
        let all = inst.solve_all(usize::MAX, default_node_cap());
        println!("  {} colourings in total", all.solutions.len());
    }
    Ok(())
}
