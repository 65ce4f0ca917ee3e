//! Evaluates pp-formulas and small programs of definitions over a structure.

use clonelab::ppform::{eval_pp, eval_program, parse_formula, parse_program};
use clonelab::{catalog, Result};

fn main() -> Result<()> {
    let w = catalog::structure("W")?;
    let f = parse_formula("exists z1 z2. Req3(x,y,z1) & Req3(y,x,z2) & C3(z1,z2)")?;
    let b2 = eval_pp(&f, &w)?;
    println!("defined relation: {:?}", b2.iter().collect::<Vec<_>>());
    println!("equals B2: {}", b2 == catalog::relation("B2")?);

    let p = catalog::structure("P")?;
    let program = parse_program(
        "let le2(x,y) := Rimp2(y,y,x) & Rimp2(x,x,x)\n\
         let B2(x1,x2) := exists u. Rimp2(x1,x2,u) & C3(u,x1)\n",
    )?;
    let extended = eval_program(&program, &p)?;
    for name in ["le2", "B2"] {
        let ok = extended.relation(name)? == &catalog::relation(name)?;
        println!("{name} in P matches the catalog: {ok}");
    }
    Ok(())
}
