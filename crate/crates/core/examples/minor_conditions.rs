//! Decides built-in minor conditions in polymorphism clones.

use clonelab::galois::has_cycle;
use clonelab::minorcond::{builtin, builtin_key, satisfiable_in_pol, SatOptions};
use clonelab::{catalog, Result};

fn main() -> Result<()> {
    let checks = [
        ("W", "gS3"),
        ("Q", "gS3"),
        ("Q", "QJ(4)"),
        ("M2", "QJ(4)"),
        ("M2", "QHM(3)"),
        ("B2", "QHM(3)"),
        ("TL2", "Sigma2"),
        ("L3", "Sigma2"),
    ];
    for (s_key, c_key) in checks {
        let s = catalog::structure(s_key)?;
        let (name, params) = builtin_key(c_key)?;
        let cond = builtin(&name, &params)?;
        let opts = SatOptions {
            c3_quotient: has_cycle(&s),
            ..SatOptions::default()
        };
        let r = satisfiable_in_pol(&s, &cond, &opts)?;
        let verdict = if r.is_sat() { "holds" } else if r.is_unsat() { "fails" } else { "capped" };
        println!("{c_key} {verdict} in Pol({s_key}) after {} nodes", r.outcome.stats.nodes);
    }
    Ok(())
}
