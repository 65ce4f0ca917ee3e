//! Runs the fast corpus entries through their checkers.

use clonelab::corpus::{corpus_selftest, load_corpus, SelftestOptions};
use clonelab::Result;

fn main() -> Result<()> {
    let corpus = load_corpus()?;
    let opts = SelftestOptions {
        quick: true,
        ..SelftestOptions::default()
    };
    let r = corpus_selftest(&corpus, &opts);
    for o in &r.outcomes {
        println!("{} {} {}: {}", if o.passed { "ok" } else { "FAIL" }, o.kind, o.id, o.detail);
    }
    Ok(())
}
