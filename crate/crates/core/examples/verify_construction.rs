//! Verifies a pp-construction: builds the power and checks both maps.

use clonelab::corpus::load_corpus;
use clonelab::homsearch::verify_construction;
use clonelab::Result;

fn main() -> Result<()> {
    let corpus = load_corpus()?;
    for id in ["q-from-p", "tl2-from-l2", "b3pi-from-m3"] {
        let case = corpus.case(id)?;
        let r = verify_construction(&case)?;
        println!(
            "{}: {} -> power of size {}: g {:?}, h {:?}",
            case.name, case.target, r.power_size, r.g, r.h
        );
    }
    Ok(())
}
