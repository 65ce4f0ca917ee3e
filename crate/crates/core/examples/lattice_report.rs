//! Re-derives the separation table of the atoms and prints it as TSV.

use clonelab::corpus::load_corpus;
use clonelab::report::{lattice_report, Figure, ReportOptions};
use clonelab::Result;

fn main() -> Result<()> {
    let corpus = load_corpus()?;
    let r = lattice_report(&corpus, &ReportOptions::new(Figure::Atoms))?;
    print!("{}", r.to_tsv());
    println!("exit code {}", r.exit_code());
    Ok(())
}
