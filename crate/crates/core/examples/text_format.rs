//! Writes a structure with an operation to the text format and reads it back.

use clonelab::textfmt::{parse_text, write_text};
use clonelab::{catalog, Result};

fn main() -> Result<()> {
    let s = catalog::structure("D")?;
    let plus = catalog::operation("plus")?;
    let text = write_text(&s, &[("plus".into(), plus.clone())]);
    print!("{text}");
    let back = parse_text(&text)?;
    assert_eq!(back.structure, s);
    println!("plus preserves every relation: {}", back.structure.relations().all(|(_, r)| plus.preserves(r).is_ok_and(|p| p.holds())));
    Ok(())
}
