//! Regenerates the committed fixture workbooks. Run from anywhere:
//!
//! ```text
//! cargo run -p clearsheet-fixtures --bin fixgen [-- <out-dir>]
//! ```

use std::path::PathBuf;

fn main() -> std::io::Result<()> {
    let out = match std::env::args_os().nth(1) {
        Some(dir) => PathBuf::from(dir),
        None => PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../clearsheet/tests/fixtures"),
    };
    clearsheet_fixtures::write_all(&out)?;
    println!("wrote {} fixtures to {}", clearsheet_fixtures::all().len(), out.display());
    Ok(())
}
