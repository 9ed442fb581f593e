//! Writes D_θ of a small sector in Matrix Market format and reads it back.

use std::io::Cursor;

use crspin::io::{read_matrix_market, write_matrix_market};
use crspin::models::{heisenberg_model, TruncationSpec};
use crspin::operators::{assemble_kohn_dirac, SectionSpace};

fn main() -> crspin::Result<()> {
    let model = heisenberg_model(1, 1, TruncationSpec::new(1, 3))?;
    let d = assemble_kohn_dirac(&SectionSpace::new(&model)?)?;
    let mut buf = Vec::new();
    write_matrix_market(&mut buf, &d.matrix, "D_theta, heisenberg m=1 k=1")?;
    print!("{}", String::from_utf8_lossy(&buf));
    let back = read_matrix_market(Cursor::new(buf))?;
    println!("round trip exact: {}", back == d.matrix);
    Ok(())
}
