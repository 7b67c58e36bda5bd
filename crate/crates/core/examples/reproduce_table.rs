use lln::cli::{render, Format, Output};
use lln::reproduce::reproduce_rows;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rows = reproduce_rows()?;
    let failed = rows.iter().filter(|r| r.failed()).count();
    print!("{}", render(&Output::Rows(rows), Format::Table)?);
    println!("{failed} rows differ from their reference");
    Ok(())
}
