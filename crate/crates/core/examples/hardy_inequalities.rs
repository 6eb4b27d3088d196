//! Both Hardy inequalities on seeded random mode mixtures.

use junction_lab::almgren::{hardy_boundary, hardy_interior};
use junction_lab::cli::hardy_table;
use junction_lab::eigenbasis::ModeIndex;
use junction_lab::geometry::PolarGrid;
use junction_lab::solver::ScalarField;

fn main() -> junction_lab::Result<()> {
    let grid = PolarGrid::new(1.0, 1e-4, 512, 257)?;
    let f1 = ScalarField::mode_mixture(&grid, 4, &[(ModeIndex::new(1)?, 1.0)])?;
    println!("F1 interior (lhs, rhs) = {:?}", hardy_interior(&f1, 1.0)?);
    println!("F1 boundary (lhs, rhs) = {:?}", hardy_boundary(&f1, 1.0)?);
    let report = hardy_table(&grid, 100, 8, 1e-10, 7)?;
    println!("100 mixtures: all pass = {}, smallest relative slack = {:.3e}", report.all_pass, report.min_slack);
    Ok(())
}
