//! Angular eigenbasis: project a field onto modes and check Parseval.

use junction_lab::eigenbasis::{angular_project, parseval_h, project_sk, ModeIndex};
use junction_lab::geometry::PolarGrid;
use junction_lab::solver::ScalarField;

fn main() -> junction_lab::Result<()> {
    let grid = PolarGrid::new(1.0, 1e-4, 256, 129)?;
    let k = |n| ModeIndex::new(n);
    let field = ScalarField::mode_mixture(&grid, 6, &[(k(1)?, 1.0), (k(3)?, -0.5)])?;
    for n in 1..=4 {
        let m = k(n)?;
        println!(
            "k={n} gamma={:.1} phi_k(0.5)={:+.6}",
            m.gamma(),
            angular_project(&field, 0.5, m)?
        );
    }
    let (h, sum) = parseval_h(&field, 0.5, 6)?;
    println!("H(0.5) = {h:.10}, modal sum = {sum:.10}");
    let c = project_sk(&field, 0.25, k(3)?)?;
    println!("S_3 projection on B_0.25: {:?}", c.a);
    Ok(())
}
