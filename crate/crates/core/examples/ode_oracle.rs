//! Rebuild each radial mode from its source term alone and compare with the
//! solved field.

use junction_lab::asymptotics::oracle_gap;
use junction_lab::eigenbasis::ModeIndex;
use junction_lab::geometry::PolarGrid;
use junction_lab::solver::{solve_mixed_bvp, ArcData, CoefficientData};

fn main() -> junction_lab::Result<()> {
    for (p, q) in [(1.0, 0.0), (0.0, 1.0), (0.5, 0.5)] {
        let coeff = CoefficientData::constants(p, q);
        for nr in [256, 512] {
            let grid = PolarGrid::new(0.4, 0.4e-4, nr, 257)?;
            let sol = solve_mixed_bvp(&coeff, &ArcData::single(ModeIndex::new(1)?, 1.0), &grid, 16)?;
            println!("p={p} q={q} Nr={nr}: max |oracle - direct| = {:.3e}", oracle_gap(&sol.field, &coeff)?);
        }
    }
    Ok(())
}
