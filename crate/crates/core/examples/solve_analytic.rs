//! Solve the unperturbed problem with arc data psi_k and compare against the
//! homogeneous solution r^gamma psi_k, on two grids.

use junction_lab::eigenbasis::{f_eval, ModeIndex};
use junction_lab::geometry::PolarGrid;
use junction_lab::solver::{solve_mixed_bvp, ArcData, CoefficientData};

fn main() -> junction_lab::Result<()> {
    for n in 1..=3 {
        let k = ModeIndex::new(n)?;
        let mut errs = Vec::new();
        for nr in [256, 512] {
            let grid = PolarGrid::new(1.0, 1e-4, nr, 257)?;
            let sol = solve_mixed_bvp(&CoefficientData::zero(), &ArcData::single(k, 1.0), &grid, 16)?;
            let mut err: f64 = 0.0;
            for (i, &r) in grid.radii().iter().enumerate() {
                for (j, &t) in grid.angles().iter().enumerate() {
                    err = err.max((sol.field.values()[[i, j]] - f_eval(k, r, t)).abs());
                }
            }
            errs.push(err);
        }
        println!("k={n}: max error {:.3e} -> {:.3e}, ratio {:.2}", errs[0], errs[1], errs[0] / errs[1]);
    }
    Ok(())
}
