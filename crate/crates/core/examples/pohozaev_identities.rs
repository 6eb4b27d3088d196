//! Residuals of the two integral identities under grid refinement.

use junction_lab::eigenbasis::ModeIndex;
use junction_lab::geometry::PolarGrid;
use junction_lab::solver::{pohozaev_residual, solve_mixed_bvp, ArcData, CoefficientData, ScalarFn};

fn main() -> junction_lab::Result<()> {
    let mut prev: Option<f64> = None;
    for nr in [129, 257, 513, 1025] {
        let grid = PolarGrid::new(1.0, 1e-4, nr, 129)?;
        let coeff = CoefficientData::new(ScalarFn::parse("1 + 0.5*r*cos(t)")?, ScalarFn::parse("0.3")?, &grid)?;
        let sol = solve_mixed_bvp(&coeff, &ArcData::single(ModeIndex::new(1)?, 1.0), &grid, 8)?;
        let res = pohozaev_residual(&sol.field, &coeff, 0.5)?;
        let ratio = prev.map(|p| p / res.max());
        println!("Nr={nr:5}: res1={:.3e} res2={:.3e} ratio={:?}", res.res1, res.res2, ratio);
        prev = Some(res.max());
    }
    Ok(())
}
