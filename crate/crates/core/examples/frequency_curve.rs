//! The frequency function of a solved perturbed field: N(r), the plateau
//! estimate of gamma and the derivative identity H' = 2D/r.

use junction_lab::almgren::{check_Hprime, extract_gamma, frequency_curve, grid_radii, growth_bounds};
use junction_lab::eigenbasis::ModeIndex;
use junction_lab::geometry::PolarGrid;
use junction_lab::solver::{solve_mixed_bvp, valid_radius, ArcData, CoefficientData};

fn main() -> junction_lab::Result<()> {
    let grid = PolarGrid::new(0.4, 0.4e-4, 512, 257)?;
    let coeff = CoefficientData::constants(0.5, 0.5);
    let sol = solve_mixed_bvp(&coeff, &ArcData::single(ModeIndex::new(1)?, 1.0), &grid, 16)?;
    let r0 = valid_radius(coeff.p_norm(), coeff.q_norm(), grid.r_outer())?;
    let curve = frequency_curve(&sol.field, &coeff, &grid_radii(&grid, r0))?;
    for i in (0..curve.len()).step_by(64) {
        println!("r={:.3e} H={:.6e} D={:.6e} N={:.6}", curve.radii[i], curve.h[i], curve.d[i], curve.n[i]);
    }
    let est = extract_gamma(&curve)?;
    println!("gamma={:.5} k0={} flatness={:.2e} accepted={}", est.gamma, est.k0, est.flatness, est.accepted);
    let fit = growth_bounds(&curve, est.gamma)?;
    println!("ln H slope {:.5} (2 gamma = {:.5})", fit.slope, 2.0 * est.gamma);
    println!("max relative residual of H' = 2D/r: {:.3e}", check_Hprime(&curve)?);
    Ok(())
}
