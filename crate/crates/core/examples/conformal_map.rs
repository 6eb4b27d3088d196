//! Straighten a curved junction with a conformal map and check conformality.

use junction_lab::eigenbasis::ModeIndex;
use junction_lab::geometry::{conformality_residual, map_evaluate, pullback_leading, ConformalMapSpec, PolarGrid};
use num_complex::Complex64;

fn main() -> junction_lab::Result<()> {
    let map = ConformalMapSpec::Mobius {
        alpha: 1.0,
        c: Complex64::new(0.0, 0.0),
        b: Complex64::new(0.3, 0.1),
    };
    map.validate()?;
    println!("validity radius {:.4}", map.validity_radius());
    let z = Complex64::new(0.05, 0.02);
    let (w, dw) = map_evaluate(&map, z)?;
    println!("phi({z}) = {w:.6}, phi'({z}) = {dw:.6}");
    for nr in [64, 128, 256] {
        let grid = PolarGrid::new(0.5, 1e-3, nr, 65)?;
        println!("Nr = {nr:4}: Cauchy-Riemann defect {:.3e}", conformality_residual(&map, &grid)?);
    }
    let k1 = ModeIndex::new(1)?;
    println!("leading profile at z: {:.6}", pullback_leading(&map, 2.0, k1, z)?);
    Ok(())
}
