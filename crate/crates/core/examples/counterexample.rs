//! The logarithmic example: ratio tables, the Jacobian at the origin, the
//! Neumann curve and the model comparison of H(r).

use junction_lab::counterexample::*;

fn main() -> junction_lab::Result<()> {
    let xs = [1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8];
    let lim1 = -std::f64::consts::PI / 4.0;
    let lim2 = -4.0 * std::f64::consts::PI / 9.0;
    let (a, b) = (stima_ratio(&xs)?, c1_deformation_ratio(&xs)?);
    for i in 0..xs.len() {
        println!(
            "x1={:.0e}: corner ratio {:.4} ({:+.1}%), deformed ratio {:.4} ({:+.1}%)",
            xs[i],
            a[i].1,
            100.0 * (a[i].1 / lim1 - 1.0),
            b[i].1,
            100.0 * (b[i].1 / lim2 - 1.0)
        );
    }
    let j = jacobian_at_origin()?;
    println!("DV(0) = {:?}, eigenvalues {:?}", j.matrix, j.eigenvalues);
    let gm = trace_gamma_minus(0.02, 0.01, 2000)?;
    println!(
        "Neumann curve: {} points, terminal distance {:.2e}, max normal-derivative ratio {:.2e}",
        gm.points.len(),
        gm.terminal_distance,
        neumann_residual(&gm)
    );
    let rep = log_model_fit(&u_log_arc_samples(&log_radii(1e-5, 1e-2, 40), &gm)?)?;
    println!(
        "power model a={:.4} residual {:.2e}; log model residual {:.2e}; ratio {:.1}",
        rep.power_exponent, rep.power_residual, rep.log_residual, rep.ratio
    );
    Ok(())
}
