//! Geometric consistency of the logarithmic example: the potential is
//! harmonic, vanishes on the Dirichlet curve, and the traced curve carries
//! no normal flux.

use junction_lab::counterexample::{
    gamma_plus, gamma_plus_deformed, grad_u, h_plus, h_plus_deformed, identity_residual, identity_residual_deformed,
    jacobian_at_origin, stima_ratio, trace_gamma_minus, u_log_complex, u_log_xy, v_field, FIELD_RADIUS,
};

fn laplacian(x1: f64, x2: f64) -> f64 {
    let h = 1e-3 * x1.hypot(x2);
    let u = u_log_complex;
    (u(x1 + h, x2) + u(x1 - h, x2) + u(x1, x2 + h) + u(x1, x2 - h) - 4.0 * u(x1, x2)) / (h * h)
}

#[test]
fn potential_is_harmonic_off_the_origin() {
    for &(x1, x2) in &[(0.1, 0.05), (-0.2, 0.1), (0.01, -0.02), (-0.05, -0.3)] {
        let scale = grad_u(x1, x2)[0].hypot(grad_u(x1, x2)[1]) / x1.hypot(x2);
        assert!(laplacian(x1, x2).abs() < 1e-4 * scale, "({x1}, {x2}) {}", laplacian(x1, x2));
    }
}

#[test]
fn polar_and_complex_forms_agree() {
    for &(x1, x2) in &[(0.1, 0.05), (-0.2, 0.1), (0.3, -0.01)] {
        let a = u_log_xy(x1, x2).unwrap();
        let b = u_log_complex(x1, x2);
        assert!((a - b).abs() < 1e-12 * (1.0 + a.abs()), "{a} {b}");
    }
}

#[test]
fn dirichlet_curves_are_zero_sets() {
    let gp = gamma_plus(200).unwrap();
    assert!(gp.points_distinct() && gp.is_graph());
    for p in gp.points.iter().filter(|p| p[0].hypot(p[1]) > 0.0) {
        let scale = p[0].hypot(p[1]).powi(2);
        assert!(u_log_complex(p[0], p[1]).abs() <= 1e-10 * scale, "{p:?}");
    }
    let gd = gamma_plus_deformed(200).unwrap();
    assert!(gd.points_distinct() && gd.is_graph());
}

#[test]
fn graph_parametrizations_agree_with_the_identity() {
    for x1 in [2e-3, 1e-4, 1e-6, 1e-8] {
        let h = h_plus(x1).unwrap();
        assert!(h < 0.0 && identity_residual(x1, h).abs() < 1e-9);
        let g = h_plus_deformed(x1).unwrap();
        assert!(g < 0.0 && identity_residual_deformed(x1, g).abs() < 1e-9);
    }
}

#[test]
fn neumann_curve_follows_the_field_into_the_origin() {
    let gm = trace_gamma_minus(0.02, 0.01, 2000).unwrap();
    assert!(!gm.diverged);
    assert!(gm.terminal_distance < 1e-6);
    assert!(gm.points.iter().all(|p| p[0].hypot(p[1]) < FIELD_RADIUS));
    // tangents are parallel to V, so the normal derivative vanishes
    for (p, t) in gm.points.iter().zip(&gm.tangents).step_by(50) {
        if p[0].hypot(p[1]) < 1e-8 {
            continue;
        }
        let v = v_field(p[0], p[1]).unwrap();
        let cross = (v[0] * t[1] - v[1] * t[0]).abs() / v[0].hypot(v[1]);
        assert!(cross < 5e-2, "{p:?} {cross}");
    }
    // the curve enters along the stable eigendirection of the swap matrix
    let j = jacobian_at_origin().unwrap();
    let last = gm.points[gm.points.len() / 2];
    let dir = [last[0] / last[0].hypot(last[1]), last[1] / last[0].hypot(last[1])];
    let stable = j.eigenvectors[0];
    assert!((dir[0] * stable[0] + dir[1] * stable[1]).abs() > 0.9, "{dir:?} {stable:?}");
}

#[test]
fn ratio_errors_shrink_towards_the_limit() {
    let xs = [1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8];
    let lim = -std::f64::consts::FRAC_PI_4;
    let errs: Vec<f64> = stima_ratio(&xs).unwrap().iter().map(|(_, v)| (v / lim - 1.0).abs()).collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
}
