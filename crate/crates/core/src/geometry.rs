//! Polar grids on the half-disk and explicit conformal map families.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigenbasis::{f_eval, ModeIndex};
use crate::error::{Error, Result};

/// Log-spaced radii on `[ε, R]` times uniform angles on `[0, π]`.
///
/// Radial node `i` is `ε (R/ε)^{i/(Nr-1)}`, so in `s = ln r` the grid is
/// uniform with step [`PolarGrid::log_step`].
#[derive(Debug, Clone, PartialEq)]
pub struct PolarGrid {
    r_outer: f64,
    epsilon: f64,
    radii: Vec<f64>,
    angles: Vec<f64>,
    radial_weights: Vec<f64>,
    angular_weights: Vec<f64>,
    log_step: f64,
}

pub const MIN_NR: usize = 8;
pub const MIN_M: usize = 9;

impl PolarGrid {
    pub fn new(r_outer: f64, epsilon: f64, nr: usize, m: usize) -> Result<Self> {
        if !(r_outer.is_finite() && r_outer > 0.0) {
            return Err(Error::InvalidGrid(format!("outer radius {r_outer} must be positive")));
        }
        if !(epsilon > 0.0 && epsilon < r_outer) {
            return Err(Error::InvalidGrid(format!(
                "excision radius {epsilon} must lie in (0, {r_outer})"
            )));
        }
        if nr < MIN_NR || m < MIN_M {
            return Err(Error::InvalidGrid(format!(
                "need Nr >= {MIN_NR} and M >= {MIN_M}, got Nr = {nr}, M = {m}"
            )));
        }
        let span = (r_outer / epsilon).ln();
        let log_step = span / (nr - 1) as f64;
        let mut radii: Vec<f64> = (0..nr)
            .map(|i| epsilon * (span * i as f64 / (nr - 1) as f64).exp())
            .collect();
        radii[0] = epsilon;
        radii[nr - 1] = r_outer;

        let mut radial_weights = vec![0.0; nr];
        for i in 0..nr - 1 {
            let w = 0.5 * (radii[i + 1] - radii[i]);
            radial_weights[i] += w;
            radial_weights[i + 1] += w;
        }

        let dt = PI / (m - 1) as f64;
        let mut angles: Vec<f64> = (0..m).map(|j| j as f64 * dt).collect();
        angles[m - 1] = PI;
        let mut angular_weights = vec![dt; m];
        angular_weights[0] = 0.5 * dt;
        angular_weights[m - 1] = 0.5 * dt;

        Ok(PolarGrid {
            r_outer,
            epsilon,
            radii,
            angles,
            radial_weights,
            angular_weights,
            log_step,
        })
    }

    /// Grid with `(Nr-1)·2^levels + 1` radii and `(M-1)·2^levels + 1` angles.
    pub fn refined(&self, levels: u32) -> Result<Self> {
        let f = 1usize << levels;
        PolarGrid::new(
            self.r_outer,
            self.epsilon,
            (self.nr() - 1) * f + 1,
            (self.m() - 1) * f + 1,
        )
    }

    pub fn r_outer(&self) -> f64 {
        self.r_outer
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn nr(&self) -> usize {
        self.radii.len()
    }

    pub fn m(&self) -> usize {
        self.angles.len()
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    /// Trapezoid weights for `∫_ε^R f(r) dr`.
    pub fn radial_weights(&self) -> &[f64] {
        &self.radial_weights
    }

    /// Trapezoid weights for `∫_0^π f(t) dt`.
    pub fn angular_weights(&self) -> &[f64] {
        &self.angular_weights
    }

    /// Uniform step in `ln r`.
    pub fn log_step(&self) -> f64 {
        self.log_step
    }

    pub fn angle_step(&self) -> f64 {
        PI / (self.m() - 1) as f64
    }

    /// Position of `r` in index units (node `i` sits at `i`).
    pub fn fractional_index(&self, r: f64) -> Result<f64> {
        self.check_radius(r)?;
        let u = (r / self.epsilon).ln() / self.log_step;
        Ok(u.clamp(0.0, (self.nr() - 1) as f64))
    }

    pub fn check_radius(&self, r: f64) -> Result<()> {
        // one part in 1e12 of slack so that node values pass
        let tol = 1e-12;
        if !(r >= self.epsilon * (1.0 - tol) && r <= self.r_outer * (1.0 + tol)) {
            return Err(Error::RadiusOutOfRange {
                r,
                lo: self.epsilon,
                hi: self.r_outer,
            });
        }
        Ok(())
    }

    /// Index of the node nearest to `r` (in log distance).
    pub fn nearest_index(&self, r: f64) -> Result<usize> {
        Ok(self.fractional_index(r)?.round() as usize)
    }

    /// Trapezoid rule over the angular nodes.
    pub fn integrate_angle(&self, f: &[f64]) -> f64 {
        f.iter().zip(&self.angular_weights).map(|(a, w)| a * w).sum()
    }
}

/// Map families `φ` with `φ(0) = 0` and `φ'(0) = α > 0`.
///
/// With `P(z) = z + c z²` the families are `α z`, `α P(z)` and
/// `α P(z) / (1 + b P(z))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ConformalMapSpec {
    Identity {
        #[serde(default = "one")]
        alpha: f64,
    },
    Polynomial {
        #[serde(default = "one")]
        alpha: f64,
        c: Complex64,
    },
    Mobius {
        #[serde(default = "one")]
        alpha: f64,
        #[serde(default)]
        c: Complex64,
        b: Complex64,
    },
}

fn one() -> f64 {
    1.0
}

impl ConformalMapSpec {
    pub fn identity() -> Self {
        ConformalMapSpec::Identity { alpha: 1.0 }
    }

    pub fn alpha(&self) -> f64 {
        match *self {
            ConformalMapSpec::Identity { alpha }
            | ConformalMapSpec::Polynomial { alpha, .. }
            | ConformalMapSpec::Mobius { alpha, .. } => alpha,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let a = self.alpha();
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidInput(format!("map derivative at 0 must be positive, got {a}")));
        }
        Ok(())
    }

    /// Radius of the disk on which the map is defined with nonvanishing derivative.
    pub fn validity_radius(&self) -> f64 {
        let crit = |c: Complex64| {
            if c.norm() == 0.0 {
                f64::INFINITY
            } else {
                0.5 / c.norm()
            }
        };
        match *self {
            ConformalMapSpec::Identity { .. } => f64::INFINITY,
            ConformalMapSpec::Polynomial { c, .. } => crit(c),
            ConformalMapSpec::Mobius { c, b, .. } => {
                let (cn, bn) = (c.norm(), b.norm());
                // |P(z)| <= |z| + |c||z|^2 stays below 1/|b| inside this radius
                let pole = if bn == 0.0 {
                    f64::INFINITY
                } else if cn == 0.0 {
                    1.0 / bn
                } else {
                    (-1.0 + (1.0 + 4.0 * cn / bn).sqrt()) / (2.0 * cn)
                };
                crit(c).min(pole)
            }
        }
    }

    /// `φ(z)` and `φ'(z)`.
    pub fn evaluate(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        let rad = self.validity_radius();
        if !(z.norm() < rad) {
            return Err(Error::OutsideMapDomain {
                re: z.re,
                im: z.im,
                radius: rad,
            });
        }
        Ok(self.eval_unchecked(z))
    }

    fn eval_unchecked(&self, z: Complex64) -> (Complex64, Complex64) {
        match *self {
            ConformalMapSpec::Identity { alpha } => (z * alpha, Complex64::new(alpha, 0.0)),
            ConformalMapSpec::Polynomial { alpha, c } => {
                ((z + c * z * z) * alpha, (1.0 + 2.0 * c * z) * alpha)
            }
            ConformalMapSpec::Mobius { alpha, c, b } => {
                let p = z + c * z * z;
                let dp = 1.0 + 2.0 * c * z;
                let den = 1.0 + b * p;
                (p / den * alpha, dp / (den * den) * alpha)
            }
        }
    }
}

/// Evaluates `map` at `z`; see [`ConformalMapSpec::evaluate`].
pub fn map_evaluate(map: &ConformalMapSpec, z: Complex64) -> Result<(Complex64, Complex64)> {
    map.evaluate(z)
}

/// Largest Cauchy-Riemann defect `|∂_y f − i ∂_x f|` over the grid nodes,
/// with central differences of step `r·h` at a node of radius `r`.
pub fn conformality_residual_of<F: Fn(Complex64) -> Complex64>(f: F, grid: &PolarGrid) -> f64 {
    let h = grid.log_step();
    let mut worst: f64 = 0.0;
    for &r in grid.radii() {
        let d = r * h;
        for &t in grid.angles() {
            let z = Complex64::from_polar(r, t);
            let fx = (f(z + d) - f(z - d)) / (2.0 * d);
            let iy = Complex64::new(0.0, d);
            let fy = (f(z + iy) - f(z - iy)) / (2.0 * d);
            worst = worst.max((fy - Complex64::i() * fx).norm());
        }
    }
    worst
}

pub fn conformality_residual(map: &ConformalMapSpec, grid: &PolarGrid) -> Result<f64> {
    map.validate()?;
    let reach = grid.r_outer() * (1.0 + 2.0 * grid.log_step());
    if !(reach < map.validity_radius()) {
        return Err(Error::OutsideMapDomain {
            re: reach,
            im: 0.0,
            radius: map.validity_radius(),
        });
    }
    Ok(conformality_residual_of(|z| map.eval_unchecked(z).0, grid))
}

/// Leading-order pullback `β F_{k0}(φ(z))` of a junction profile.
pub fn pullback_leading(map: &ConformalMapSpec, beta: f64, k0: ModeIndex, z: Complex64) -> Result<f64> {
    let (w, _) = map.evaluate(z)?;
    let t = w.arg();
    if !(-1e-12..=PI + 1e-12).contains(&t) {
        return Err(Error::InvalidInput(format!(
            "image {w} of {z} leaves the closed upper half-plane"
        )));
    }
    Ok(beta * f_eval(k0, w.norm(), t.clamp(0.0, PI)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rejects_bad_parameters() {
        assert!(PolarGrid::new(1.0, 1e-4, 2, 2).is_err());
        assert!(PolarGrid::new(1.0, 1.0, 16, 16).is_err());
        assert!(PolarGrid::new(1.0, 0.0, 16, 16).is_err());
        assert!(PolarGrid::new(1.0, 1e-4, 7, 9).is_err());
        assert!(PolarGrid::new(1.0, 1e-4, 8, 8).is_err());
    }

    #[test]
    fn three_point_example() {
        // Nr = 3 is below the working minimum, so check the formula on 9 nodes
        // whose every fourth node reproduces (0.01, 0.1, 1).
        let g = PolarGrid::new(1.0, 0.01, 9, 9).unwrap();
        assert_relative_eq!(g.radii()[0], 0.01);
        assert_relative_eq!(g.radii()[4], 0.1, max_relative = 1e-14);
        assert_eq!(g.radii()[8], 1.0);
    }

    #[test]
    fn endpoints_exact() {
        let g = PolarGrid::new(2.0, 2e-4, 100, 33).unwrap();
        assert_eq!(g.radii()[0], 2e-4);
        assert_eq!(g.radii()[99], 2.0);
        assert_eq!(g.angles()[0], 0.0);
        assert_eq!(g.angles()[32], PI);
    }

    #[test]
    fn log_spacing_and_weights() {
        let g = PolarGrid::new(1.0, 1e-4, 512, 257).unwrap();
        let q0 = g.radii()[1] / g.radii()[0];
        for w in g.radii().windows(2) {
            assert!((w[1] / w[0] - q0).abs() < 1e-12);
        }
        assert!(g.radial_weights().iter().all(|&w| w > 0.0));
        assert!(g.angular_weights().iter().all(|&w| w > 0.0));
        assert_relative_eq!(g.angular_weights().iter().sum::<f64>(), PI, max_relative = 1e-14);
        let rsum: f64 = g.radial_weights().iter().sum();
        assert_relative_eq!(rsum, 1.0 - 1e-4, max_relative = 1e-13);
    }

    #[test]
    fn trapezoid_on_cos_squared() {
        for m in [9, 17, 65] {
            let g = PolarGrid::new(1.0, 0.1, 8, m).unwrap();
            let f: Vec<f64> = g.angles().iter().map(|t| (t / 2.0).cos().powi(2)).collect();
            // periodic-type integrand: trapezoid is exact here, well inside O(M^-2)
            assert!((g.integrate_angle(&f) - PI / 2.0).abs() < 1e-14);
            let ones = vec![1.0; m];
            assert_relative_eq!(g.integrate_angle(&ones), PI, max_relative = 1e-15);
        }
    }

    #[test]
    fn refinement_halves_steps() {
        let g = PolarGrid::new(1.0, 1e-3, 65, 17).unwrap();
        let f = g.refined(1).unwrap();
        assert_eq!((f.nr(), f.m()), (129, 33));
        assert_relative_eq!(f.log_step() * 2.0, g.log_step(), max_relative = 1e-14);
        for i in 0..g.nr() {
            assert_relative_eq!(f.radii()[2 * i], g.radii()[i], max_relative = 1e-13);
        }
    }

    #[test]
    fn map_examples() {
        let id = ConformalMapSpec::identity();
        let z = Complex64::new(0.3, 0.1);
        assert_eq!(id.evaluate(z).unwrap(), (z, Complex64::new(1.0, 0.0)));

        let poly = ConformalMapSpec::Polynomial {
            alpha: 1.0,
            c: Complex64::new(0.1, 0.0),
        };
        let (w, dw) = poly.evaluate(Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!((w, dw), (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)));
        let (w, dw) = poly.evaluate(Complex64::new(1.0, 0.0)).unwrap();
        assert_relative_eq!(w.re, 1.1, max_relative = 1e-15);
        assert_relative_eq!(dw.re, 1.2, max_relative = 1e-15);
        assert_eq!((w.im, dw.im), (0.0, 0.0));
        assert!(poly.evaluate(Complex64::new(5.0, 0.0)).is_err());
    }

    #[test]
    fn maps_fix_origin_with_real_derivative() {
        let maps = [
            ConformalMapSpec::Identity { alpha: 2.5 },
            ConformalMapSpec::Polynomial {
                alpha: 0.7,
                c: Complex64::new(0.2, -0.3),
            },
            ConformalMapSpec::Mobius {
                alpha: 1.3,
                c: Complex64::new(0.1, 0.0),
                b: Complex64::new(0.0, 0.5),
            },
        ];
        for m in maps {
            let (w, dw) = m.evaluate(Complex64::new(0.0, 0.0)).unwrap();
            assert_eq!(w.norm(), 0.0);
            assert_eq!(dw.im, 0.0);
            assert_eq!(dw.re, m.alpha());
        }
    }

    #[test]
    fn mobius_derivative_matches_differences() {
        let m = ConformalMapSpec::Mobius {
            alpha: 1.0,
            c: Complex64::new(0.1, 0.05),
            b: Complex64::new(0.3, 0.0),
        };
        let z = Complex64::new(0.4, 0.3);
        let d = 1e-5;
        let fd = (m.evaluate(z + d).unwrap().0 - m.evaluate(z - d).unwrap().0) / (2.0 * d);
        assert!((fd - m.evaluate(z).unwrap().1).norm() < 1e-9);
    }

    #[test]
    fn conformality_examples() {
        let g = PolarGrid::new(1.0, 1e-3, 33, 17).unwrap();
        let id = conformality_residual(&ConformalMapSpec::identity(), &g).unwrap();
        assert!(id < 1e-13, "{id}");
        // central differences are exact on quadratics, so the polynomial family
        // sits at round-off as well
        let poly = ConformalMapSpec::Polynomial {
            alpha: 1.0,
            c: Complex64::new(0.1, 0.0),
        };
        assert!(conformality_residual(&poly, &g).unwrap() < 1e-12);
        let conj = conformality_residual_of(|z| z.conj(), &g);
        assert!((conj - 2.0).abs() < 1e-12, "{conj}");
    }

    #[test]
    fn conformality_converges_for_mobius() {
        let m = ConformalMapSpec::Mobius {
            alpha: 1.0,
            c: Complex64::new(0.1, 0.0),
            b: Complex64::new(0.3, 0.0),
        };
        let g = PolarGrid::new(1.0, 1e-2, 17, 9).unwrap();
        let r0 = conformality_residual(&m, &g).unwrap();
        let r1 = conformality_residual(&m, &g.refined(1).unwrap()).unwrap();
        let r2 = conformality_residual(&m, &g.refined(2).unwrap()).unwrap();
        assert!(r0 > 1e-6);
        for ratio in [r0 / r1, r1 / r2] {
            assert!((ratio - 4.0).abs() < 0.4, "{ratio}");
        }
    }

    #[test]
    fn map_outside_grid_reach_rejected() {
        let poly = ConformalMapSpec::Polynomial {
            alpha: 1.0,
            c: Complex64::new(1.0, 0.0),
        };
        let g = PolarGrid::new(1.0, 1e-3, 16, 9).unwrap();
        assert!(conformality_residual(&poly, &g).is_err());
    }

    #[test]
    fn pullback_carries_alpha_to_the_half_power() {
        let m = ConformalMapSpec::Identity { alpha: 4.0 };
        for t in [0.0, 1.0, 2.5] {
            let z = Complex64::from_polar(0.01, t);
            let u = pullback_leading(&m, 1.0, ModeIndex::new(1).unwrap(), z).unwrap();
            assert_relative_eq!(u / 0.01f64.sqrt(), 2.0 * (t / 2.0).cos(), max_relative = 1e-13);
        }
    }
}
