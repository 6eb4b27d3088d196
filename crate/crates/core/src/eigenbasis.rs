//! Angular eigenpairs of the mixed problem on `[0, π]` (Neumann at 0,
//! Dirichlet at π), the homogeneous profiles `F_k`, and projections.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::RadialProfile;
use crate::solver::ScalarField;

/// A positive mode number `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct ModeIndex(u32);

impl ModeIndex {
    pub fn new(k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidInput("mode index must be >= 1".into()));
        }
        Ok(ModeIndex(k))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// Zero-based position in mode tables.
    pub fn slot(self) -> usize {
        self.0 as usize - 1
    }

    pub fn from_slot(slot: usize) -> Self {
        ModeIndex(slot as u32 + 1)
    }

    /// Homogeneity degree `(2k-1)/2`.
    pub fn gamma(self) -> f64 {
        gamma_k(self)
    }

    pub fn lambda(self) -> f64 {
        lambda_k(self)
    }
}

impl TryFrom<u32> for ModeIndex {
    type Error = Error;
    fn try_from(k: u32) -> Result<Self> {
        ModeIndex::new(k)
    }
}

impl From<ModeIndex> for u32 {
    fn from(k: ModeIndex) -> u32 {
        k.0
    }
}

impl fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn lambda_k(k: ModeIndex) -> f64 {
    let g = gamma_k(k);
    g * g
}

pub fn gamma_k(k: ModeIndex) -> f64 {
    (2 * k.0 - 1) as f64 / 2.0
}

/// `cos((2k-1) t / 2)`.
pub fn psi_eval(k: ModeIndex, t: f64) -> f64 {
    (gamma_k(k) * t).cos()
}

pub fn psi_prime(k: ModeIndex, t: f64) -> f64 {
    -gamma_k(k) * (gamma_k(k) * t).sin()
}

/// `r^{(2k-1)/2} cos((2k-1) t / 2)`.
pub fn f_eval(k: ModeIndex, r: f64, t: f64) -> f64 {
    r.powf(gamma_k(k)) * psi_eval(k, t)
}

/// `ψ_k(t_j)` for every angle and `k = 1..=k_max`, row-major by angle.
pub fn psi_table(angles: &[f64], k_max: usize) -> Vec<f64> {
    let mut tab = Vec::with_capacity(angles.len() * k_max);
    for &t in angles {
        for s in 0..k_max {
            tab.push(psi_eval(ModeIndex::from_slot(s), t));
        }
    }
    tab
}

/// Coefficients `a_1..a_{k_max}` of a projection onto `S_k` at radius `r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeCoefficients {
    pub k_max: usize,
    pub a: Vec<f64>,
    pub r: f64,
}

/// `(2/π) ∫ w(r,t) ψ_k(t) dt` by the trapezoid rule on the field's angles.
pub fn angular_project(field: &ScalarField, r: f64, k: ModeIndex) -> Result<f64> {
    let row = field.values_at(r)?;
    let g = field.grid();
    let vals: Vec<f64> = g
        .angles()
        .iter()
        .zip(&row)
        .map(|(&t, &w)| w * psi_eval(k, t))
        .collect();
    Ok(g.integrate_angle(&vals) / FRAC_PI_2)
}

/// `(H_direct, H_series)` at radius `r`.
pub fn parseval_h(field: &ScalarField, r: f64, k_max: usize) -> Result<(f64, f64)> {
    let row = field.values_at(r)?;
    let g = field.grid();
    let sq: Vec<f64> = row.iter().map(|w| w * w).collect();
    let direct = g.integrate_angle(&sq);
    let mut series = 0.0;
    for s in 0..k_max {
        let phi = angular_project(field, r, ModeIndex::from_slot(s))?;
        series += phi * phi;
    }
    Ok((direct, FRAC_PI_2 * series))
}

/// L² projection of the field onto `span{F_1..F_k}` over the half-ball of radius `r`.
pub fn project_sk(field: &ScalarField, r: f64, k: ModeIndex) -> Result<ModeCoefficients> {
    let prof = RadialProfile::new(field)?;
    project_sk_with(&prof, r, k)
}

pub fn project_sk_with(prof: &RadialProfile, r: f64, k: ModeIndex) -> Result<ModeCoefficients> {
    prof.grid().check_radius(r)?;
    let mut a = Vec::with_capacity(k.get() as usize);
    for s in 0..k.get() as usize {
        let g = ModeIndex::from_slot(s).gamma();
        // mode beyond the field's truncation has no content
        if s >= prof.k_max() {
            a.push(0.0);
            continue;
        }
        // <w, F_j> = (π/2) ∫_0^r φ_j ρ^{γ+1} dρ, integrated in ln ρ
        let integrand: Vec<f64> = (0..prof.len())
            .map(|i| {
                let rho = prof.radius(i);
                prof.phi(i, s) * rho.powf(g + 2.0)
            })
            .collect();
        // the norm goes through the same quadrature, so pure modes come back exactly
        let weight: Vec<f64> = (0..prof.len())
            .map(|i| prof.radius(i).powf(2.0 * g + 2.0))
            .collect();
        let inner = prof.at(&prof.cumulative(&integrand), r)?;
        let norm = prof.at(&prof.cumulative(&weight), r)?;
        a.push(inner / norm);
    }
    Ok(ModeCoefficients {
        k_max: k.get() as usize,
        a,
        r,
    })
}

/// Rayleigh quotient `∫ f'² / ∫ f²` of an angular profile sampled on a
/// uniform grid of `[0, π]`, by forward differences and the trapezoid rule.
pub fn rayleigh_quotient(samples: &[f64]) -> f64 {
    let m = samples.len();
    let dt = PI / (m - 1) as f64;
    let mut num = 0.0;
    for w in samples.windows(2) {
        num += ((w[1] - w[0]) / dt).powi(2) * dt;
    }
    let mut den = 0.0;
    for (j, v) in samples.iter().enumerate() {
        let wt = if j == 0 || j == m - 1 { 0.5 * dt } else { dt };
        den += v * v * wt;
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::PolarGrid;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn k(n: u32) -> ModeIndex {
        ModeIndex::new(n).unwrap()
    }

    fn grid() -> PolarGrid {
        PolarGrid::new(1.0, 1e-4, 256, 129).unwrap()
    }

    #[test]
    fn eigenvalues() {
        assert_eq!(lambda_k(k(1)), 0.25);
        assert_eq!(lambda_k(k(2)), 2.25);
        assert_eq!(lambda_k(k(10)), 90.25);
        assert!(ModeIndex::new(0).is_err());
    }

    #[test]
    fn eigenfunctions() {
        assert_eq!(psi_eval(k(1), 0.0), 1.0);
        assert!(psi_eval(k(1), PI).abs() < 1e-16);
        assert!(psi_eval(k(2), PI / 3.0).abs() < 1e-15);
        assert_eq!(psi_prime(k(3), 0.0), 0.0);
    }

    #[test]
    fn profiles() {
        assert_eq!(f_eval(k(1), 1.0, 0.0), 1.0);
        assert_relative_eq!(f_eval(k(1), 1.0, PI / 2.0), 0.5f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(f_eval(k(2), 4.0, 0.0), 8.0, max_relative = 1e-15);
    }

    #[test]
    fn projection_examples() {
        let g = grid();
        let f1 = ScalarField::mode_mixture(&g, 8, &[(k(1), 1.0)]).unwrap();
        assert_relative_eq!(angular_project(&f1, 0.5, k(1)).unwrap(), 0.5f64.sqrt(), max_relative = 1e-12);
        assert!(angular_project(&f1, 0.5, k(2)).unwrap().abs() < 1e-14);
        let f2 = ScalarField::mode_mixture(&g, 8, &[(k(2), 3.0)]).unwrap();
        assert_relative_eq!(angular_project(&f2, 1.0, k(2)).unwrap(), 3.0, max_relative = 1e-13);
        assert!(angular_project(&f2, 2.0, k(2)).is_err());
    }

    #[test]
    fn parseval_examples() {
        let g = grid();
        let f1 = ScalarField::mode_mixture(&g, 8, &[(k(1), 1.0)]).unwrap();
        let (d, s) = parseval_h(&f1, 1.0, 1).unwrap();
        assert_relative_eq!(d, FRAC_PI_2, max_relative = 1e-13);
        assert_relative_eq!(s, FRAC_PI_2, max_relative = 1e-13);
        let f12 = ScalarField::mode_mixture(&g, 8, &[(k(1), 1.0), (k(2), 1.0)]).unwrap();
        let (d, s) = parseval_h(&f12, 1.0, 2).unwrap();
        assert_relative_eq!(d, PI, max_relative = 1e-13);
        assert_relative_eq!(s, PI, max_relative = 1e-13);
        let f3 = ScalarField::mode_mixture(&g, 8, &[(k(3), 1.0)]).unwrap();
        let (d, s) = parseval_h(&f3, 1.0, 2).unwrap();
        assert!(s < 1e-25 && d > 1.5);
    }

    #[test]
    fn sk_projection_examples() {
        let g = grid();
        let f1 = ScalarField::mode_mixture(&g, 8, &[(k(1), 1.0)]).unwrap();
        let p = project_sk(&f1, 0.5, k(3)).unwrap();
        assert_relative_eq!(p.a[0], 1.0, max_relative = 1e-8);
        assert!(p.a[1].abs() < 1e-12 && p.a[2].abs() < 1e-12);

        let mix = ScalarField::mode_mixture(&g, 8, &[(k(1), 2.0), (k(2), -1.0)]).unwrap();
        let p = project_sk(&mix, 1.0, k(2)).unwrap();
        assert_relative_eq!(p.a[0], 2.0, max_relative = 1e-8);
        assert_relative_eq!(p.a[1], -1.0, max_relative = 1e-8);

        let f3 = ScalarField::mode_mixture(&g, 8, &[(k(3), 1.0)]).unwrap();
        let p = project_sk(&f3, 1.0, k(2)).unwrap();
        assert_eq!(p.a.len(), 2);
        assert!(p.a.iter().all(|a| a.abs() < 1e-12));
    }

    #[test]
    fn discrete_orthogonality() {
        let g = PolarGrid::new(1.0, 0.1, 8, 33).unwrap();
        for i in 1..=6 {
            for j in 1..=6 {
                let v: Vec<f64> = g.angles().iter().map(|&t| psi_eval(k(i), t) * psi_eval(k(j), t)).collect();
                let want = if i == j { FRAC_PI_2 } else { 0.0 };
                assert!((g.integrate_angle(&v) - want).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn eigen_residual_is_second_order() {
        let resid = |m: usize| {
            let dt = PI / (m - 1) as f64;
            let mut worst: f64 = 0.0;
            for j in 1..m - 1 {
                let t = j as f64 * dt;
                let d2 = (psi_eval(k(2), t + dt) - 2.0 * psi_eval(k(2), t) + psi_eval(k(2), t - dt)) / (dt * dt);
                worst = worst.max((d2 + lambda_k(k(2)) * psi_eval(k(2), t)).abs());
            }
            worst
        };
        let ratio = resid(33) / resid(65);
        assert!((ratio - 4.0).abs() < 0.1, "{ratio}");
    }

    #[test]
    fn profiles_are_discretely_harmonic() {
        let lap = |n: usize| {
            let g = PolarGrid::new(1.0, 0.01, n, n).unwrap();
            let h = g.log_step();
            let dt = g.angle_step();
            let mut worst: f64 = 0.0;
            for i in 1..n - 1 {
                for j in 1..n - 1 {
                    let (r, t) = (g.radii()[i], g.angles()[j]);
                    let f = |i: usize, j: usize| f_eval(k(2), g.radii()[i], g.angles()[j]);
                    // r² Δ = ∂_ss + ∂_tt in s = ln r
                    let v = (f(i + 1, j) - 2.0 * f(i, j) + f(i - 1, j)) / (h * h)
                        + (f(i, j + 1) - 2.0 * f(i, j) + f(i, j - 1)) / (dt * dt);
                    worst = worst.max((v / r.powf(1.5)).abs());
                    let _ = t;
                }
            }
            worst
        };
        let ratio = lap(33) / lap(65);
        assert!((ratio - 4.0).abs() < 0.3, "{ratio}");
        // Dirichlet edge exact, Neumann edge derivative second order
        let g = PolarGrid::new(1.0, 0.01, 33, 33).unwrap();
        let dt = g.angle_step();
        assert!(ScalarField::mode_mixture(&g, 4, &[(k(2), 1.0)]).unwrap().values().column(32).iter().all(|&v| v == 0.0));
        let d0 = (f_eval(k(2), 0.5, dt) - f_eval(k(2), 0.5, 0.0)) / dt;
        assert!(d0.abs() < 2.0 * dt);
    }

    #[test]
    fn sk_projection_is_idempotent() {
        let g = PolarGrid::new(1.0, 1e-3, 128, 33).unwrap();
        let mix = ScalarField::mode_mixture(&g, 6, &[(k(1), 0.3), (k(2), -1.2), (k(3), 0.7)]).unwrap();
        let p = project_sk(&mix, 0.8, k(3)).unwrap();
        let again = ScalarField::mode_mixture(
            &g,
            6,
            &[(k(1), p.a[0]), (k(2), p.a[1]), (k(3), p.a[2])],
        )
        .unwrap();
        let q = project_sk(&again, 0.8, k(3)).unwrap();
        for (x, y) in p.a.iter().zip(&q.a) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    proptest! {
        #[test]
        fn rayleigh_bounded_below(coef in proptest::collection::vec(-1.0f64..1.0, 1..6), m in 65usize..200) {
            // profiles vanishing at π, including ones with no Neumann condition at 0
            let dt = PI / (m - 1) as f64;
            let f: Vec<f64> = (0..m).map(|j| {
                let t = j as f64 * dt;
                let poly: f64 = coef.iter().enumerate().map(|(n, c)| c * t.powi(n as i32)).sum();
                (PI - t) * (1.0 + 0.1 * poly)
            }).collect();
            prop_assert!(rayleigh_quotient(&f) >= 0.25 - 2.0 / (m * m) as f64);
        }

        #[test]
        fn sk_residual_orthogonal(c in proptest::collection::vec(-1.0f64..1.0, 4), r in 0.05f64..1.0) {
            let g = PolarGrid::new(1.0, 1e-3, 128, 33).unwrap();
            let terms: Vec<(ModeIndex, f64)> = c.iter().enumerate().map(|(i, &v)| (ModeIndex::from_slot(i), v)).collect();
            let f = ScalarField::mode_mixture(&g, 6, &terms).unwrap();
            let p = project_sk(&f, r, k(2)).unwrap();
            prop_assert!((p.a[0] - c[0]).abs() < 1e-8);
            prop_assert!((p.a[1] - c[1]).abs() < 1e-8);
        }
    }
}
