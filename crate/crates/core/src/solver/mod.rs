//! Galerkin in angle, finite differences in `s = ln r`.
//!
//! Expanding `w = Σ φ_k(r) ψ_k(t)` and testing the weak form against
//! `η(r) ψ_k(t)` gives, per mode and in `s = ln r`,
//!
//! ```text
//! -φ_k'' + λ_k φ_k = r² ζ_k,   ζ_k = (2/(π r)) q w(r,0) + (2/π) ∫ p w ψ_k dt
//! ```
//!
//! with `w(r,0) = Σ_j φ_j(r)` coupling every mode through `q`, and the
//! angular quadrature of `p w ψ_k` coupling them through `p`. The outer arc
//! carries Dirichlet data `φ_k(R) = ĝ_k`; at `r = ε` the closure
//! `dφ_k/ds = γ_k φ_k` selects the regular homogeneous branch.

mod coefficients;
mod field;
pub mod pohozaev;

use std::f64::consts::{FRAC_2_PI, PI};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

pub use coefficients::{ArcData, CoefficientData, ForwardData, ScalarFn};
pub use field::{Provenance, ScalarField};
pub use pohozaev::{pohozaev_from_energy, pohozaev_residual, PohozaevResidual};

use crate::eigenbasis::{psi_table, ModeIndex};
use crate::error::{Error, Result};
use crate::geometry::PolarGrid;
use crate::linalg::BandMatrix;

/// Radial discretization.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadialScheme {
    /// Three-point second difference and a second-order one-sided closure.
    #[default]
    SecondOrder,
    /// Numerov-type compact stencil with a fourth-order closure.
    Compact,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub scheme: RadialScheme,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub unknowns: usize,
    pub condition_estimate: f64,
    pub pivot_ratio: f64,
    pub valid_radius: f64,
    /// Pohozaev residuals at half the outer radius.
    pub pohozaev: Option<PohozaevResidual>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub field: ScalarField,
    pub report: SolveReport,
}

/// Largest radius `R₀ ≤ R` with `4‖p‖R₀² + π‖q‖R₀ < 1`, shrunk by 0.999.
pub fn valid_radius(p_norm: f64, q_norm: f64, r: f64) -> Result<f64> {
    if !(p_norm >= 0.0 && q_norm >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "norms must be non-negative, got {p_norm} and {q_norm}"
        )));
    }
    let root = if p_norm > 0.0 {
        (-PI * q_norm + (PI * PI * q_norm * q_norm + 16.0 * p_norm).sqrt()) / (8.0 * p_norm)
    } else if q_norm > 0.0 {
        1.0 / (PI * q_norm)
    } else {
        return Ok(r);
    };
    Ok((0.999 * root).min(r))
}

enum Rhs<'a> {
    Reaction(&'a CoefficientData),
    Load(&'a ForwardData),
}

/// Solves `-Δw = p w` in the half-disk, `∂_ν w = q w` on the Neumann
/// segment, `w = 0` on the Dirichlet segment, `w = g_arc` on the arc.
pub fn solve_mixed_bvp(coeff: &CoefficientData, arc: &ArcData, grid: &PolarGrid, k_max: usize) -> Result<Solution> {
    solve_with(coeff, arc, grid, k_max, SolverOptions::default())
}

pub fn solve_with(
    coeff: &CoefficientData,
    arc: &ArcData,
    grid: &PolarGrid,
    k_max: usize,
    opts: SolverOptions,
) -> Result<Solution> {
    let mut sol = assemble_and_solve(Rhs::Reaction(coeff), arc, grid, k_max, opts)?;
    let r0 = valid_radius(coeff.p_norm(), coeff.q_norm(), grid.r_outer())?;
    sol.report.valid_radius = r0;
    if r0 < grid.r_outer() {
        sol.report.warnings.push(format!(
            "outer radius {} exceeds the valid radius {r0:.6} for these coefficients",
            grid.r_outer()
        ));
    }
    let half = grid.r_outer() / 2.0;
    sol.report.pohozaev = pohozaev_residual(&sol.field, coeff, half).ok();
    Ok(sol)
}

/// Solves `-Δv = f`, `∂_ν v = g` on the Neumann segment, `v = 0` on the
/// Dirichlet segment, `v = g_arc` on the arc.
pub fn solve_forward(data: &ForwardData, arc: &ArcData, grid: &PolarGrid, k_max: usize) -> Result<Solution> {
    solve_forward_with(data, arc, grid, k_max, SolverOptions::default())
}

pub fn solve_forward_with(
    data: &ForwardData,
    arc: &ArcData,
    grid: &PolarGrid,
    k_max: usize,
    opts: SolverOptions,
) -> Result<Solution> {
    let mut sol = assemble_and_solve(Rhs::Load(data), arc, grid, k_max, opts)?;
    sol.report.valid_radius = grid.r_outer();
    Ok(sol)
}

fn assemble_and_solve(rhs: Rhs<'_>, arc: &ArcData, grid: &PolarGrid, k_max: usize, opts: SolverOptions) -> Result<Solution> {
    if k_max == 0 {
        return Err(Error::InvalidInput("truncation K must be >= 1".into()));
    }
    if let Some(k) = arc.max_mode() {
        if k.slot() >= k_max {
            return Err(Error::InvalidInput(format!(
                "arc data uses mode {k} but the truncation is K = {k_max}"
            )));
        }
    }
    let ghat = arc.coefficients(grid, k_max)?;
    let (nr, m, kk) = (grid.nr(), grid.m(), k_max);
    let h = grid.log_step();
    let radii = grid.radii();
    let angles = grid.angles();
    let wts = grid.angular_weights();
    let psi = psi_table(angles, kk);
    let compact = opts.scheme == RadialScheme::Compact;

    // per-node zero-order blocks: C_i[s][s'] multiplies φ_{s'} in row s,
    // and the load vector
    let mut coupling: Vec<Array2<f64>> = Vec::with_capacity(nr);
    let mut load = vec![0.0; nr * kk];
    for (i, &r) in radii.iter().enumerate() {
        let mut c = Array2::<f64>::zeros((kk, kk));
        for s in 0..kk {
            c[[s, s]] = ModeIndex::from_slot(s).lambda();
        }
        match &rhs {
            Rhs::Reaction(coeff) => {
                if !coeff.p().is_zero() {
                    let pv: Vec<f64> = angles.iter().map(|&t| coeff.p().at_polar(r, t)).collect::<Result<_>>()?;
                    for j in 0..m {
                        let wp = wts[j] * pv[j] * FRAC_2_PI * r * r;
                        if wp == 0.0 {
                            continue;
                        }
                        let row = &psi[j * kk..(j + 1) * kk];
                        for s in 0..kk {
                            for t in 0..kk {
                                c[[s, t]] -= wp * row[s] * row[t];
                            }
                        }
                    }
                }
                if !coeff.q().is_zero() {
                    // ψ_k(0) = 1 for every k
                    let qv = coeff.q().at_axis(r)? * FRAC_2_PI * r;
                    for s in 0..kk {
                        for t in 0..kk {
                            c[[s, t]] -= qv;
                        }
                    }
                }
            }
            Rhs::Load(data) => {
                let gv = data.g.at_axis(r)? * FRAC_2_PI * r;
                let fv: Vec<f64> = angles.iter().map(|&t| data.f.at_polar(r, t)).collect::<Result<_>>()?;
                for s in 0..kk {
                    let proj: f64 = (0..m).map(|j| wts[j] * fv[j] * psi[j * kk + s]).sum();
                    load[i * kk + s] = gv + FRAC_2_PI * r * r * proj;
                }
            }
        }
        coupling.push(c);
    }

    let n = nr * kk;
    let (kl, ku) = if compact { (2 * kk - 1, 4 * kk) } else { (kk, 2 * kk) };
    let mut a = BandMatrix::zeros(n, kl, ku);
    let mut b = vec![0.0; n];
    let idx = |i: usize, s: usize| i * kk + s;
    let h2 = h * h;

    for s in 0..kk {
        let g = ModeIndex::from_slot(s).gamma();
        // inner closure dφ/ds = γ φ, scaled by h
        let row = idx(0, s);
        if compact {
            let c = [-25.0, 48.0, -36.0, 16.0, -3.0];
            for (q, cq) in c.iter().enumerate() {
                a.add(row, idx(q, s), cq / 12.0);
            }
        } else {
            a.add(row, idx(0, s), -1.5);
            a.add(row, idx(1, s), 2.0);
            a.add(row, idx(2, s), -0.5);
        }
        a.add(row, idx(0, s), -g * h);
        // outer Dirichlet
        let row = idx(nr - 1, s);
        a.add(row, row, 1.0);
        b[row] = ghat[s];
    }

    for i in 1..nr - 1 {
        for s in 0..kk {
            let row = idx(i, s);
            a.add(row, idx(i - 1, s), -1.0);
            a.add(row, idx(i, s), 2.0);
            a.add(row, idx(i + 1, s), -1.0);
            if compact {
                for (di, wgt) in [(i - 1, 1.0 / 12.0), (i, 10.0 / 12.0), (i + 1, 1.0 / 12.0)] {
                    for t in 0..kk {
                        let v = coupling[di][[s, t]];
                        if v != 0.0 {
                            a.add(row, idx(di, t), h2 * wgt * v);
                        }
                    }
                    b[row] += h2 * wgt * load[di * kk + s];
                }
            } else {
                for t in 0..kk {
                    let v = coupling[i][[s, t]];
                    if v != 0.0 {
                        a.add(row, idx(i, t), h2 * v);
                    }
                }
                b[row] = h2 * load[i * kk + s];
            }
        }
    }

    let lu = a.factor()?;
    let cond = lu.condition_estimate();
    if !(cond.is_finite() && cond < 1e14) {
        return Err(Error::Singular {
            row: 0,
            pivot: 0.0,
            cond,
        });
    }
    lu.solve(&mut b);
    let modes = Array2::from_shape_vec((nr, kk), b).expect("shape matches unknown count");
    let field = ScalarField::from_mode_table(grid, modes, Provenance::Solved)?;
    Ok(Solution {
        field,
        report: SolveReport {
            unknowns: n,
            condition_estimate: cond,
            pivot_ratio: lu.pivot_ratio(),
            valid_radius: grid.r_outer(),
            pohozaev: None,
            warnings: Vec::new(),
        },
    })
}
