//! Mixed Dirichlet-Neumann problems on the half-disk near the point where
//! the boundary condition switches.
//!
//! The model problem is `-Δw = p w` in `B_R⁺`, `w = 0` on the Dirichlet
//! segment `t = π`, `∂_ν w = q w` on the Neumann segment `t = 0`, with data
//! on the arc. Near the junction `w ≈ β r^{γ} cos(γ t)` with
//! `γ = (2k₀ − 1)/2`.
//!
//! | module | role |
//! |---|---|
//! | [`geometry`] | polar grids in `ln r`, conformal maps that straighten curved junctions |
//! | [`eigenbasis`] | angular eigenpairs `ψ_k`, profiles `F_k = r^{γ_k} ψ_k`, projections |
//! | [`solver`] | banded Galerkin/finite-difference solver, Pohozaev residuals |
//! | [`almgren`] | `H`, `D`, the frequency `N = D/H`, growth fits, Hardy inequalities |
//! | [`asymptotics`] | `k₀` and `β` by two routes, remainder rate, blow-ups, Hopf check |
//! | [`counterexample`] | a corner domain whose expansion carries a logarithm |
//! | [`exprparse`] | the expression language used for coefficients and data |
//! | [`cli`] | JSON configs and the batch subcommands behind `junction-lab` |
//!
//! Each capability has a runnable example under `examples/`, e.g.
//! `cargo run --release --example junction_expansion`.
//!
//! ```
//! use junction_lab::asymptotics::extract_expansion;
//! use junction_lab::eigenbasis::ModeIndex;
//! use junction_lab::geometry::PolarGrid;
//! use junction_lab::solver::{solve_mixed_bvp, ArcData, CoefficientData};
//!
//! let grid = PolarGrid::new(1.0, 1e-4, 128, 65)?;
//! let coeff = CoefficientData::zero();
//! let sol = solve_mixed_bvp(&coeff, &ArcData::single(ModeIndex::new(1)?, 2.0), &grid, 8)?;
//! let x = extract_expansion(&sol.field, &coeff)?;
//! assert_eq!(x.k0, 1);
//! assert!((x.beta_formula - 2.0).abs() < 1e-3);
//! # Ok::<(), junction_lab::Error>(())
//! ```

// `!(x > 0.0)` is used on purpose so NaN fails range checks; index loops
// mirror the stencils they implement.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod almgren;
pub mod asymptotics;
pub mod cli;
pub mod counterexample;
pub mod eigenbasis;
pub mod error;
pub mod exprparse;
pub mod geometry;
pub mod linalg;
pub mod numerics;
pub mod profile;
pub mod solver;

pub use error::{Error, Result};
