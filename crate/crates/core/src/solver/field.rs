use ndarray::{Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::eigenbasis::{psi_table, ModeIndex};
use crate::error::{Error, Result};
use crate::geometry::PolarGrid;
use crate::numerics::lagrange4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Solved,
    ClosedForm,
}

/// Nodal values `w(r_i, t_j)` together with the mode table `φ_k(r_i)`.
#[derive(Debug, Clone)]
pub struct ScalarField {
    grid: PolarGrid,
    values: Array2<f64>,
    modes: Array2<f64>,
    provenance: Provenance,
}

impl ScalarField {
    /// Builds values from a mode table (`Nr × K`).
    pub fn from_mode_table(grid: &PolarGrid, modes: Array2<f64>, provenance: Provenance) -> Result<Self> {
        if modes.nrows() != grid.nr() || modes.ncols() == 0 {
            return Err(Error::InvalidInput(format!(
                "mode table is {}x{}, grid has {} radii",
                modes.nrows(),
                modes.ncols(),
                grid.nr()
            )));
        }
        if modes.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite mode value".into()));
        }
        let values = synthesize(grid, &modes);
        Ok(ScalarField {
            grid: grid.clone(),
            values,
            modes,
            provenance,
        })
    }

    /// Closed-form field from radial mode profiles `φ_k(r)`.
    pub fn from_modes<F: Fn(ModeIndex, f64) -> f64>(grid: &PolarGrid, k_max: usize, f: F) -> Result<Self> {
        let mut modes = Array2::zeros((grid.nr(), k_max));
        for (i, &r) in grid.radii().iter().enumerate() {
            for s in 0..k_max {
                modes[[i, s]] = f(ModeIndex::from_slot(s), r);
            }
        }
        ScalarField::from_mode_table(grid, modes, Provenance::ClosedForm)
    }

    /// `Σ c_k F_k`.
    pub fn mode_mixture(grid: &PolarGrid, k_max: usize, terms: &[(ModeIndex, f64)]) -> Result<Self> {
        if let Some((k, _)) = terms.iter().find(|(k, _)| k.slot() >= k_max) {
            return Err(Error::InvalidInput(format!("mode {k} exceeds truncation K = {k_max}")));
        }
        ScalarField::from_modes(grid, k_max, |k, r| {
            terms
                .iter()
                .filter(|(j, _)| *j == k)
                .map(|(_, c)| c * r.powf(k.gamma()))
                .sum()
        })
    }

    /// Closed-form field from nodal values; modes come from the trapezoid transform.
    /// The function must vanish on the Dirichlet edge `t = π`.
    pub fn from_fn<F: Fn(f64, f64) -> f64>(grid: &PolarGrid, k_max: usize, f: F) -> Result<Self> {
        let (nr, m) = (grid.nr(), grid.m());
        let mut values = Array2::zeros((nr, m));
        for (i, &r) in grid.radii().iter().enumerate() {
            for (j, &t) in grid.angles().iter().enumerate() {
                values[[i, j]] = f(r, t);
            }
            let edge = values[[i, m - 1]];
            let scale = values.row(i).iter().fold(1.0f64, |a, v| a.max(v.abs()));
            if edge.abs() > 1e-12 * scale {
                return Err(Error::InvalidInput(format!(
                    "field is {edge} on the Dirichlet edge at r = {r}"
                )));
            }
            values[[i, m - 1]] = 0.0;
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite field value".into()));
        }
        let modes = transform(grid, &values, k_max);
        Ok(ScalarField {
            grid: grid.clone(),
            values,
            modes,
            provenance: Provenance::ClosedForm,
        })
    }

    pub fn grid(&self) -> &PolarGrid {
        &self.grid
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn modes(&self) -> &Array2<f64> {
        &self.modes
    }

    pub fn k_max(&self) -> usize {
        self.modes.ncols()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn scaled(&self, c: f64) -> ScalarField {
        ScalarField {
            grid: self.grid.clone(),
            values: &self.values * c,
            modes: &self.modes * c,
            provenance: self.provenance,
        }
    }

    /// `a·self + b·other` on a shared grid and truncation.
    pub fn combine(&self, a: f64, other: &ScalarField, b: f64) -> Result<ScalarField> {
        if self.grid != other.grid || self.k_max() != other.k_max() {
            return Err(Error::InvalidInput("fields live on different grids".into()));
        }
        let provenance = if self.provenance == Provenance::ClosedForm && other.provenance == Provenance::ClosedForm {
            Provenance::ClosedForm
        } else {
            Provenance::Solved
        };
        Ok(ScalarField {
            grid: self.grid.clone(),
            values: &self.values * a + &other.values * b,
            modes: &self.modes * a + &other.modes * b,
            provenance,
        })
    }

    /// Largest absolute nodal value.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// Mode values at any `r ∈ [ε, R]`: cubic interpolation in `ln r` of
    /// `r^{-γ_k} φ_k`, so pure profiles are reproduced exactly.
    pub fn modes_at(&self, r: f64) -> Result<Vec<f64>> {
        let u = self.grid.fractional_index(r)?;
        let (base, w) = lagrange4(u, self.grid.nr());
        let radii = self.grid.radii();
        Ok((0..self.k_max())
            .map(|s| {
                let g = ModeIndex::from_slot(s).gamma();
                let scaled: f64 = (0..4)
                    .map(|j| w[j] * self.modes[[base + j, s]] * radii[base + j].powf(-g))
                    .sum();
                scaled * r.powf(g)
            })
            .collect())
    }

    /// Angular trace at any `r ∈ [ε, R]`.
    pub fn values_at(&self, r: f64) -> Result<Vec<f64>> {
        let u = self.grid.fractional_index(r)?;
        let node = u.round();
        if (u - node).abs() < 1e-9 {
            return Ok(self.values.row(node as usize).to_vec());
        }
        let m = self.grid.m();
        let k_max = self.k_max();
        let psi = psi_table(self.grid.angles(), k_max);
        let phi = self.modes_at(r)?;
        let (base, w) = lagrange4(u, self.grid.nr());
        let mut out = vec![0.0; m];
        for j in 0..m - 1 {
            let row = &psi[j * k_max..(j + 1) * k_max];
            let modal: f64 = row.iter().zip(&phi).map(|(p, f)| p * f).sum();
            // whatever the truncated modes miss is interpolated nodally
            let mut rest = 0.0;
            for (q, wq) in w.iter().enumerate() {
                let i = base + q;
                let synth: f64 = row
                    .iter()
                    .zip(self.modes.row(i).iter())
                    .map(|(p, f)| p * f)
                    .sum();
                rest += wq * (self.values[[i, j]] - synth);
            }
            out[j] = modal + rest;
        }
        Ok(out)
    }

    pub fn trace_row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.values.row(i)
    }
}

/// `w(r_i, t_j) = Σ_k φ_k(r_i) ψ_k(t_j)` with the Dirichlet column set to zero.
pub(crate) fn synthesize(grid: &PolarGrid, modes: &Array2<f64>) -> Array2<f64> {
    let (nr, m, k_max) = (grid.nr(), grid.m(), modes.ncols());
    let psi = psi_table(grid.angles(), k_max);
    let mut values = Array2::zeros((nr, m));
    for i in 0..nr {
        for j in 0..m - 1 {
            let row = &psi[j * k_max..(j + 1) * k_max];
            values[[i, j]] = row.iter().zip(modes.row(i).iter()).map(|(p, f)| p * f).sum();
        }
    }
    values
}

/// `φ_k(r_i) = (2/π) Σ_j W_j w(r_i,t_j) ψ_k(t_j)`.
pub(crate) fn transform(grid: &PolarGrid, values: &Array2<f64>, k_max: usize) -> Array2<f64> {
    let m = grid.m();
    let psi = psi_table(grid.angles(), k_max);
    let wts = grid.angular_weights();
    let mut modes = Array2::zeros((values.nrows(), k_max));
    for i in 0..values.nrows() {
        for j in 0..m {
            let wv = wts[j] * values[[i, j]] * std::f64::consts::FRAC_2_PI;
            for s in 0..k_max {
                modes[[i, s]] += wv * psi[j * k_max + s];
            }
        }
    }
    modes
}
