//! Radial mode profiles continued below the excision radius, and the
//! angular/radial integrals every frequency-type quantity is built from.
//!
//! Below `ε` each mode is continued as `φ_k(ε)(r/ε)^{a_k}` with `a_k` the
//! measured log-slope at `ε` (equal to `γ_k` for solved fields, by the inner
//! closure). The continuation runs [`TAIL_EFOLDS`] e-folds deep on the same
//! log step, after which every integrand is negligible, so integrals "from 0"
//! become running integrals over the extended grid.

use std::f64::consts::FRAC_PI_2;

use ndarray::Array2;

use crate::eigenbasis::{psi_table, ModeIndex};
use crate::error::{Error, Result};
use crate::geometry::PolarGrid;
use crate::numerics::{cumulative4, cumulative_exp, derivative4, interp4, lagrange4};
use crate::solver::{CoefficientData, ScalarField};

pub const TAIL_EFOLDS: f64 = 30.0;

#[derive(Debug, Clone)]
pub struct RadialProfile {
    grid: PolarGrid,
    tail: usize,
    radii: Vec<f64>,
    phi: Array2<f64>,
    dphi: Array2<f64>,
    exponents: Vec<f64>,
}

impl RadialProfile {
    pub fn new(field: &ScalarField) -> Result<Self> {
        let grid = field.grid().clone();
        let (nr, kk) = (grid.nr(), field.k_max());
        if nr < 5 {
            return Err(Error::InvalidGrid("profile needs at least 5 radii".into()));
        }
        let h = grid.log_step();
        let tail = (TAIL_EFOLDS / h).ceil() as usize;
        let len = tail + nr;
        let eps = grid.epsilon();
        let radii: Vec<f64> = (0..len)
            .map(|i| {
                if i < tail {
                    eps * (-((tail - i) as f64) * h).exp()
                } else {
                    grid.radii()[i - tail]
                }
            })
            .collect();
        let mut phi = Array2::zeros((len, kk));
        let mut dphi = Array2::zeros((len, kk));
        let mut exponents = Vec::with_capacity(kk);
        let modes = field.modes();
        let scale = modes.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for s in 0..kk {
            let col: Vec<f64> = modes.column(s).to_vec();
            let g = ModeIndex::from_slot(s).gamma();
            // differentiate the slowly varying factor r^{-γ}φ, exact for pure modes
            let rel: Vec<f64> = (0..nr).map(|i| col[i] * (grid.radii()[i] / eps).powf(-g)).collect();
            let drel = derivative4(&rel, h);
            let mut ds = vec![0.0; nr];
            for i in 0..nr {
                let r = grid.radii()[i];
                ds[i] = g * col[i] + drel[i] * (r / eps).powf(g);
                phi[[tail + i, s]] = col[i];
                dphi[[tail + i, s]] = ds[i] / r;
            }
            let slope = ds[0] / col[0];
            let a = if col[0].abs() > 1e-13 * scale && slope.is_finite() && slope > 0.0 && slope < 4.0 * g + 10.0 {
                slope
            } else {
                g
            };
            exponents.push(a);
            for i in 0..tail {
                let rho = radii[i];
                let v = col[0] * (rho / eps).powf(a);
                phi[[i, s]] = v;
                dphi[[i, s]] = a * v / rho;
            }
        }
        Ok(RadialProfile {
            grid,
            tail,
            radii,
            phi,
            dphi,
            exponents,
        })
    }

    pub fn grid(&self) -> &PolarGrid {
        &self.grid
    }

    /// Number of extended radial nodes.
    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    /// Extended index of grid node 0 (the excision radius).
    pub fn tail(&self) -> usize {
        self.tail
    }

    pub fn k_max(&self) -> usize {
        self.phi.ncols()
    }

    pub fn radius(&self, i: usize) -> f64 {
        self.radii[i]
    }

    pub fn phi(&self, i: usize, s: usize) -> f64 {
        self.phi[[i, s]]
    }

    /// `dφ_k/dr`.
    pub fn dphi(&self, i: usize, s: usize) -> f64 {
        self.dphi[[i, s]]
    }

    /// Log-slopes used for the continuation below `ε`.
    pub fn tail_exponents(&self) -> &[f64] {
        &self.exponents
    }

    /// Running integral in `ln r` from the bottom of the extended grid.
    pub fn cumulative(&self, f: &[f64]) -> Vec<f64> {
        cumulative4(f, self.grid.log_step())
    }

    /// Interpolates an extended-grid sequence at `r ∈ [ε, R]`.
    pub fn at(&self, seq: &[f64], r: f64) -> Result<f64> {
        let u = self.grid.fractional_index(r)?;
        let node = u.round();
        if (u - node).abs() < 1e-9 {
            return Ok(seq[self.tail + node as usize]);
        }
        Ok(interp4(seq, u + self.tail as f64))
    }

    /// Mode values and radial derivatives at `r ∈ [ε, R]`: cubic interpolation
    /// in `ln r` of `r^{-γ}φ` and `r^{1-γ}φ'`, exact for pure profiles.
    pub fn modes_at(&self, r: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let u = self.grid.fractional_index(r)? + self.tail as f64;
        let (base, w) = lagrange4(u, self.len());
        let kk = self.k_max();
        let (mut phi, mut dphi) = (vec![0.0; kk], vec![0.0; kk]);
        for s in 0..kk {
            let g = ModeIndex::from_slot(s).gamma();
            let (mut a, mut b) = (0.0, 0.0);
            for j in 0..4 {
                let rho = self.radii[base + j];
                let scale = (rho / r).powf(-g);
                a += w[j] * self.phi[[base + j, s]] * scale;
                b += w[j] * self.dphi[[base + j, s]] * rho * scale;
            }
            phi[s] = a;
            dphi[s] = b / r;
        }
        Ok((phi, dphi))
    }

    /// Extended index of a grid node.
    pub fn ext(&self, grid_index: usize) -> usize {
        self.tail + grid_index
    }

    /// Nodal values of `w` and `∂_r w` at extended node `i`.
    pub fn rows(&self, i: usize, psi: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let kk = self.k_max();
        let m = psi.len() / kk;
        let mut w = vec![0.0; m];
        let mut wr = vec![0.0; m];
        for j in 0..m {
            let row = &psi[j * kk..(j + 1) * kk];
            for s in 0..kk {
                w[j] += row[s] * self.phi[[i, s]];
                wr[j] += row[s] * self.dphi[[i, s]];
            }
        }
        (w, wr)
    }
}

/// Per-radius integrals of a field against fixed coefficients, with their
/// running integrals from the origin. Every array lives on the extended grid.
///
/// Modal integrands are integrated mode by mode (trace terms pair by pair)
/// with weights fitted to the mode's power law, so pure profiles integrate
/// exactly up to rounding.
#[derive(Debug, Clone)]
pub struct Energy {
    pub profile: RadialProfile,
    /// `∫ w² dt`
    pub h: Vec<f64>,
    /// `∫ w_r² dt`
    pub wr2: Vec<f64>,
    /// `∫ w w_r dt`
    pub wwr: Vec<f64>,
    /// `∫ |∇w|² dt`
    pub grad2: Vec<f64>,
    /// `∫ p w² dt`
    pub pw2: Vec<f64>,
    /// `w(r, 0)`
    pub trace: Vec<f64>,
    /// `q(r)`
    pub q: Vec<f64>,
    /// `∫_{B_r} |∇w|²`
    pub dirichlet: Vec<f64>,
    /// `∫_{B_r} p w²`
    pub p_mass: Vec<f64>,
    /// `∫_0^r q w²(x,0) dx`
    pub q_mass: Vec<f64>,
    /// `∫_0^r (q + x q') w²(x,0) dx`
    pub qd_mass: Vec<f64>,
    /// `∫_{B_r} p w (z·∇w)`
    pub p_virial: Vec<f64>,
    /// `∫_{B_r} w²/|z|²`
    pub hardy_mass: Vec<f64>,
    /// `∫_0^r w²(x,0)/x dx`
    pub trace_hardy: Vec<f64>,
    p_const: Option<f64>,
}

/// Circle integrals at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Surface {
    pub h: f64,
    pub wr2: f64,
    pub wwr: f64,
    pub grad2: f64,
    pub pw2: f64,
    pub trace: f64,
    pub q: f64,
}

fn add_into(acc: &mut [f64], part: &[f64], scale: f64) {
    for (a, p) in acc.iter_mut().zip(part) {
        *a += scale * p;
    }
}

impl Energy {
    pub fn new(field: &ScalarField, coeff: &CoefficientData) -> Result<Self> {
        let profile = RadialProfile::new(field)?;
        let kk = profile.k_max();
        let len = profile.len();
        let grid = profile.grid();
        let step = grid.log_step();
        let angles = grid.angles();
        let wts = grid.angular_weights();
        let psi = psi_table(angles, kk);
        let gammas: Vec<f64> = (0..kk).map(|s| ModeIndex::from_slot(s).gamma()).collect();
        let p_const = coeff.p().as_constant();
        let rad = |i: usize| profile.radius(i);

        let mut h = vec![0.0; len];
        let mut wr2 = vec![0.0; len];
        let mut wwr = vec![0.0; len];
        let mut grad2 = vec![0.0; len];
        let mut pw2 = vec![0.0; len];
        let mut pvir = vec![0.0; len];
        let mut trace = vec![0.0; len];
        let mut q = vec![0.0; len];
        let mut qd = vec![0.0; len];
        for i in 0..len {
            let r = rad(i);
            let (mut a, mut b, mut c, mut g) = (0.0, 0.0, 0.0, 0.0);
            let mut tr = 0.0;
            for s in 0..kk {
                let (f, df) = (profile.phi(i, s), profile.dphi(i, s));
                b += f * f;
                a += df * df;
                c += f * df;
                g += df * df + gammas[s] * gammas[s] * f * f / (r * r);
                tr += f;
            }
            // modal sums equal the trapezoid rule exactly by discrete orthogonality
            h[i] = FRAC_PI_2 * b;
            wr2[i] = FRAC_PI_2 * a;
            wwr[i] = FRAC_PI_2 * c;
            grad2[i] = FRAC_PI_2 * g;
            trace[i] = tr;
            match p_const {
                Some(pc) => {
                    pw2[i] = pc * h[i];
                    pvir[i] = pc * r * wwr[i];
                }
                None => {
                    let (w, wr) = profile.rows(i, &psi);
                    for j in 0..angles.len() {
                        let pv = coeff.p().at_polar(r, angles[j])?;
                        pw2[i] += wts[j] * pv * w[j] * w[j];
                        pvir[i] += wts[j] * pv * w[j] * r * wr[j];
                    }
                }
            }
            q[i] = coeff.q().at_axis(r)?;
            qd[i] = coeff.q_plus_xq_prime(r)?;
        }

        let active: Vec<usize> = (0..kk)
            .filter(|&s| (0..len).any(|i| profile.phi(i, s) != 0.0))
            .collect();
        let mut dirichlet = vec![0.0; len];
        let mut hardy_mass = vec![0.0; len];
        let mut p_mass = vec![0.0; len];
        let mut p_virial = vec![0.0; len];
        for &s in &active {
            let a = 2.0 * gammas[s];
            let per = |f: &dyn Fn(usize) -> f64, expo: f64| {
                let seq: Vec<f64> = (0..len).map(f).collect();
                cumulative_exp(&seq, step, expo)
            };
            let phi = |i: usize| profile.phi(i, s);
            let dphi = |i: usize| profile.dphi(i, s);
            let lam = gammas[s] * gammas[s];
            // ∫_0^r X ρ dρ = ∫ X ρ² d(ln ρ)
            let d = per(&|i| FRAC_PI_2 * (dphi(i).powi(2) * rad(i).powi(2) + lam * phi(i).powi(2)), a);
            add_into(&mut dirichlet, &d, 1.0);
            let hm = per(&|i| FRAC_PI_2 * phi(i).powi(2), a);
            add_into(&mut hardy_mass, &hm, 1.0);
            if let Some(pc) = p_const {
                if pc != 0.0 {
                    let pm = per(&|i| FRAC_PI_2 * phi(i).powi(2) * rad(i).powi(2), a + 2.0);
                    add_into(&mut p_mass, &pm, pc);
                    let pv = per(&|i| FRAC_PI_2 * phi(i) * dphi(i) * rad(i).powi(3), a + 2.0);
                    add_into(&mut p_virial, &pv, pc);
                }
            }
        }
        if p_const.is_none() {
            let area = |f: &[f64]| -> Vec<f64> {
                let g: Vec<f64> = f.iter().enumerate().map(|(i, v)| v * rad(i).powi(2)).collect();
                cumulative4(&g, step)
            };
            p_mass = area(&pw2);
            p_virial = area(&pvir);
        }

        let mut trace_hardy = vec![0.0; len];
        let mut q_mass = vec![0.0; len];
        let mut qd_mass = vec![0.0; len];
        let q_zero = coeff.q().is_zero();
        for (ai, &s) in active.iter().enumerate() {
            for &t in &active[ai..] {
                let mult = if s == t { 1.0 } else { 2.0 };
                let expo = gammas[s] + gammas[t];
                let prod: Vec<f64> = (0..len).map(|i| profile.phi(i, s) * profile.phi(i, t)).collect();
                add_into(&mut trace_hardy, &cumulative_exp(&prod, step, expo), mult);
                if !q_zero {
                    let qs: Vec<f64> = (0..len).map(|i| q[i] * prod[i] * rad(i)).collect();
                    add_into(&mut q_mass, &cumulative_exp(&qs, step, expo + 1.0), mult);
                    let qds: Vec<f64> = (0..len).map(|i| qd[i] * prod[i] * rad(i)).collect();
                    add_into(&mut qd_mass, &cumulative_exp(&qds, step, expo + 1.0), mult);
                }
            }
        }

        Ok(Energy {
            profile,
            h,
            wr2,
            wwr,
            grad2,
            pw2,
            trace,
            q,
            dirichlet,
            p_mass,
            q_mass,
            qd_mass,
            p_virial,
            hardy_mass,
            trace_hardy,
            p_const,
        })
    }

    pub fn grid(&self) -> &PolarGrid {
        self.profile.grid()
    }

    /// `D(r) = ∫|∇w|² − ∫p w² − ∫ q w²` at extended node `i`.
    pub fn d_at(&self, i: usize) -> f64 {
        self.dirichlet[i] - self.p_mass[i] - self.q_mass[i]
    }

    pub fn d_seq(&self) -> Vec<f64> {
        (0..self.profile.len()).map(|i| self.d_at(i)).collect()
    }

    pub fn at(&self, seq: &[f64], r: f64) -> Result<f64> {
        self.profile.at(seq, r)
    }

    /// Circle integrals at `r`, from interpolated mode profiles between nodes.
    pub fn surface(&self, r: f64) -> Result<Surface> {
        let u = self.grid().fractional_index(r)?;
        let node = u.round();
        if (u - node).abs() < 1e-9 {
            let i = self.profile.ext(node as usize);
            return Ok(Surface {
                h: self.h[i],
                wr2: self.wr2[i],
                wwr: self.wwr[i],
                grad2: self.grad2[i],
                pw2: self.pw2[i],
                trace: self.trace[i],
                q: self.q[i],
            });
        }
        let (phi, dphi) = self.profile.modes_at(r)?;
        let (mut a, mut b, mut c, mut g, mut tr) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for s in 0..phi.len() {
            let gam = ModeIndex::from_slot(s).gamma();
            b += phi[s] * phi[s];
            a += dphi[s] * dphi[s];
            c += phi[s] * dphi[s];
            g += dphi[s] * dphi[s] + gam * gam * phi[s] * phi[s] / (r * r);
            tr += phi[s];
        }
        let h = FRAC_PI_2 * b;
        let pw2 = match self.p_const {
            Some(pc) => pc * h,
            None => self.at(&self.pw2, r)?,
        };
        Ok(Surface {
            h,
            wr2: FRAC_PI_2 * a,
            wwr: FRAC_PI_2 * c,
            grad2: FRAC_PI_2 * g,
            pw2,
            trace: tr,
            q: self.at(&self.q, r)?,
        })
    }
}
