//! The junction expansion `w ≈ β F_{k₀}`: the order `k₀` and the coefficient
//! `β` by independent routes, blow-up and remainder checks, and the
//! Hopf and unique-continuation diagnostics.
//!
//! Each angular mode obeys `−φ″ − φ′/r + γ²φ/r² = ζ_k` with
//! `ζ_k = (2/(πr)) q w(r,0) + (2/π) ∫ p w ψ_k dt`, so `φ_k` is recovered from
//! `ζ_k` by variation of parameters and `β` follows from the regular branch.

use std::f64::consts::{FRAC_2_PI, PI};

use serde::Serialize;

use crate::almgren::{extract_gamma, extract_gamma_with, frequency_curve_from, grid_radii, trusted_window, GammaEstimate};
use crate::eigenbasis::{psi_eval, psi_table, project_sk_with, ModeIndex};
use crate::error::{Error, Result};
use crate::numerics::{cumulative4, line_fit};
use crate::profile::{Energy, RadialProfile};
use crate::solver::{valid_radius, CoefficientData, ScalarField};

/// Remainder exponent tested: any value in `(0, 1/2)` is admissible.
pub const RHO: f64 = 0.25;
/// Relative agreement demanded of the two `β` estimators at default resolution.
pub const BETA_AGREEMENT: f64 = 1e-2;
/// Relative spread of `φ_{k₀} r^{-γ}` about its linear fit that counts as converged.
pub const TRACE_SPREAD: f64 = 1e-2;
/// Remainders below this fraction of `|β| r^γ` are at the solver's
/// discretization level (about `1e-5` relative at default resolution).
pub const NOISE_FLOOR: f64 = 1e-4;
/// Slack on per-mode decay slopes.
pub const DECAY_SLACK: f64 = 0.1;
/// Relative gap `|a_{k₀} − β|/|β|` accepted at the smallest radius.
pub const COEFF_GAP_TOL: f64 = 1e-2;
/// Values above `−NONNEG_TOL · max|w|` count as nonnegative.
pub const NONNEG_TOL: f64 = 1e-10;
/// L² norm below which a field is zero to resolution.
pub const ZERO_TOL: f64 = 1e-12;

fn mode(k0: u32) -> Result<ModeIndex> {
    ModeIndex::new(k0)
}

/// `ζ_k(r)` from the field's angular trace at `r`.
pub fn zeta_eval(field: &ScalarField, coeff: &CoefficientData, k: ModeIndex, r: f64) -> Result<f64> {
    let g = field.grid();
    if !(r > g.epsilon() && r < g.r_outer()) {
        return Err(Error::RadiusOutOfRange {
            r,
            lo: g.epsilon(),
            hi: g.r_outer(),
        });
    }
    let row = field.values_at(r)?;
    let mut vals = Vec::with_capacity(row.len());
    for (&t, &w) in g.angles().iter().zip(&row) {
        vals.push(coeff.p().at_polar(r, t)? * w * psi_eval(k, t));
    }
    let q_term = FRAC_2_PI / r * coeff.q().at_axis(r)? * row[0];
    Ok(q_term + FRAC_2_PI * g.integrate_angle(&vals))
}

/// `ζ_k` sampled on a log-uniform radial grid reaching well below `ε`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZetaSamples {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
}

impl ZetaSamples {
    pub fn zero(radii: Vec<f64>) -> Self {
        let values = vec![0.0; radii.len()];
        ZetaSamples { radii, values }
    }

    /// Common log step; errors unless the radii are log-uniform.
    pub fn log_step(&self) -> Result<f64> {
        let n = self.radii.len();
        if n < 5 || self.values.len() != n {
            return Err(Error::InvalidInput("zeta samples need at least 5 matched radii".into()));
        }
        let h = (self.radii[n - 1] / self.radii[0]).ln() / (n - 1) as f64;
        let uniform = self
            .radii
            .windows(2)
            .all(|w| ((w[1] / w[0]).ln() - h).abs() <= 1e-9 * h.abs().max(1e-300));
        if !(h > 0.0) || !uniform {
            return Err(Error::InvalidInput("zeta samples must be log-uniform and increasing".into()));
        }
        Ok(h)
    }
}

/// `ζ_k` on the extended grid of an energy analysis.
pub fn zeta_samples(e: &Energy, coeff: &CoefficientData, k: ModeIndex) -> Result<ZetaSamples> {
    let prof = &e.profile;
    let s = k.slot();
    let len = prof.len();
    let mut values = vec![0.0; len];
    let p_const = coeff.p().as_constant();
    let grid = prof.grid();
    let (angles, wts) = (grid.angles(), grid.angular_weights());
    let kk = prof.k_max();
    let psi = psi_table(angles, kk);
    for (i, v) in values.iter_mut().enumerate() {
        let r = prof.radius(i);
        let p_term = match p_const {
            Some(pc) => {
                if s < kk {
                    pc * prof.phi(i, s)
                } else {
                    0.0
                }
            }
            None => {
                let (w, _) = prof.rows(i, &psi);
                let mut acc = 0.0;
                for j in 0..angles.len() {
                    acc += wts[j] * coeff.p().at_polar(r, angles[j])? * w[j] * psi_eval(k, angles[j]);
                }
                FRAC_2_PI * acc
            }
        };
        *v = p_term + FRAC_2_PI / r * e.q[i] * e.trace[i];
    }
    Ok(ZetaSamples {
        radii: (0..len).map(|i| prof.radius(i)).collect(),
        values,
    })
}

/// Mode profile rebuilt from `ζ_k` alone.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleProfile {
    pub radii: Vec<f64>,
    pub phi: Vec<f64>,
}

/// `φ_k(r) = r^γ (c₁ + ∫_r^R t^{1−γ}ζ/(2γ)) + r^{−γ} ∫_0^r t^{1+γ}ζ/(2γ)`,
/// with `c₁` fixed by `φ_k(R) = phi_at_r`. Samples above `R` are dropped.
pub fn phi_ode_oracle(k: ModeIndex, zeta: &ZetaSamples, r_eff: f64, phi_at_r: f64) -> Result<OracleProfile> {
    let h = zeta.log_step()?;
    let (lo, hi) = (zeta.radii[0], *zeta.radii.last().unwrap());
    if !(r_eff > lo && r_eff <= hi * (1.0 + 1e-12)) {
        return Err(Error::RadiusOutOfRange { r: r_eff, lo, hi });
    }
    // truncate at R, snapping onto the sample grid
    let top = ((r_eff / lo).ln() / h).round() as usize;
    if ((lo * (top as f64 * h).exp()) / r_eff - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput("R_eff must be a sample radius".into()));
    }
    let n = top + 1;
    let g = k.gamma();
    let radii = &zeta.radii[..n];
    let z = &zeta.values[..n];
    // dt = t d(ln t)
    let inner: Vec<f64> = (0..n).map(|i| radii[i].powf(2.0 + g) * z[i] / (2.0 * g)).collect();
    let outer_rev: Vec<f64> = (0..n)
        .rev()
        .map(|i| radii[i].powf(2.0 - g) * z[i] / (2.0 * g))
        .collect();
    let c_in = cumulative4(&inner, h);
    let mut c_out = cumulative4(&outer_rev, h);
    c_out.reverse();
    let r = radii[n - 1];
    let c1 = r.powf(-g) * phi_at_r - r.powf(-2.0 * g) * c_in[n - 1];
    let phi = (0..n)
        .map(|i| {
            let t = radii[i];
            t.powf(g) * (c1 + c_out[i]) + t.powf(-g) * c_in[i]
        })
        .collect();
    Ok(OracleProfile {
        radii: radii.to_vec(),
        phi,
    })
}

/// Largest `|φ_oracle − φ_direct|` over the grid nodes of the field, for
/// every mode of the truncation, with `R` the outer radius.
pub fn oracle_gap(field: &ScalarField, coeff: &CoefficientData) -> Result<f64> {
    let e = Energy::new(field, coeff)?;
    let prof = &e.profile;
    let grid = field.grid();
    let mut worst: f64 = 0.0;
    for s in 0..field.k_max() {
        let k = ModeIndex::from_slot(s);
        let zeta = zeta_samples(&e, coeff, k)?;
        let top = field.modes()[[grid.nr() - 1, s]];
        let o = phi_ode_oracle(k, &zeta, grid.r_outer(), top)?;
        for i in 0..grid.nr() {
            let ext = prof.ext(i);
            worst = worst.max((o.phi[ext] - field.modes()[[i, s]]).abs());
        }
    }
    Ok(worst)
}

/// `β` from the closed-form representation at `R_eff`.
pub fn beta_formula(field: &ScalarField, coeff: &CoefficientData, r_eff: f64, k0: u32) -> Result<f64> {
    let e = Energy::new(field, coeff)?;
    beta_formula_from(&e, coeff, r_eff, k0)
}

pub fn beta_formula_from(e: &Energy, coeff: &CoefficientData, r_eff: f64, k0: u32) -> Result<f64> {
    let k = mode(k0)?;
    let g = k.gamma();
    let prof = &e.profile;
    prof.grid().check_radius(r_eff)?;
    let surface = if k.slot() < prof.k_max() {
        prof.modes_at(r_eff)?.0[k.slot()]
    } else {
        0.0
    };
    let mut total = r_eff.powf(-g) * surface;
    if !coeff.is_zero() {
        let zeta = zeta_samples(e, coeff, k)?;
        // ∫_0^R (t^{1−γ} − R^{−2γ} t^{1+γ})/(2γ) ζ dt, in ln t
        let integrand: Vec<f64> = zeta
            .radii
            .iter()
            .zip(&zeta.values)
            .map(|(&t, &z)| (t.powf(2.0 - g) - r_eff.powf(-2.0 * g) * t.powf(2.0 + g)) / (2.0 * g) * z)
            .collect();
        if integrand.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("kernel integrand is not finite".into()));
        }
        total += prof.at(&prof.cumulative(&integrand), r_eff)?;
    }
    Ok(total)
}

/// `φ_{k₀}(r) r^{−γ}` extrapolated to `r → 0` by a linear fit in `r` over the
/// trusted window `[10ε, min(100ε, R/2)]`.
pub fn beta_trace_fit(field: &ScalarField, k0: u32) -> Result<f64> {
    let g = field.grid();
    let window = trusted_window(g.epsilon(), g.r_outer())?;
    beta_trace_fit_in(field, k0, window)
}

pub fn beta_trace_fit_in(field: &ScalarField, k0: u32, window: (f64, f64)) -> Result<f64> {
    let k = mode(k0)?;
    if k.slot() >= field.k_max() {
        return Err(Error::InvalidInput(format!("mode {k0} beyond the field's truncation")));
    }
    let g = field.grid();
    let gamma = k.gamma();
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for (i, &r) in g.radii().iter().enumerate() {
        if r >= window.0 * (1.0 - 1e-12) && r <= window.1 * (1.0 + 1e-12) {
            x.push(r);
            y.push(field.modes()[[i, k.slot()]] * r.powf(-gamma));
        }
    }
    if x.len() < 3 {
        return Err(Error::NoTrustedDecade(format!("{} samples in the window", x.len())));
    }
    let (beta, _, rms) = line_fit(&x, &y).ok_or_else(|| Error::DegenerateFit("trace fit".into()))?;
    if !(rms <= TRACE_SPREAD * beta.abs()) {
        return Err(Error::NonConvergent(format!(
            "φ r^-γ spreads by {rms:e} about its fit (β ≈ {beta:e})"
        )));
    }
    Ok(beta)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlowupSample {
    pub tau: f64,
    /// `w(τ, t)/√H(τ)` on the grid angles.
    pub trace: Vec<f64>,
    /// Sup distance to `±√(2/π) ψ_{k₀}`.
    pub deviation: f64,
    /// The sign achieving the deviation.
    pub sign: f64,
}

pub fn blowup_rescale(field: &ScalarField, tau: f64, k0: u32) -> Result<BlowupSample> {
    let k = mode(k0)?;
    let row = field.values_at(tau)?;
    let g = field.grid();
    let sq: Vec<f64> = row.iter().map(|v| v * v).collect();
    let h = g.integrate_angle(&sq);
    if !(h > 0.0) {
        return Err(Error::VanishingH(tau));
    }
    let trace: Vec<f64> = row.iter().map(|v| v / h.sqrt()).collect();
    let amp = FRAC_2_PI.sqrt();
    let dev = |sign: f64| {
        g.angles()
            .iter()
            .zip(&trace)
            .fold(0.0f64, |a, (&t, &v)| a.max((v - sign * amp * psi_eval(k, t)).abs()))
    };
    let (plus, minus) = (dev(1.0), dev(-1.0));
    let (deviation, sign) = if plus <= minus { (plus, 1.0) } else { (minus, -1.0) };
    Ok(BlowupSample {
        tau,
        trace,
        deviation,
        sign,
    })
}

/// Radii `hi, hi/2, hi/4, …` down to `lo`.
pub fn dyadic_radii(window: (f64, f64)) -> Vec<f64> {
    let mut out = Vec::new();
    let mut r = window.1;
    while r >= window.0 * (1.0 - 1e-12) {
        out.push(r);
        r *= 0.5;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RemainderReport {
    pub radii: Vec<f64>,
    /// `sup_{B_r⁺} |w − β F_{k₀}|` at each radius.
    pub sups: Vec<f64>,
    /// Fitted slope; absent when the remainder is at the noise floor.
    pub slope: Option<f64>,
    pub exact_to_resolution: bool,
    pub threshold: f64,
    pub pass: bool,
}

pub fn remainder_rate(field: &ScalarField, k0: u32, beta: f64) -> Result<RemainderReport> {
    let g = field.grid();
    remainder_rate_in(field, k0, beta, trusted_window(g.epsilon(), g.r_outer())?)
}

pub fn remainder_rate_in(field: &ScalarField, k0: u32, beta: f64, window: (f64, f64)) -> Result<RemainderReport> {
    remainder_rate_with(field, k0, beta, window, RHO)
}

pub fn remainder_rate_with(
    field: &ScalarField,
    k0: u32,
    beta: f64,
    window: (f64, f64),
    rho: f64,
) -> Result<RemainderReport> {
    let k = mode(k0)?;
    let gamma = k.gamma();
    let g = field.grid();
    let psi: Vec<f64> = g.angles().iter().map(|&t| psi_eval(k, t)).collect();
    // running sup over nodal rows from ε outwards
    let mut running = Vec::with_capacity(g.nr());
    let mut acc: f64 = 0.0;
    for (i, &rho) in g.radii().iter().enumerate() {
        let lead = beta * rho.powf(gamma);
        for (j, p) in psi.iter().enumerate() {
            acc = acc.max((field.values()[[i, j]] - lead * p).abs());
        }
        running.push(acc);
    }
    let radii = dyadic_radii(window);
    let mut sups = Vec::with_capacity(radii.len());
    for &r in &radii {
        let u = g.fractional_index(r)?;
        sups.push(running[(u + 1e-9).floor() as usize]);
    }
    let threshold = gamma + rho;
    let floor = radii
        .iter()
        .zip(&sups)
        .all(|(&r, &s)| s <= NOISE_FLOOR * beta.abs().max(f64::MIN_POSITIVE) * r.powf(gamma));
    if floor {
        return Ok(RemainderReport {
            radii,
            sups,
            slope: None,
            exact_to_resolution: true,
            threshold,
            pass: true,
        });
    }
    let x: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let y: Vec<f64> = sups.iter().map(|s| s.max(f64::MIN_POSITIVE).ln()).collect();
    let (_, slope, _) = line_fit(&x, &y).ok_or_else(|| Error::DegenerateFit("remainder slope".into()))?;
    Ok(RemainderReport {
        radii,
        sups,
        slope: Some(slope),
        exact_to_resolution: false,
        threshold,
        pass: slope >= threshold,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeDecay {
    pub k: u32,
    /// `a_k(r)` at each sample radius.
    pub values: Vec<f64>,
    /// Slope of `ln |a_k|` against `ln r`; absent when `a_k` vanishes to resolution.
    pub slope: Option<f64>,
    /// `γ − γ_k − slack` for modes below `k₀`; absent otherwise.
    pub required: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayReport {
    pub radii: Vec<f64>,
    pub modes: Vec<ModeDecay>,
    /// `|a_{k₀}(r) − β|` at each radius.
    pub gaps: Vec<f64>,
    pub pass: bool,
}

/// Coefficients of the `S_k` projection over the trusted window. Modes below
/// `k₀` must decay like `r^{γ−γ_j}`; modes above keep constant projections and
/// are reported only.
pub fn coefficient_decay(field: &ScalarField, k0: u32, beta: f64) -> Result<DecayReport> {
    let g = field.grid();
    let window = trusted_window(g.epsilon(), g.r_outer())?;
    let prof = RadialProfile::new(field)?;
    coefficient_decay_in(&prof, k0, beta, window)
}

pub fn coefficient_decay_in(prof: &RadialProfile, k0: u32, beta: f64, window: (f64, f64)) -> Result<DecayReport> {
    let k = mode(k0)?;
    let gamma = k.gamma();
    let top = mode((k0 + 1).min(prof.k_max().max(1) as u32).max(k0))?;
    let radii = dyadic_radii(window);
    let mut table = Vec::with_capacity(radii.len());
    for &r in &radii {
        table.push(project_sk_with(prof, r, top)?.a);
    }
    let scale = beta.abs().max(f64::MIN_POSITIVE);
    let x: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let mut modes = Vec::new();
    let mut pass = true;
    for s in 0..top.get() as usize {
        let kj = ModeIndex::from_slot(s);
        let values: Vec<f64> = table.iter().map(|row| row[s]).collect();
        let negligible = values
            .iter()
            .zip(&radii)
            .all(|(v, r)| v.abs() <= NOISE_FLOOR * scale * r.powf(gamma - kj.gamma()).max(1.0));
        let slope = if negligible {
            None
        } else {
            let y: Vec<f64> = values.iter().map(|v| v.abs().max(f64::MIN_POSITIVE).ln()).collect();
            Some(line_fit(&x, &y).ok_or_else(|| Error::DegenerateFit("coefficient slope".into()))?.1)
        };
        let required = (kj.get() < k0).then(|| gamma - kj.gamma() - DECAY_SLACK);
        let ok = match (required, slope) {
            (Some(req), Some(sl)) => sl >= req,
            _ => true,
        };
        pass &= ok;
        modes.push(ModeDecay {
            k: kj.get(),
            values,
            slope,
            required,
            pass: ok,
        });
    }
    let gaps: Vec<f64> = table.iter().map(|row| (row[k.slot()] - beta).abs()).collect();
    let last = *gaps.last().unwrap_or(&f64::INFINITY);
    pass &= last <= COEFF_GAP_TOL * scale;
    Ok(DecayReport {
        radii,
        modes,
        gaps,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HopfReport {
    pub precondition_ok: bool,
    /// Most negative nodal value.
    pub min_value: f64,
    pub k0: Option<u32>,
    /// Minimum of `w(r,t)/r^{1/2}` over `t ∈ [0, 3π/4]` at the smallest trusted radius.
    pub min_profile: Option<f64>,
    /// Minimum of `w(x,0)/x^{1/2}` over the trusted window.
    pub cone_liminf: Option<f64>,
    pub pass: bool,
}

pub fn hopf_check(field: &ScalarField, coeff: &CoefficientData) -> Result<HopfReport> {
    let min_value = field.values().iter().fold(f64::INFINITY, |a, &v| a.min(v));
    let scale = field.max_abs();
    if min_value < -NONNEG_TOL * scale.max(f64::MIN_POSITIVE) || scale == 0.0 {
        return Ok(HopfReport {
            precondition_ok: false,
            min_value,
            k0: None,
            min_profile: None,
            cone_liminf: None,
            pass: false,
        });
    }
    let g = field.grid();
    let e = Energy::new(field, coeff)?;
    let r0 = valid_radius(coeff.p_norm(), coeff.q_norm(), g.r_outer())?;
    let curve = frequency_curve_from(&e, coeff, &grid_radii(g, r0))?;
    let est = extract_gamma(&curve)?;
    let (lo, hi) = curve.trusted_window()?;
    let row = field.values_at(lo)?;
    let min_profile = g
        .angles()
        .iter()
        .zip(&row)
        .filter(|(&t, _)| t <= 0.75 * PI + 1e-12)
        .fold(f64::INFINITY, |a, (_, &v)| a.min(v / lo.sqrt()));
    let mut cone = f64::INFINITY;
    for (i, &r) in g.radii().iter().enumerate() {
        if r >= lo * (1.0 - 1e-12) && r <= hi * (1.0 + 1e-12) {
            cone = cone.min(field.values()[[i, 0]] / r.sqrt());
        }
    }
    Ok(HopfReport {
        precondition_ok: true,
        min_value,
        k0: Some(est.k0),
        min_profile: Some(min_profile),
        cone_liminf: Some(cone),
        pass: est.k0 == 1 && est.accepted && min_profile > 0.0 && cone > 0.0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum UniqueContinuation {
    /// A finite vanishing order was found.
    Nontrivial { k0: u32, gamma: f64 },
    /// Every projection coefficient vanishes and the field is zero to resolution.
    ZeroToResolution { l2_norm: f64 },
    /// Nonzero field without an accepted plateau.
    Inconclusive { l2_norm: f64, gamma: Option<f64> },
}

pub fn l2_norm(field: &ScalarField) -> f64 {
    let g = field.grid();
    let mut total = 0.0;
    for (i, w) in g.radial_weights().iter().enumerate() {
        let sq: Vec<f64> = field.values().row(i).iter().map(|v| v * v).collect();
        total += w * g.radii()[i] * g.integrate_angle(&sq);
    }
    total.sqrt()
}

pub fn unique_continuation(field: &ScalarField, coeff: &CoefficientData) -> Result<UniqueContinuation> {
    let g = field.grid();
    let norm = l2_norm(field);
    let prof = RadialProfile::new(field)?;
    let window = trusted_window(g.epsilon(), g.r_outer())?;
    let top = ModeIndex::from_slot(field.k_max() - 1);
    let mut all_zero = true;
    for r in dyadic_radii(window) {
        let a = project_sk_with(&prof, r, top)?.a;
        all_zero &= a.iter().all(|v| v.abs() <= ZERO_TOL);
    }
    if all_zero && norm <= ZERO_TOL {
        return Ok(UniqueContinuation::ZeroToResolution { l2_norm: norm });
    }
    let e = Energy::new(field, coeff)?;
    let r0 = valid_radius(coeff.p_norm(), coeff.q_norm(), g.r_outer())?;
    let est = frequency_curve_from(&e, coeff, &grid_radii(g, r0)).and_then(|c| extract_gamma(&c));
    Ok(match est {
        Ok(est) if est.accepted => UniqueContinuation::Nontrivial {
            k0: est.k0,
            gamma: est.gamma,
        },
        Ok(est) => UniqueContinuation::Inconclusive {
            l2_norm: norm,
            gamma: Some(est.gamma),
        },
        Err(_) => UniqueContinuation::Inconclusive { l2_norm: norm, gamma: None },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionDiagnostics {
    pub flatness: f64,
    pub gamma_accepted: bool,
    pub r_eff: f64,
    /// `|β_formula − β_trace| / |β_trace|`.
    pub beta_gap: f64,
    pub beta_agree: bool,
    pub remainder_pass: bool,
    pub remainder_exact: bool,
    pub decay_slopes: Vec<Option<f64>>,
    pub decay_pass: bool,
    pub blowup_deviations: Vec<f64>,
    pub blowup_pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JunctionExpansion {
    pub k0: u32,
    pub gamma: f64,
    pub beta_formula: f64,
    pub beta_trace: f64,
    pub remainder_exponent: Option<f64>,
    pub diagnostics: ExpansionDiagnostics,
}

/// Largest blow-up deviation allowed at the smallest dyadic radius.
pub const BLOWUP_TOL: f64 = 1e-2;
/// Increase between consecutive blow-up deviations still counted as decreasing.
pub const BLOWUP_NOISE: f64 = 1e-6;

/// Tolerances of the expansion pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpansionOptions {
    pub plateau_tol: f64,
    pub rho: f64,
    pub beta_agreement: f64,
    pub blowup_tol: f64,
}

impl Default for ExpansionOptions {
    fn default() -> Self {
        ExpansionOptions {
            plateau_tol: crate::almgren::PLATEAU_TOL,
            rho: RHO,
            beta_agreement: BETA_AGREEMENT,
            blowup_tol: BLOWUP_TOL,
        }
    }
}

pub fn blowup_series(field: &ScalarField, k0: u32, window: (f64, f64)) -> Result<Vec<BlowupSample>> {
    dyadic_radii(window)
        .into_iter()
        .map(|tau| blowup_rescale(field, tau, k0))
        .collect()
}

/// Deviations non-increasing towards the junction and below `BLOWUP_TOL` at the end.
pub fn blowup_converges(samples: &[BlowupSample]) -> bool {
    blowup_converges_with(samples, BLOWUP_TOL)
}

pub fn blowup_converges_with(samples: &[BlowupSample], tol: f64) -> bool {
    let dev: Vec<f64> = samples.iter().map(|s| s.deviation).collect();
    let monotone = dev.windows(2).all(|w| w[1] <= w[0] + BLOWUP_NOISE);
    monotone && dev.last().is_some_and(|&d| d < tol)
}

pub fn extract_expansion(field: &ScalarField, coeff: &CoefficientData) -> Result<JunctionExpansion> {
    extract_expansion_with(field, coeff, ExpansionOptions::default())
}

pub fn extract_expansion_with(
    field: &ScalarField,
    coeff: &CoefficientData,
    opts: ExpansionOptions,
) -> Result<JunctionExpansion> {
    let g = field.grid();
    let e = Energy::new(field, coeff)?;
    let r0 = valid_radius(coeff.p_norm(), coeff.q_norm(), g.r_outer())?;
    let curve = frequency_curve_from(&e, coeff, &grid_radii(g, r0))?;
    let est: GammaEstimate = extract_gamma_with(&curve, opts.plateau_tol)?;
    let window = est.window;
    let r_eff = g.radii()[g.nearest_index(r0.min(g.r_outer()))?.min(g.nr() - 1)];
    let r_eff = if r_eff > r0 { g.radii()[g.nearest_index(r0)?.saturating_sub(1)] } else { r_eff };
    let beta_formula = beta_formula_from(&e, coeff, r_eff, est.k0)?;
    let beta_trace = beta_trace_fit_in(field, est.k0, window)?;
    let beta_gap = (beta_formula - beta_trace).abs() / beta_trace.abs().max(f64::MIN_POSITIVE);
    let rem = remainder_rate_with(field, est.k0, beta_trace, window, opts.rho)?;
    let decay = coefficient_decay_in(&e.profile, est.k0, beta_trace, window)?;
    let blow = blowup_series(field, est.k0, window)?;
    Ok(JunctionExpansion {
        k0: est.k0,
        gamma: est.gamma,
        beta_formula,
        beta_trace,
        remainder_exponent: rem.slope,
        diagnostics: ExpansionDiagnostics {
            flatness: est.flatness,
            gamma_accepted: est.accepted,
            r_eff,
            beta_gap,
            beta_agree: beta_gap <= opts.beta_agreement,
            remainder_pass: rem.pass,
            remainder_exact: rem.exact_to_resolution,
            decay_slopes: decay.modes.iter().map(|m| m.slope).collect(),
            decay_pass: decay.pass,
            blowup_deviations: blow.iter().map(|b| b.deviation).collect(),
            blowup_pass: blowup_converges_with(&blow, opts.blowup_tol),
        },
    })
}
