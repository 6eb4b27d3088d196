//! Frequency-function analytics: `H`, `D`, `N = D/H`, the derivative
//! identities, the `ν₁ + ν₂` split, growth fits and the two Hardy inequalities.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::PolarGrid;
use crate::numerics::{line_fit, median};
use crate::profile::Energy;
use crate::solver::{valid_radius, CoefficientData, ScalarField};

/// Absolute tolerance on `γ` for accepting a plateau.
pub const PLATEAU_TOL: f64 = 0.05;
/// Relative slack allowed below zero for `ν₁`.
pub const SCHWARZ_SLACK: f64 = 1e-10;
/// Exponent gap used in the lower growth bound.
pub const GROWTH_SIGMA: f64 = 0.1;
/// Slack on the fitted slope for the upper growth bound.
pub const GROWTH_SLACK: f64 = 1e-2;
/// Default curves start this many excision radii out.
pub const RADIUS_MARGIN: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyCurve {
    pub radii: Vec<f64>,
    pub h: Vec<f64>,
    pub d: Vec<f64>,
    pub n: Vec<f64>,
    pub r0: f64,
    pub epsilon: f64,
    /// Radii dropped because `H ≤ 0` there.
    pub flagged: Vec<f64>,
}

impl FrequencyCurve {
    /// Builds a curve from sampled `H` and `D`, dropping samples with `H ≤ 0`.
    pub fn from_samples(radii: Vec<f64>, h: Vec<f64>, d: Vec<f64>, r0: f64, epsilon: f64) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::InvalidInput("empty radius list".into()));
        }
        if h.len() != radii.len() || d.len() != radii.len() {
            return Err(Error::InvalidInput("H, D and radii differ in length".into()));
        }
        if radii.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("radii must be strictly increasing".into()));
        }
        let mut curve = FrequencyCurve {
            radii: Vec::new(),
            h: Vec::new(),
            d: Vec::new(),
            n: Vec::new(),
            r0,
            epsilon,
            flagged: Vec::new(),
        };
        for ((r, hv), dv) in radii.into_iter().zip(h).zip(d) {
            if hv > 0.0 {
                curve.radii.push(r);
                curve.h.push(hv);
                curve.d.push(dv);
                curve.n.push(dv / hv);
            } else {
                curve.flagged.push(r);
            }
        }
        Ok(curve)
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    /// `[10ε, min(100ε, R₀/2)]`, which must span a full decade.
    pub fn trusted_window(&self) -> Result<(f64, f64)> {
        trusted_window(self.epsilon, self.r0)
    }

    /// Sample indices inside the trusted window; at least three.
    pub fn trusted_indices(&self) -> Result<Vec<usize>> {
        let (lo, hi) = self.trusted_window()?;
        let slack = 1e-12 * hi;
        let idx: Vec<usize> = (0..self.len())
            .filter(|&i| self.radii[i] >= lo - slack && self.radii[i] <= hi + slack)
            .collect();
        if idx.len() < 3 {
            return Err(Error::NoTrustedDecade(format!(
                "{} samples in [{lo:e}, {hi:e}]",
                idx.len()
            )));
        }
        Ok(idx)
    }
}

pub fn trusted_window(epsilon: f64, r0: f64) -> Result<(f64, f64)> {
    let lo = 10.0 * epsilon;
    let hi = (100.0 * epsilon).min(0.5 * r0);
    if hi < 10.0 * lo * (1.0 - 1e-9) {
        return Err(Error::NoTrustedDecade(format!(
            "window [{lo:e}, {hi:e}] is shorter than a decade"
        )));
    }
    Ok((lo, hi))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NuDiagnostics {
    pub radii: Vec<f64>,
    pub nu1: Vec<f64>,
    pub nu2: Vec<f64>,
}

impl NuDiagnostics {
    /// Most negative `ν₁` relative to the largest `|ν₁|`, or 0.
    pub fn schwarz_defect(&self) -> f64 {
        let scale = self.nu1.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
        self.nu1.iter().fold(0.0f64, |a, v| a.min(*v)) / scale
    }
}

/// `∫₀^π w²(r cos t, r sin t) dt`.
#[allow(non_snake_case)]
pub fn compute_H(field: &ScalarField, r: f64) -> Result<f64> {
    let row = field.values_at(r)?;
    let sq: Vec<f64> = row.iter().map(|v| v * v).collect();
    Ok(field.grid().integrate_angle(&sq))
}

/// `∫_{B_r⁺}|∇w|² − ∫_{B_r⁺} p w² − ∫₀^r q w²(x,0) dx`.
#[allow(non_snake_case)]
pub fn compute_D(field: &ScalarField, coeff: &CoefficientData, r: f64) -> Result<f64> {
    let e = Energy::new(field, coeff)?;
    let seq = e.d_seq();
    e.at(&seq, r)
}

/// Grid nodes in `(RADIUS_MARGIN·ε, min(R₀, R)]`.
pub fn grid_radii(grid: &PolarGrid, r0: f64) -> Vec<f64> {
    let top = r0.min(grid.r_outer()) * (1.0 + 1e-12);
    grid.radii()
        .iter()
        .copied()
        .filter(|&r| r > RADIUS_MARGIN * grid.epsilon() && r <= top)
        .collect()
}

pub fn frequency_curve(field: &ScalarField, coeff: &CoefficientData, radii: &[f64]) -> Result<FrequencyCurve> {
    let e = Energy::new(field, coeff)?;
    frequency_curve_from(&e, coeff, radii)
}

pub fn frequency_curve_from(e: &Energy, coeff: &CoefficientData, radii: &[f64]) -> Result<FrequencyCurve> {
    if radii.is_empty() {
        return Err(Error::InvalidInput("empty radius list".into()));
    }
    let grid = e.grid();
    let r0 = valid_radius(coeff.p_norm(), coeff.q_norm(), grid.r_outer())?;
    let dseq = e.d_seq();
    let mut h = Vec::with_capacity(radii.len());
    let mut d = Vec::with_capacity(radii.len());
    for &r in radii {
        if r <= grid.epsilon() {
            return Err(Error::RadiusOutOfRange {
                r,
                lo: grid.epsilon(),
                hi: grid.r_outer(),
            });
        }
        h.push(e.surface(r)?.h);
        d.push(e.at(&dseq, r)?);
    }
    FrequencyCurve::from_samples(radii.to_vec(), h, d, r0, grid.epsilon())
}

/// Three-point derivative on a nonuniform grid at interior index `i`.
fn central(x: &[f64], y: &[f64], i: usize) -> f64 {
    let (dm, dp) = (x[i] - x[i - 1], x[i + 1] - x[i]);
    (-dp / (dm * (dm + dp))) * y[i - 1] + ((dp - dm) / (dm * dp)) * y[i] + (dm / (dp * (dm + dp))) * y[i + 1]
}

/// Maximum relative residual of `r H′(r) = 2 D(r)` over interior samples,
/// with `H′` from central differences of `ln H` in `ln r`.
#[allow(non_snake_case)]
pub fn check_Hprime(curve: &FrequencyCurve) -> Result<f64> {
    if curve.len() < 3 {
        return Err(Error::InvalidInput(format!("{} samples, need at least 3", curve.len())));
    }
    let s: Vec<f64> = curve.radii.iter().map(|r| r.ln()).collect();
    let l: Vec<f64> = curve.h.iter().map(|h| h.ln()).collect();
    let mut worst: f64 = 0.0;
    for i in 1..curve.len() - 1 {
        let rhp = curve.h[i] * central(&s, &l, i);
        let two_d = 2.0 * curve.d[i];
        let scale = two_d.abs().max(rhp.abs()).max(f64::MIN_POSITIVE);
        worst = worst.max((rhp - two_d).abs() / scale);
    }
    Ok(worst)
}

/// `(ν₁(r), ν₂(r))`.
pub fn nu_split(field: &ScalarField, coeff: &CoefficientData, r: f64) -> Result<(f64, f64)> {
    let e = Energy::new(field, coeff)?;
    nu_at(&e, r)
}

pub fn nu_at(e: &Energy, r: f64) -> Result<(f64, f64)> {
    let sf = e.surface(r)?;
    let b = sf.h;
    if !(b > 0.0) {
        return Err(Error::VanishingH(r));
    }
    let nu1 = 2.0 * r * (sf.wr2 * b - sf.wwr * sf.wwr) / (b * b);
    let qd = e.at(&e.qd_mass, r)?;
    let pz = e.at(&e.p_virial, r)?;
    let nu2 = (2.0 * pz - qd) / (r * b) - r * sf.pw2 / b;
    Ok((nu1, nu2))
}

pub fn nu_diagnostics(e: &Energy, radii: &[f64]) -> Result<NuDiagnostics> {
    let mut out = NuDiagnostics {
        radii: radii.to_vec(),
        nu1: Vec::with_capacity(radii.len()),
        nu2: Vec::with_capacity(radii.len()),
    };
    for &r in radii {
        let (a, b) = nu_at(e, r)?;
        out.nu1.push(a);
        out.nu2.push(b);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaEstimate {
    pub gamma: f64,
    pub k0: u32,
    /// Largest `|N − γ|` over the trusted window.
    pub flatness: f64,
    pub accepted: bool,
    pub window: (f64, f64),
}

pub fn extract_gamma(curve: &FrequencyCurve) -> Result<GammaEstimate> {
    extract_gamma_with(curve, PLATEAU_TOL)
}

/// As `extract_gamma` with an explicit plateau tolerance.
pub fn extract_gamma_with(curve: &FrequencyCurve, plateau_tol: f64) -> Result<GammaEstimate> {
    let idx = curve.trusted_indices()?;
    let ns: Vec<f64> = idx.iter().map(|&i| curve.n[i]).collect();
    let gamma = median(&ns);
    let k0 = (gamma + 0.5).round().max(1.0) as u32;
    let flatness = ns.iter().fold(0.0f64, |a, n| a.max((n - gamma).abs()));
    let target = (2 * k0 - 1) as f64 / 2.0;
    Ok(GammaEstimate {
        gamma,
        k0,
        flatness,
        accepted: (gamma - target).abs() < plateau_tol && flatness < plateau_tol,
        window: curve.trusted_window()?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthFit {
    /// Slope of `ln H` against `ln r`.
    pub slope: f64,
    pub intercept: f64,
    pub rms: f64,
    /// `slope − 2γ`.
    pub excess: f64,
    /// `H = O(r^{2γ})` is consistent with the fit.
    pub upper_ok: bool,
    /// `r^{2γ+σ} = O(H)` is consistent with the fit.
    pub lower_ok: bool,
    pub sigma: f64,
}

pub fn growth_bounds(curve: &FrequencyCurve, gamma: f64) -> Result<GrowthFit> {
    let idx = curve.trusted_indices()?;
    let x: Vec<f64> = idx.iter().map(|&i| curve.radii[i].ln()).collect();
    let y: Vec<f64> = idx.iter().map(|&i| curve.h[i].ln()).collect();
    let (intercept, slope, rms) =
        line_fit(&x, &y).ok_or_else(|| Error::DegenerateFit("ln H against ln r".into()))?;
    Ok(GrowthFit {
        slope,
        intercept,
        rms,
        excess: slope - 2.0 * gamma,
        upper_ok: slope >= 2.0 * gamma - GROWTH_SLACK,
        lower_ok: slope <= 2.0 * gamma + GROWTH_SIGMA,
        sigma: GROWTH_SIGMA,
    })
}

/// `(∫_{B_r⁺}|∇w|², ¼∫_{B_r⁺} w²/|z|²)`.
pub fn hardy_interior(field: &ScalarField, r: f64) -> Result<(f64, f64)> {
    let e = Energy::new(field, &CoefficientData::zero())?;
    hardy_interior_from(&e, r)
}

pub fn hardy_interior_from(e: &Energy, r: f64) -> Result<(f64, f64)> {
    Ok((e.at(&e.dirichlet, r)?, 0.25 * e.at(&e.hardy_mass, r)?))
}

/// `(∫₀^r w²(x,0)/x dx, π ∫_{B_r⁺}|∇w|²)`.
pub fn hardy_boundary(field: &ScalarField, r: f64) -> Result<(f64, f64)> {
    let e = Energy::new(field, &CoefficientData::zero())?;
    hardy_boundary_from(&e, r)
}

pub fn hardy_boundary_from(e: &Energy, r: f64) -> Result<(f64, f64)> {
    Ok((e.at(&e.trace_hardy, r)?, std::f64::consts::PI * e.at(&e.dirichlet, r)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigenbasis::ModeIndex;
    use crate::solver::{solve_mixed_bvp, ArcData};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn k(n: u32) -> ModeIndex {
        ModeIndex::new(n).unwrap()
    }

    fn grid() -> PolarGrid {
        PolarGrid::new(1.0, 1e-4, 512, 33).unwrap()
    }

    fn mix(terms: &[(u32, f64)]) -> ScalarField {
        let t: Vec<_> = terms.iter().map(|&(n, c)| (k(n), c)).collect();
        ScalarField::mode_mixture(&grid(), 6, &t).unwrap()
    }

    fn curve(f: &ScalarField) -> FrequencyCurve {
        let z = CoefficientData::zero();
        frequency_curve(f, &z, &grid_radii(f.grid(), 1.0)).unwrap()
    }

    #[test]
    fn h_examples() {
        let f = mix(&[(1, 1.0)]);
        assert!((compute_H(&f, 1.0).unwrap() - PI / 2.0).abs() < 1e-14);
        assert!((compute_H(&f, 0.25).unwrap() - 0.25 * PI / 2.0).abs() < 1e-9);
        assert_eq!(compute_H(&f.scaled(0.0), 0.5).unwrap(), 0.0);
        assert!(matches!(compute_H(&f, 2.0), Err(Error::RadiusOutOfRange { .. })));
    }

    #[test]
    fn d_examples() {
        let z = CoefficientData::zero();
        assert!((compute_D(&mix(&[(1, 1.0)]), &z, 1.0).unwrap() - PI / 4.0).abs() < 1e-8);
        assert!((compute_D(&mix(&[(2, 1.0)]), &z, 1.0).unwrap() - 0.75 * PI).abs() < 1e-7);
        assert!((compute_D(&mix(&[(1, 3.0)]), &z, 1.0).unwrap() - 9.0 * PI / 4.0).abs() < 1e-7);
    }

    #[test]
    fn pure_modes_have_constant_frequency() {
        for n in 1..=3 {
            let c = curve(&mix(&[(n, 1.0)]));
            let g = k(n).gamma();
            let dev = c.n.iter().fold(0.0f64, |a, v| a.max((v - g).abs()));
            assert!(dev < 1e-6, "k={n} dev={dev}");
        }
    }

    #[test]
    fn two_mode_frequency_increases() {
        let c = curve(&mix(&[(1, 1.0), (2, 0.01)]));
        assert!((c.n[0] - 0.5).abs() < 1e-3);
        for w in c.n.windows(2) {
            assert!(w[1] >= w[0] - 1e-9);
        }
        assert!(c.n.iter().all(|&v| (0.5 - 1e-9..=1.5).contains(&v)));
    }

    #[test]
    fn hprime_identity() {
        let c = curve(&mix(&[(1, 1.0), (2, 0.3)]));
        assert!(check_Hprime(&c).unwrap() < 1e-4);
        let a = check_Hprime(&curve(&mix(&[(2, 1.0)]))).unwrap();
        let b = check_Hprime(&curve(&mix(&[(2, 5.0)]))).unwrap();
        assert!((a - b).abs() < 1e-12 && a < 1e-6, "{a} {b}");
        let short = FrequencyCurve::from_samples(vec![0.1, 0.2], vec![1.0, 1.0], vec![0.0, 0.0], 1.0, 1e-4).unwrap();
        assert!(check_Hprime(&short).is_err());
    }

    #[test]
    fn hprime_converges_at_second_order_in_sample_spacing() {
        let g = grid();
        let coeff = CoefficientData::constants(0.5, 0.0);
        let sol = solve_mixed_bvp(&coeff, &ArcData::single(k(1), 1.0), &g, 8).unwrap();
        let e = Energy::new(&sol.field, &coeff).unwrap();
        let sample = |stride: usize| {
            // fixed end points so the same radii stay interior under halving
            let radii: Vec<f64> = g.radii()[128..=448].iter().copied().step_by(stride).collect();
            check_Hprime(&frequency_curve_from(&e, &coeff, &radii).unwrap()).unwrap()
        };
        let ratio = sample(4) / sample(2);
        assert!((ratio - 4.0).abs() < 0.6, "{ratio}");
    }

    #[test]
    fn nu_examples() {
        let z = CoefficientData::zero();
        let (a, b) = nu_split(&mix(&[(2, 1.0)]), &z, 0.5).unwrap();
        assert!(a.abs() < 1e-8 && b == 0.0, "{a} {b}");
        let (a, b) = nu_split(&mix(&[(1, 1.0), (2, 1.0)]), &z, 0.5).unwrap();
        assert!(a > 0.1 && b == 0.0);
    }

    #[test]
    fn nu_sum_is_frequency_derivative() {
        let g = grid();
        let coeff = CoefficientData::new(
            crate::solver::ScalarFn::parse("1 + r*cos(t)").unwrap(),
            crate::solver::ScalarFn::parse("0.4 - 0.3*x").unwrap(),
            &g,
        )
        .unwrap();
        let sol = solve_mixed_bvp(&coeff, &ArcData::single(k(2), 1.0), &g, 8).unwrap();
        let e = Energy::new(&sol.field, &coeff).unwrap();
        let radii = grid_radii(&g, 1.0);
        let c = frequency_curve_from(&e, &coeff, &radii).unwrap();
        let s: Vec<f64> = c.radii.iter().map(|r| r.ln()).collect();
        let nu = nu_diagnostics(&e, &c.radii).unwrap();
        for i in (150..c.len() - 1).step_by(37) {
            let dn = central(&s, &c.n, i) / c.radii[i];
            let sum = nu.nu1[i] + nu.nu2[i];
            assert!((dn - sum).abs() < 1e-3 * (1.0 + dn.abs()), "r={} {dn} {sum}", c.radii[i]);
        }
    }

    #[test]
    fn gamma_extraction() {
        let e = extract_gamma(&curve(&mix(&[(2, 1.0)]))).unwrap();
        assert_eq!(e.k0, 2);
        assert!((e.gamma - 1.5).abs() < 1e-6 && e.flatness < 1e-5 && e.accepted, "{e:?}");
        let e = extract_gamma(&curve(&mix(&[(1, 1.0), (2, 0.01)]))).unwrap();
        assert_eq!(e.k0, 1);
        assert!((e.gamma - 0.5).abs() < 1e-3 && e.accepted);
    }

    #[test]
    fn logarithmic_growth_defeats_plateau() {
        let eps = 1e-5;
        let radii: Vec<f64> = (0..=300).map(|i| eps * 2.0 * 10f64.powf(i as f64 / 100.0)).collect();
        let h: Vec<f64> = radii.iter().map(|r| r.powi(4) * r.ln().powi(2)).collect();
        // N = r H'/(2H)
        let d: Vec<f64> = radii.iter().map(|r| (r.powi(4) * r.ln().powi(2)) * (2.0 + 1.0 / r.ln())).collect();
        let c = FrequencyCurve::from_samples(radii, h, d, 0.1, eps).unwrap();
        assert!(!extract_gamma(&c).unwrap().accepted);
    }

    #[test]
    fn no_trusted_decade() {
        let f = mix(&[(1, 1.0)]);
        let c = frequency_curve(&f, &CoefficientData::zero(), &[0.5, 0.6, 0.7]).unwrap();
        assert!(matches!(extract_gamma(&c), Err(Error::NoTrustedDecade(_))));
        assert!(trusted_window(1e-4, 0.015).is_err());
        assert!(frequency_curve(&f, &CoefficientData::zero(), &[]).is_err());
    }

    #[test]
    fn growth_examples() {
        for (n, c, want) in [(1, 1.0, 1.0), (2, 1.0, 3.0), (1, 7.0, 1.0)] {
            let cv = curve(&mix(&[(n, c)]));
            let fit = growth_bounds(&cv, k(n).gamma()).unwrap();
            assert!((fit.slope - want).abs() < 1e-4, "{fit:?}");
            assert!(fit.upper_ok && fit.lower_ok);
        }
    }

    #[test]
    fn hardy_examples() {
        let (l, r) = hardy_interior(&mix(&[(1, 1.0)]), 1.0).unwrap();
        assert!((l - PI / 4.0).abs() < 1e-8 && (r - PI / 8.0).abs() < 1e-8);
        let (l, r) = hardy_interior(&mix(&[(2, 1.0)]), 1.0).unwrap();
        assert!(l > r);
        assert_eq!(hardy_interior(&mix(&[(1, 0.0)]), 1.0).unwrap(), (0.0, 0.0));
        let (l, r) = hardy_boundary(&mix(&[(1, 1.0)]), 1.0).unwrap();
        assert!((l - 1.0).abs() < 1e-8 && (r - PI * PI / 4.0).abs() < 1e-7);
        let (l, r) = hardy_boundary(&mix(&[(2, 1.0)]), 1.0).unwrap();
        assert!((l - 1.0 / 3.0).abs() < 1e-8 && (r - 0.75 * PI * PI).abs() < 1e-6);
        // F_1 - F_2 has zero trace at r = 1 only, F_k(x,0) = x^{γ_k}; a trace that vanishes
        // identically needs the combination to cancel at every x, which only the zero field does
        let (l, _) = hardy_boundary(&mix(&[(1, 0.0), (2, 0.0)]), 1.0).unwrap();
        assert_eq!(l, 0.0);
    }

    fn small_grid() -> PolarGrid {
        PolarGrid::new(1.0, 1e-3, 128, 17).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn frequency_is_scale_invariant(c in prop::sample::select(vec![-3.0, -0.5, 0.25, 2.0, 10.0]),
                                        b in -1.0f64..1.0) {
            let g = small_grid();
            let f = ScalarField::mode_mixture(&g, 4, &[(k(1), 1.0), (k(3), b)]).unwrap();
            let z = CoefficientData::zero();
            let radii = grid_radii(&g, 1.0);
            let a = frequency_curve(&f, &z, &radii).unwrap();
            let s = frequency_curve(&f.scaled(c), &z, &radii).unwrap();
            for (x, y) in a.n.iter().zip(&s.n) {
                prop_assert!((x - y).abs() < 1e-10 * (1.0 + x.abs()));
            }
        }

        #[test]
        fn harmonic_mixtures_have_monotone_frequency_and_schwarz(coefs in prop::collection::vec(-1.0f64..1.0, 4)) {
            let g = small_grid();
            let terms: Vec<_> = coefs.iter().enumerate().map(|(i, &c)| (ModeIndex::from_slot(i), c)).collect();
            let f = ScalarField::mode_mixture(&g, 4, &terms).unwrap();
            prop_assume!(f.max_abs() > 1e-3);
            let z = CoefficientData::zero();
            let e = Energy::new(&f, &z).unwrap();
            let radii = grid_radii(&g, 1.0);
            let c = frequency_curve_from(&e, &z, &radii).unwrap();
            for w in c.n.windows(2) {
                prop_assert!(w[1] >= w[0] - 1e-8 * (1.0 + w[0].abs()));
            }
            let nu = nu_diagnostics(&e, &c.radii).unwrap();
            prop_assert!(nu.schwarz_defect() >= -SCHWARZ_SLACK);
        }
    }
}
