//! A harmonic function on a corner domain whose expansion at the junction
//! carries a logarithm: `u = r²[(log r) sin 2θ + (θ − π/2) cos 2θ]`.
//!
//! `u` vanishes on the curve `Γ₊ = {r = ρ(θ)}` and has zero normal derivative
//! on `Γ₋`, the stable manifold at the origin of the flow `x′ = V(x)` with
//! `V = ∇u / log|x|²` near the origin. The graph `h₊` of `Γ₊` satisfies
//! `x₁h₊′ − h₊ ∼ −(π/4) x₁/log²x₁`, so it is `C¹` but not `C²`; the `4/3`
//! power map straightens the corner and gives the `−4π/9` analogue.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::BandMatrix;
use crate::numerics::{bisect, line_fit};

/// Parameter range of `Γ₊`.
pub const SIGMA: f64 = PI / 16.0;
/// Parameter range of the deformed curve.
pub const SIGMA_DEFORMED: f64 = PI / 12.0;
/// Radius of the corner domain.
pub const DOMAIN_RADIUS: f64 = 0.1;
/// Radius of the disk where `V` is defined.
pub const FIELD_RADIUS: f64 = 0.5;
/// Relative step of the central difference for `h₊′`.
pub const DIFF_STEP: f64 = 1e-4;
/// Log-model residual advantage required for a verdict.
pub const MODEL_FACTOR: f64 = 10.0;

/// Angle in `(−π/2, 3π/2)`, the branch used throughout.
fn theta_of(x1: f64, x2: f64) -> f64 {
    let t = x2.atan2(x1);
    if t <= -FRAC_PI_2 {
        t + 2.0 * PI
    } else {
        t
    }
}

pub fn u_log(r: f64, theta: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::InvalidInput(format!("u_log needs r > 0, got {r}")));
    }
    if !(theta > -FRAC_PI_2 && theta < 1.5 * PI) {
        return Err(Error::InvalidInput(format!("angle {theta} outside (-π/2, 3π/2)")));
    }
    Ok(r * r * (r.ln() * (2.0 * theta).sin() + (theta - FRAC_PI_2) * (2.0 * theta).cos()))
}

pub fn u_log_xy(x1: f64, x2: f64) -> Result<f64> {
    u_log(x1.hypot(x2), theta_of(x1, x2))
}

/// `v(z) = e^{2η(−iz)} η(−iz)` with `η` the principal logarithm.
pub fn v_complex(z: Complex64) -> Complex64 {
    let w = Complex64::new(0.0, -1.0) * z;
    let eta = w.ln();
    (2.0 * eta).exp() * eta
}

/// `u = −Im v`, evaluated along the complex path.
pub fn u_log_complex(x1: f64, x2: f64) -> f64 {
    -v_complex(Complex64::new(x1, x2)).im
}

/// `∇u` from `v′(z) = −i(2w log w + w)`, `w = −iz`.
pub fn grad_u(x1: f64, x2: f64) -> [f64; 2] {
    let i = Complex64::new(0.0, 1.0);
    let w = -i * Complex64::new(x1, x2);
    let dv = -i * (2.0 * w * w.ln() + w);
    [-dv.im, -dv.re]
}

/// Radius of the `Γ₊` point at angle `θ`.
pub fn rho_plus(theta: f64) -> Result<f64> {
    rho_general(theta, 2.0, FRAC_PI_2)
}

/// Radius of the deformed curve, `exp[−(θ − 2π/3) cot(3θ/2)]`.
pub fn rho_plus_deformed(theta: f64) -> Result<f64> {
    rho_general(theta, 1.5, 2.0 * PI / 3.0)
}

fn rho_general(theta: f64, c: f64, offset: f64) -> Result<f64> {
    let s = (c * theta).sin();
    if s.abs() < 1e-14 {
        return Err(Error::InvalidInput(format!("angle {theta} sits on a cotangent pole")));
    }
    Ok((-(theta - offset) * (c * theta).cos() / s).exp())
}

fn d_rho(theta: f64, c: f64, offset: f64) -> f64 {
    let s = (c * theta).sin();
    let rho = (-(theta - offset) * (c * theta).cos() / s).exp();
    rho * (-(c * theta).cos() / s + c * (theta - offset) / (s * s))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveTrace {
    pub points: Vec<[f64; 2]>,
    pub params: Vec<f64>,
    /// Unit tangents.
    pub tangents: Vec<[f64; 2]>,
    /// Distance to the origin of the last point.
    pub terminal_distance: f64,
    pub diverged: bool,
}

impl CurveTrace {
    /// Consecutive points are distinct.
    pub fn points_distinct(&self) -> bool {
        self.points.windows(2).all(|w| w[0] != w[1])
    }

    /// `x₁` strictly monotone along the trace, so the curve is a graph over `x₁`.
    pub fn is_graph(&self) -> bool {
        let inc = self.points.windows(2).all(|w| w[1][0] > w[0][0]);
        let dec = self.points.windows(2).all(|w| w[1][0] < w[0][0]);
        inc || dec
    }
}

fn unit(v: [f64; 2]) -> [f64; 2] {
    let n = v[0].hypot(v[1]);
    [v[0] / n, v[1] / n]
}

fn sample_curve(n: usize, sigma: f64, c: f64, offset: f64) -> Result<CurveTrace> {
    if n < 2 {
        return Err(Error::InvalidInput("curve needs at least 2 samples".into()));
    }
    let mut points = Vec::with_capacity(n);
    let mut params = Vec::with_capacity(n);
    let mut tangents = Vec::with_capacity(n);
    for i in 0..n {
        let th = -sigma * (1.0 - i as f64 / n as f64);
        let rho = rho_general(th, c, offset)?;
        let dr = d_rho(th, c, offset);
        points.push([rho * th.cos(), rho * th.sin()]);
        params.push(th);
        tangents.push(unit([dr * th.cos() - rho * th.sin(), dr * th.sin() + rho * th.cos()]));
    }
    let last = points[n - 1];
    Ok(CurveTrace {
        terminal_distance: last[0].hypot(last[1]),
        points,
        params,
        tangents,
        diverged: false,
    })
}

/// `Γ₊` sampled at `n` angles in `[−σ, 0)`.
pub fn gamma_plus(n: usize) -> Result<CurveTrace> {
    sample_curve(n, SIGMA, 2.0, FRAC_PI_2)
}

/// The deformed Dirichlet curve, `r = ρ̃(θ)` for `θ ∈ [−σ̃, 0)`.
pub fn gamma_plus_deformed(n: usize) -> Result<CurveTrace> {
    sample_curve(n, SIGMA_DEFORMED, 1.5, 2.0 * PI / 3.0)
}

/// `2 log` of the norm without underflow.
fn log_norm2(x1: f64, x2: f64) -> f64 {
    2.0 * x1.hypot(x2).ln()
}

fn h_left(x1: f64, x2: f64) -> (f64, f64) {
    if x1 < 0.0 {
        let l = log_norm2(x1, x2);
        let a = 2.0 * ((x2 / x1).atan() + FRAC_PI_2);
        (a * x1 / l, a * x2 / l)
    } else if x2 > 0.0 {
        (0.0, 0.0)
    } else if x2 < 0.0 {
        (0.0, 2.0 * PI * x2 / log_norm2(0.0, x2))
    } else {
        (0.0, 0.0)
    }
}

fn h_pair(x1: f64, x2: f64) -> (f64, f64) {
    if x1 > 0.0 {
        let a = h_left(-x1, x2);
        let b = h_left(-2.0 * x1, x2);
        (3.0 * a.0 - 2.0 * b.0, 3.0 * a.1 - 2.0 * b.1)
    } else {
        h_left(x1, x2)
    }
}

pub fn v_field(x1: f64, x2: f64) -> Result<[f64; 2]> {
    if !(x1.hypot(x2) < FIELD_RADIUS) {
        return Err(Error::InvalidInput(format!("({x1}, {x2}) outside B_1/2")));
    }
    if x1 == 0.0 && x2 == 0.0 {
        return Ok([0.0, 0.0]);
    }
    let l = log_norm2(x1, x2);
    let (h1, h2) = h_pair(x1, x2);
    Ok([x2 + x2 / l + h1, x1 + x1 / l - h2])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JacobianEstimate {
    /// Extrapolated `DV(0,0)`.
    pub matrix: [[f64; 2]; 2],
    pub eigenvalues: [f64; 2],
    /// Unit eigenvectors, first component nonnegative, matching `eigenvalues`.
    pub eigenvectors: [[f64; 2]; 2],
    /// Central differences at each step.
    pub raw: Vec<(f64, [[f64; 2]; 2])>,
}

/// Decimal exponents of the difference steps; the error decays like `1/log δ`.
pub const JACOBIAN_EXPONENTS: [i32; 6] = [10, 20, 40, 80, 160, 300];

fn central_jacobian(d: f64) -> Result<[[f64; 2]; 2]> {
    let (px, mx) = (v_field(d, 0.0)?, v_field(-d, 0.0)?);
    let (py, my) = (v_field(0.0, d)?, v_field(0.0, -d)?);
    Ok([
        [(px[0] - mx[0]) / (2.0 * d), (py[0] - my[0]) / (2.0 * d)],
        [(px[1] - mx[1]) / (2.0 * d), (py[1] - my[1]) / (2.0 * d)],
    ])
}

/// Value at `0` of the interpolating polynomial through `(x_i, y_i)`.
fn neville_at_zero(x: &[f64], y: &[f64]) -> f64 {
    let mut p = y.to_vec();
    let n = x.len();
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (x[i + m] * p[i] - x[i] * p[i + 1]) / (x[i + m] - x[i]);
        }
    }
    p[0]
}

/// `DV(0,0)` by central differences extrapolated to zero step in `1/log δ`.
pub fn jacobian_at_origin() -> Result<JacobianEstimate> {
    let mut raw = Vec::new();
    for e in JACOBIAN_EXPONENTS {
        let d = 10f64.powi(-e);
        raw.push((d, central_jacobian(d)?));
    }
    let u: Vec<f64> = raw.iter().map(|(d, _)| 1.0 / d.ln()).collect();
    let mut matrix = [[0.0; 2]; 2];
    for (i, row) in matrix.iter_mut().enumerate() {
        for (j, m) in row.iter_mut().enumerate() {
            let y: Vec<f64> = raw.iter().map(|(_, jm)| jm[i][j]).collect();
            *m = neville_at_zero(&u, &y);
        }
    }
    let (eigenvalues, eigenvectors) = eig2(matrix)?;
    Ok(JacobianEstimate {
        matrix,
        eigenvalues,
        eigenvectors,
        raw,
    })
}

fn eig2(m: [[f64; 2]; 2]) -> Result<([f64; 2], [[f64; 2]; 2])> {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = 0.25 * tr * tr - det;
    if disc < 0.0 {
        return Err(Error::DegenerateFit("complex eigenvalues".into()));
    }
    let s = disc.sqrt();
    let vals = [0.5 * tr - s, 0.5 * tr + s];
    let mut vecs = [[0.0; 2]; 2];
    for (k, &l) in vals.iter().enumerate() {
        let a = [m[0][1], l - m[0][0]];
        let b = [l - m[1][1], m[1][0]];
        let v = if a[0].hypot(a[1]) >= b[0].hypot(b[1]) { a } else { b };
        let v = unit(v);
        vecs[k] = if v[0] < 0.0 || (v[0] == 0.0 && v[1] < 0.0) { [-v[0], -v[1]] } else { v };
    }
    Ok((vals, vecs))
}

fn rk4(p: [f64; 2], h: f64) -> Result<[f64; 2]> {
    let f = |q: [f64; 2]| v_field(q[0], q[1]);
    let k1 = f(p)?;
    let k2 = f([p[0] + 0.5 * h * k1[0], p[1] + 0.5 * h * k1[1]])?;
    let k3 = f([p[0] + 0.5 * h * k2[0], p[1] + 0.5 * h * k2[1]])?;
    let k4 = f([p[0] + h * k3[0], p[1] + h * k3[1]])?;
    Ok([
        p[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        p[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ])
}

fn finish_trace(points: Vec<[f64; 2]>, step: f64, diverged: bool) -> CurveTrace {
    let n = points.len();
    let tangents = (0..n)
        .map(|i| {
            let (a, b) = if n < 2 {
                (0, 0)
            } else if i == 0 {
                (0, 1)
            } else if i == n - 1 {
                (n - 2, n - 1)
            } else {
                (i - 1, i + 1)
            };
            let d = [points[b][0] - points[a][0], points[b][1] - points[a][1]];
            if d == [0.0, 0.0] {
                [0.0, 0.0]
            } else {
                unit(d)
            }
        })
        .collect();
    let last = points[n - 1];
    CurveTrace {
        params: (0..n).map(|i| i as f64 * step).collect(),
        terminal_distance: last[0].hypot(last[1]),
        points,
        tangents,
        diverged,
    }
}

/// Fixed-step RK4 flow from `start`. Leaving `B_{1/2}` stops the trace and
/// flags divergence, as does ending farther out than the start.
pub fn trace_from(start: [f64; 2], step: f64, n_steps: usize) -> Result<CurveTrace> {
    v_field(start[0], start[1])?;
    let mut points = vec![start];
    let mut p = start;
    let mut left = false;
    for _ in 0..n_steps {
        match rk4(p, step) {
            Ok(q) if q[0].hypot(q[1]) < FIELD_RADIUS => {
                p = q;
                points.push(q);
            }
            _ => {
                left = true;
                break;
            }
        }
        if p == [0.0, 0.0] {
            break;
        }
    }
    let d0 = start[0].hypot(start[1]);
    let diverged = left || p[0].hypot(p[1]) > d0;
    Ok(finish_trace(points, step, diverged))
}

/// Component along the unstable direction `(1,1)/√2` once the flow escapes
/// past twice the starting distance, or at the end.
fn escape_side(start: [f64; 2], step: f64, n_steps: usize) -> f64 {
    let d0 = start[0].hypot(start[1]);
    let mut p = start;
    for _ in 0..n_steps {
        match rk4(p, step) {
            Ok(q) => p = q,
            Err(_) => break,
        }
        if p[0].hypot(p[1]) > 2.0 * d0 {
            break;
        }
    }
    p[0] + p[1]
}

/// `Γ₋` by shooting: the start angle near `(−1,1)` is bisected until the
/// unstable component is resolved to rounding, then the flow is traced.
pub fn trace_gamma_minus(start_distance: f64, step: f64, n_steps: usize) -> Result<CurveTrace> {
    if !(start_distance > 0.0 && 2.0 * start_distance < FIELD_RADIUS) || !(step > 0.0) {
        return Err(Error::InvalidInput(format!(
            "start distance {start_distance} and step {step} must be positive with 2d < 1/2"
        )));
    }
    let at = |a: f64| [start_distance * a.cos(), start_distance * a.sin()];
    let centre = 0.75 * PI;
    let angle = bisect(|a| escape_side(at(a), step, n_steps), centre - 0.5, centre + 0.5)
        .ok_or_else(|| Error::NonConvergent("shooting bracket for the stable manifold".into()))?;
    let trace = trace_from(at(angle), step, n_steps)?;
    if let Some(&last) = trace.points.last() {
        if trace.diverged && last[0].hypot(last[1]) >= FIELD_RADIUS * 0.99 {
            return Err(Error::LeftDomain { x1: last[0], x2: last[1] });
        }
    }
    Ok(trace)
}

/// Largest `|∂u/∂ν| / |∇u|` along a trace, with `ν` normal to the stored tangents.
pub fn neumann_residual(trace: &CurveTrace) -> f64 {
    trace
        .points
        .iter()
        .zip(&trace.tangents)
        .filter(|(p, _)| p[0].hypot(p[1]) > 0.0)
        .fold(0.0f64, |acc, (p, t)| {
            let g = grad_u(p[0], p[1]);
            let nu = [t[1], -t[0]];
            acc.max((g[0] * nu[0] + g[1] * nu[1]).abs() / g[0].hypot(g[1]))
        })
}

fn identity_at(x1: f64, a: f64, c: f64, offset: f64) -> f64 {
    0.5 * (x1 * x1 / a.cos().powi(2)).ln() * (c * a).tan() + a - offset
}

fn h_general(x1: f64, c: f64, offset: f64, sigma: f64) -> Result<f64> {
    if !(x1 > 0.0) {
        return Err(Error::NoBracket { x1 });
    }
    let a = bisect(|a| identity_at(x1, a, c, offset), -sigma, -f64::MIN_POSITIVE).ok_or(Error::NoBracket { x1 })?;
    Ok(x1 * a.tan())
}

/// `h₊(x₁)` from the implicit identity on `Γ₊`.
pub fn h_plus(x1: f64) -> Result<f64> {
    h_general(x1, 2.0, FRAC_PI_2, SIGMA)
}

/// The deformed graph `h̃₊(x₁)`.
pub fn h_plus_deformed(x1: f64) -> Result<f64> {
    h_general(x1, 1.5, 2.0 * PI / 3.0, SIGMA_DEFORMED)
}

/// Residual of the `Γ₊` identity at `(x₁, h)`.
pub fn identity_residual(x1: f64, h: f64) -> f64 {
    identity_at(x1, (h / x1).atan(), 2.0, FRAC_PI_2)
}

/// Residual of the deformed identity at `(x₁, h)`.
pub fn identity_residual_deformed(x1: f64, h: f64) -> f64 {
    identity_at(x1, (h / x1).atan(), 1.5, 2.0 * PI / 3.0)
}

fn ratio_with<F: Fn(f64) -> Result<f64>>(x1: f64, h: F) -> Result<f64> {
    let d = x1 * DIFF_STEP;
    let hp = (h(x1 + d)? - h(x1 - d)?) / (2.0 * d);
    let l = x1.ln();
    Ok((x1 * hp - h(x1)?) / (x1 / (l * l)))
}

/// `(x₁h₊′ − h₊)/(x₁/log²x₁)` at each sample; tends to `−π/4`.
pub fn stima_ratio(x1_list: &[f64]) -> Result<Vec<(f64, f64)>> {
    x1_list.iter().map(|&x| Ok((x, ratio_with(x, h_plus)?))).collect()
}

/// The same ratio for the deformed graph; tends to `−4π/9`.
pub fn c1_deformation_ratio(x1_list: &[f64]) -> Result<Vec<(f64, f64)>> {
    x1_list.iter().map(|&x| Ok((x, ratio_with(x, h_plus_deformed)?))).collect()
}

/// `tan[(3/2) arctan(h̃₊/x₁)]`, whose leading term is `(2π/3)/log x₁`.
pub fn tangent_deformed(x1: f64) -> Result<f64> {
    let h = h_plus_deformed(x1)?;
    Ok((1.5 * (h / x1).atan()).tan())
}

/// Values of `H(r) = ∫ u² dθ` over arcs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HSamples {
    pub radii: Vec<f64>,
    pub h: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelReport {
    /// `H ≈ c r^a`.
    pub power_exponent: f64,
    pub power_prefactor: f64,
    /// RMS relative residual of the power model.
    pub power_residual: f64,
    /// `H ≈ r⁴ (c₀ + c₁ log r + c₂ log² r)`.
    pub log_coefficients: [f64; 3],
    pub log_residual: f64,
    /// `power_residual / log_residual`.
    pub ratio: f64,
    pub log_preferred: bool,
    pub power_preferred: bool,
}

fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> Result<[f64; 3]> {
    let mut m = BandMatrix::zeros(3, 2, 2);
    for (i, row) in a.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            m.add(i, j, v);
        }
    }
    let lu = m.factor()?;
    let mut x = b.to_vec();
    lu.solve(&mut x);
    Ok([x[0], x[1], x[2]])
}

/// Compares a pure power against `r⁴` times a quadratic in `log r`, both by
/// relative residual. The winning model must beat the other by `MODEL_FACTOR`.
pub fn log_model_fit(samples: &HSamples) -> Result<ModelReport> {
    let (r, h) = (&samples.radii, &samples.h);
    if r.len() != h.len() || r.len() < 4 {
        return Err(Error::InvalidInput("H samples need at least 4 matched radii".into()));
    }
    if h.iter().any(|v| !(*v > 0.0)) || r.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::InvalidInput("H samples must be positive".into()));
    }
    let (lo, hi) = r.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    if (hi / lo).log10() < 2.0 - 1e-12 {
        return Err(Error::NoTrustedDecade(format!("samples span {:.2} decades, need 2", (hi / lo).log10())));
    }
    let x: Vec<f64> = r.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let (b0, a, _) = line_fit(&x, &y).ok_or_else(|| Error::DegenerateFit("power model".into()))?;
    let rms = |f: &dyn Fn(usize) -> f64| {
        ((0..r.len()).map(|i| (f(i) / h[i] - 1.0).powi(2)).sum::<f64>() / r.len() as f64).sqrt()
    };
    let power_residual = rms(&|i| (b0 + a * x[i]).exp());
    // weighted least squares for the relative error of the log model
    let mut ata = [[0.0; 3]; 3];
    let mut atb = [0.0; 3];
    for i in 0..r.len() {
        let w = r[i].powi(4) / h[i];
        let row = [w, w * x[i], w * x[i] * x[i]];
        for p in 0..3 {
            for q in 0..3 {
                ata[p][q] += row[p] * row[q];
            }
            atb[p] += row[p];
        }
    }
    let c = solve3(ata, atb)?;
    let log_residual = rms(&|i| r[i].powi(4) * (c[0] + c[1] * x[i] + c[2] * x[i] * x[i]));
    let ratio = power_residual / log_residual.max(f64::MIN_POSITIVE);
    Ok(ModelReport {
        power_exponent: a,
        power_prefactor: b0.exp(),
        power_residual,
        log_coefficients: c,
        log_residual,
        ratio,
        log_preferred: ratio >= MODEL_FACTOR,
        power_preferred: log_residual >= MODEL_FACTOR * power_residual,
    })
}

/// Angle of `Γ₊` at radius `r`.
pub fn gamma_plus_angle(r: f64) -> Result<f64> {
    let top = rho_plus(-SIGMA)?;
    if !(r > 0.0 && r < top) {
        return Err(Error::RadiusOutOfRange { r, lo: 0.0, hi: top });
    }
    bisect(|t| -(t - FRAC_PI_2) / (2.0 * t).tan() - r.ln(), -SIGMA, -1e-3)
        .ok_or_else(|| Error::NonConvergent(format!("Γ₊ angle at r = {r}")))
}

/// Angle of a traced curve at radius `r`, interpolated linearly in `log r`.
pub fn trace_angle(trace: &CurveTrace, r: f64) -> Result<f64> {
    let pts: Vec<(f64, f64)> = trace
        .points
        .iter()
        .map(|p| (p[0].hypot(p[1]).ln(), theta_of(p[0], p[1])))
        .collect();
    let lr = r.ln();
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if (a.0 - lr) * (b.0 - lr) <= 0.0 && a.0 != b.0 {
            let s = (lr - a.0) / (b.0 - a.0);
            return Ok(a.1 + s * (b.1 - a.1));
        }
    }
    Err(Error::RadiusOutOfRange {
        r,
        lo: pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min).exp(),
        hi: pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max).exp(),
    })
}

/// Composite Simpson rule with `2n` panels.
fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let m = 2 * n;
    let h = (b - a) / m as f64;
    let mut s = f(a) + f(b);
    for i in 1..m {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// `H(r)` of `u_log` on the arcs of the corner domain between `Γ₊` and `Γ₋`.
pub fn u_log_arc_samples(radii: &[f64], gamma_minus: &CurveTrace) -> Result<HSamples> {
    let mut h = Vec::with_capacity(radii.len());
    for &r in radii {
        let (a, b) = (gamma_plus_angle(r)?, trace_angle(gamma_minus, r)?);
        let r2 = r * r;
        let f = |t: f64| {
            let v = r2 * (r.ln() * (2.0 * t).sin() + (t - FRAC_PI_2) * (2.0 * t).cos());
            v * v
        };
        h.push(simpson(f, a, b, 400));
    }
    Ok(HSamples {
        radii: radii.to_vec(),
        h,
    })
}

/// Log-spaced radii between `lo` and `hi`.
pub fn log_radii(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1).max(1) as f64))
        .collect()
}
