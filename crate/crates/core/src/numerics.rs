//! Shared one-dimensional kernels on uniform grids.

/// First derivative with a five-point stencil, one-sided near the ends.
pub fn derivative4(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 5, "derivative4 needs at least 5 samples");
    let mut d = vec![0.0; n];
    let c = 1.0 / (12.0 * h);
    d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) * c;
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) * c;
    for i in 2..n - 2 {
        d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) * c;
    }
    let m = n - 1;
    d[m - 1] = -(-3.0 * f[m] - 10.0 * f[m - 1] + 18.0 * f[m - 2] - 6.0 * f[m - 3] + f[m - 4]) * c;
    d[m] = -(-25.0 * f[m] + 48.0 * f[m - 1] - 36.0 * f[m - 2] + 16.0 * f[m - 3] - 3.0 * f[m - 4]) * c;
    d
}

/// Running integral from the first sample, fourth order (piecewise cubic).
pub fn cumulative4(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 4, "cumulative4 needs at least 4 samples");
    let mut c = vec![0.0; n];
    let k = h / 24.0;
    for i in 0..n - 1 {
        let piece = if i == 0 {
            9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]
        } else if i == n - 2 {
            f[n - 4] - 5.0 * f[n - 3] + 19.0 * f[n - 2] + 9.0 * f[n - 1]
        } else {
            -f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2]
        };
        c[i + 1] = c[i] + k * piece;
    }
    c
}

/// Running integral of `f` where `f(s) e^{-a s}` is smooth: piecewise-cubic
/// interpolation of that factor, integrated exactly against `e^{a s}`.
/// Exact when `f` is `e^{a s}` times a cubic.
pub fn cumulative_exp(f: &[f64], h: f64, a: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 4, "cumulative_exp needs at least 4 samples");
    let c = a * h;
    let first = exp_weights(c, [0.0, 1.0, 2.0, 3.0]);
    let mid = exp_weights(c, [-1.0, 0.0, 1.0, 2.0]);
    let last = exp_weights(c, [-2.0, -1.0, 0.0, 1.0]);
    let shift = |o: f64| (-c * o).exp();
    let scale: [[f64; 4]; 3] = [
        [shift(0.0), shift(1.0), shift(2.0), shift(3.0)],
        [shift(-1.0), shift(0.0), shift(1.0), shift(2.0)],
        [shift(-2.0), shift(-1.0), shift(0.0), shift(1.0)],
    ];
    let mut out = vec![0.0; n];
    for i in 0..n - 1 {
        let (w, sc, base) = if i == 0 {
            (&first, &scale[0], 0)
        } else if i == n - 2 {
            (&last, &scale[2], n - 4)
        } else {
            (&mid, &scale[1], i - 1)
        };
        let piece: f64 = (0..4).map(|j| w[j] * sc[j] * f[base + j]).sum();
        out[i + 1] = out[i] + h * piece;
    }
    out
}

/// `∫₀¹ e^{cx} L_j(x) dx` for the Lagrange basis on `nodes`.
fn exp_weights(c: f64, nodes: [f64; 4]) -> [f64; 4] {
    let moments: Vec<f64> = if c.abs() < 2.0 {
        (0..4)
            .map(|m| {
                let (mut term, mut sum) = (1.0, 0.0);
                for k in 0..40 {
                    sum += term / (m + k + 1) as f64;
                    term *= c / (k + 1) as f64;
                }
                sum
            })
            .collect()
    } else {
        let e = c.exp();
        let mut mm = vec![(e - 1.0) / c];
        for m in 1..4 {
            let prev = mm[m - 1];
            mm.push((e - m as f64 * prev) / c);
        }
        mm
    };
    let mut w = [0.0; 4];
    for j in 0..4 {
        // monomial coefficients of L_j
        let mut poly = vec![1.0];
        let mut denom = 1.0;
        for m in 0..4 {
            if m == j {
                continue;
            }
            let mut next = vec![0.0; poly.len() + 1];
            for (d, p) in poly.iter().enumerate() {
                next[d + 1] += p;
                next[d] -= nodes[m] * p;
            }
            poly = next;
            denom *= nodes[j] - nodes[m];
        }
        w[j] = poly.iter().zip(&moments).map(|(p, m)| p * m).sum::<f64>() / denom;
    }
    w
}

/// Weights and base index of four-point Lagrange interpolation at the
/// fractional index `u` of a uniform grid with `n` samples.
pub fn lagrange4(u: f64, n: usize) -> (usize, [f64; 4]) {
    assert!(n >= 4);
    let base = (u.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
    let xi = u - base as f64;
    let mut w = [0.0; 4];
    for (j, wj) in w.iter_mut().enumerate() {
        let mut p = 1.0;
        for m in 0..4 {
            if m != j {
                p *= (xi - m as f64) / (j as f64 - m as f64);
            }
        }
        *wj = p;
    }
    (base, w)
}

pub fn interp4(f: &[f64], u: f64) -> f64 {
    let (b, w) = lagrange4(u, f.len());
    (0..4).map(|j| w[j] * f[b + j]).sum()
}

/// Ordinary least squares for `y = a + b x`: returns (a, b, rms residual).
pub fn line_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64, f64)> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let rms = (x.iter().zip(y).map(|(u, v)| (v - a - b * u).powi(2)).sum::<f64>() / nf).sqrt();
    Some((a, b, rms))
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Bisection to full precision. `None` when the endpoints do not bracket.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64) -> Option<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if !(flo.is_finite() && fhi.is_finite()) || flo.signum() == fhi.signum() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo.min(hi) || mid >= lo.max(hi) {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_exact_on_quartics() {
        let h = 0.1;
        let f: Vec<f64> = (0..12).map(|i| (i as f64 * h).powi(4) - 2.0 * (i as f64 * h)).collect();
        let d = derivative4(&f, h);
        for (i, di) in d.iter().enumerate() {
            let x = i as f64 * h;
            assert!((di - (4.0 * x.powi(3) - 2.0)).abs() < 1e-12, "{i}");
        }
    }

    #[test]
    fn cumulative_exact_on_cubics() {
        let h = 0.25;
        let f: Vec<f64> = (0..9).map(|i| (i as f64 * h).powi(3)).collect();
        let c = cumulative4(&f, h);
        for (i, ci) in c.iter().enumerate() {
            let x = i as f64 * h;
            assert!((ci - x.powi(4) / 4.0).abs() < 1e-13);
        }
    }

    #[test]
    fn exponential_cumulative_is_exact_on_weighted_cubics() {
        let (n, h, a) = (40, 0.05, 5.0);
        let f: Vec<f64> = (0..n).map(|i| {
            let s = i as f64 * h;
            (a * s).exp() * (1.0 - s + 2.0 * s * s * s)
        }).collect();
        let c = cumulative_exp(&f, h, a);
        let big = n as f64 * h - h;
        // antiderivative of e^{as}(1 - s + 2s³)
        let prim = |s: f64| {
            let p = [1.0, -1.0, 0.0, 2.0];
            // ∫ e^{as} P = e^{as} Σ_k (-1)^k P^{(k)}/a^{k+1}
            let d0 = p[0] + p[1] * s + p[2] * s * s + p[3] * s * s * s;
            let d1 = p[1] + 2.0 * p[2] * s + 3.0 * p[3] * s * s;
            let d2 = 2.0 * p[2] + 6.0 * p[3] * s;
            let d3 = 6.0 * p[3];
            (a * s).exp() * (d0 / a - d1 / a.powi(2) + d2 / a.powi(3) - d3 / a.powi(4))
        };
        let want = prim(big) - prim(0.0);
        assert!((c[n - 1] - want).abs() < 1e-10 * want.abs(), "{} {want}", c[n - 1]);
        // reduces to the plain rule for a = 0 and also for large a·h
        let g: Vec<f64> = (0..n).map(|i| (i as f64 * h).powi(2)).collect();
        let (p, q) = (cumulative_exp(&g, h, 0.0), cumulative4(&g, h));
        assert!(p.iter().zip(&q).all(|(x, y)| (x - y).abs() < 1e-13));
        let f: Vec<f64> = (0..n).map(|i| (60.0 * i as f64 * h).exp()).collect();
        let c = cumulative_exp(&f, h, 60.0);
        let want = ((60.0 * big).exp() - 1.0) / 60.0;
        assert!((c[n - 1] / want - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cumulative_fourth_order_on_exp() {
        let err = |n: usize| {
            let h = 1.0 / (n - 1) as f64;
            let f: Vec<f64> = (0..n).map(|i| (i as f64 * h).exp()).collect();
            (cumulative4(&f, h)[n - 1] - (1f64.exp() - 1.0)).abs()
        };
        let ratio = err(41) / err(81);
        assert!(ratio > 14.0 && ratio < 18.0, "{ratio}");
    }

    #[test]
    fn interpolation_reproduces_cubics() {
        let f: Vec<f64> = (0..10).map(|i| (i as f64).powi(3) - i as f64).collect();
        for u in [0.0, 0.3, 4.5, 8.9, 9.0] {
            assert!((interp4(&f, u) - (u.powi(3) - u)).abs() < 1e-10);
        }
    }

    #[test]
    fn line_fit_and_median() {
        let (a, b, rms) = line_fit(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]).unwrap();
        assert!((a - 1.0).abs() < 1e-15 && (b - 2.0).abs() < 1e-15 && rms < 1e-15);
        assert!(line_fit(&[1.0, 1.0], &[0.0, 1.0]).is_none());
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
        assert!(bisect(|x| x * x + 1.0, 0.0, 2.0).is_none());
    }
}
