//! Banded LU with partial pivoting (LAPACK `gbtf2` layout).

use crate::error::{Error, Result};

/// Square band matrix with `kl` sub- and `ku` super-diagonals, stored
/// column-major with `kl` extra rows for pivoting fill-in.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    ab: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let ldab = 2 * kl + ku + 1;
        BandMatrix {
            n,
            kl,
            ku,
            ldab,
            ab: vec![0.0; ldab * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        // A(i,j) sits in band row kl + ku + i - j
        j * self.ldab + self.kl + self.ku + i - j
    }

    pub fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && i + self.ku >= j && j + self.kl >= i
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(self.in_band(i, j), "entry ({i},{j}) outside band kl={} ku={}", self.kl, self.ku);
        let k = self.idx(i, j);
        self.ab[k] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.ab[self.idx(i, j)]
        } else {
            0.0
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for j in 0..self.n {
            let lo = j.saturating_sub(self.ku);
            let hi = (j + self.kl).min(self.n - 1);
            for (i, yi) in y.iter_mut().enumerate().take(hi + 1).skip(lo) {
                *yi += self.ab[self.idx(i, j)] * x[j];
            }
        }
        y
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.n)
            .map(|j| {
                let lo = j.saturating_sub(self.ku);
                let hi = (j + self.kl).min(self.n - 1);
                (lo..=hi).map(|i| self.ab[self.idx(i, j)].abs()).sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    pub fn factor(self) -> Result<BandLu> {
        let norm = self.norm1();
        let BandMatrix { n, kl, ku, ldab, mut ab } = self;
        let kv = kl + ku;
        let mut ipiv = vec![0usize; n];
        let mut ju = 0usize;
        let at = |i: usize, j: usize| j * ldab + kv + i - j;
        let mut min_piv = f64::INFINITY;
        let mut max_piv: f64 = 0.0;
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            let mut jp = 0;
            let mut best = ab[at(j, j)].abs();
            for i in 1..=km {
                let v = ab[at(j + i, j)].abs();
                if v > best {
                    best = v;
                    jp = i;
                }
            }
            ipiv[j] = j + jp;
            if !(best > f64::EPSILON * norm * 1e-2) {
                return Err(Error::Singular {
                    row: j,
                    pivot: best,
                    cond: f64::INFINITY,
                });
            }
            min_piv = min_piv.min(best);
            max_piv = max_piv.max(best);
            ju = ju.max((j + ku + jp).min(n - 1));
            if jp != 0 {
                for c in j..=ju {
                    ab.swap(at(j, c), at(j + jp, c));
                }
            }
            let piv = ab[at(j, j)];
            for i in 1..=km {
                ab[at(j + i, j)] /= piv;
            }
            for c in j + 1..=ju {
                let ujc = ab[at(j, c)];
                if ujc != 0.0 {
                    for i in 1..=km {
                        let l = ab[at(j + i, j)];
                        ab[at(j + i, c)] -= l * ujc;
                    }
                }
            }
        }
        let mut lu = BandLu {
            n,
            kl,
            ku,
            ldab,
            ab,
            ipiv,
            pivot_ratio: max_piv / min_piv,
            cond_estimate: 0.0,
        };
        lu.cond_estimate = lu.estimate_condition(norm);
        Ok(lu)
    }
}

#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    ab: Vec<f64>,
    ipiv: Vec<usize>,
    pivot_ratio: f64,
    cond_estimate: f64,
}

impl BandLu {
    pub fn solve(&self, b: &mut [f64]) {
        let (n, kl) = (self.n, self.kl);
        let kv = self.kl + self.ku;
        let at = |i: usize, j: usize| j * self.ldab + kv + i - j;
        for j in 0..n {
            let lm = kl.min(n - 1 - j);
            let l = self.ipiv[j];
            if l != j {
                b.swap(l, j);
            }
            let bj = b[j];
            if bj != 0.0 {
                for i in 1..=lm {
                    b[j + i] -= self.ab[at(j + i, j)] * bj;
                }
            }
        }
        for j in (0..n).rev() {
            b[j] /= self.ab[at(j, j)];
            let bj = b[j];
            if bj != 0.0 {
                for i in j.saturating_sub(kv)..j {
                    b[i] -= self.ab[at(i, j)] * bj;
                }
            }
        }
    }

    /// Largest over smallest pivot magnitude.
    pub fn pivot_ratio(&self) -> f64 {
        self.pivot_ratio
    }

    /// Lower bound on `‖A‖₁‖A⁻¹‖₁` from a few fixed probe vectors.
    pub fn condition_estimate(&self) -> f64 {
        self.cond_estimate
    }

    fn estimate_condition(&self, norm: f64) -> f64 {
        let n = self.n;
        let probes: [Box<dyn Fn(usize) -> f64>; 3] = [
            Box::new(|_| 1.0),
            Box::new(|i| if i % 2 == 0 { 1.0 } else { -1.0 }),
            Box::new(move |i| 1.0 - 2.0 * i as f64 / n.max(2) as f64),
        ];
        let mut best: f64 = 0.0;
        for p in probes.iter() {
            let mut x: Vec<f64> = (0..n).map(p).collect();
            let bnorm: f64 = x.iter().map(|v| v.abs()).sum();
            self.solve(&mut x);
            let xnorm: f64 = x.iter().map(|v| v.abs()).sum();
            best = best.max(xnorm / bnorm);
        }
        norm * best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lcg(seed: &mut u64) -> f64 {
        *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((*seed >> 11) as f64 / (1u64 << 53) as f64) - 0.5
    }

    #[test]
    fn solves_random_banded_system_with_pivoting() {
        let (n, kl, ku) = (40, 3, 5);
        let mut seed = 7;
        let mut a = BandMatrix::zeros(n, kl, ku);
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                // weak diagonal forces row exchanges
                let v = lcg(&mut seed);
                a.add(i, j, if i == j { 0.01 * v } else { v });
            }
        }
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let b = a.matvec(&x);
        let lu = a.clone().factor().unwrap();
        let mut y = b.clone();
        lu.solve(&mut y);
        let err = x.iter().zip(&y).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        assert!(err < 1e-10, "{err}");
        assert!(lu.condition_estimate() >= 1.0);
    }

    #[test]
    fn identity_condition_is_one() {
        let mut a = BandMatrix::zeros(10, 1, 1);
        for i in 0..10 {
            a.add(i, i, 2.0);
        }
        let lu = a.factor().unwrap();
        assert!((lu.condition_estimate() - 1.0).abs() < 1e-15);
        assert_eq!(lu.pivot_ratio(), 1.0);
    }

    #[test]
    fn singular_reported() {
        let mut a = BandMatrix::zeros(3, 1, 1);
        a.add(0, 0, 1.0);
        a.add(0, 1, 1.0);
        a.add(1, 0, 1.0);
        a.add(1, 1, 1.0);
        a.add(2, 2, 1.0);
        assert!(matches!(a.factor(), Err(Error::Singular { row: 1, .. })));
    }
}
