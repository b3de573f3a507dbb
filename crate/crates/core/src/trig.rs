//! Real trigonometric polynomials on the circle and uniform sampling grids.
//!
//! A polynomial is stored as `a0 + sum_k (cos[k-1] cos k t + sin[k-1] sin k t)`.
//! Grid sampling uses tabulated `cos(2 pi m / n)` with `m = k j mod n`, so
//! samples at grid nodes carry no accumulated phase error.

use std::f64::consts::TAU;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly {
    a0: f64,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl TrigPoly {
    /// Builds a polynomial, zero-padding the shorter coefficient list.
    pub fn new(a0: f64, mut cos: Vec<f64>, mut sin: Vec<f64>) -> Self {
        let degree = cos.len().max(sin.len());
        cos.resize(degree, 0.0);
        sin.resize(degree, 0.0);
        Self { a0, cos, sin }
    }

    pub fn constant(a0: f64) -> Self {
        Self::new(a0, Vec::new(), Vec::new())
    }

    pub fn a0(&self) -> f64 {
        self.a0
    }

    pub fn cos_coeffs(&self) -> &[f64] {
        &self.cos
    }

    pub fn sin_coeffs(&self) -> &[f64] {
        &self.sin
    }

    pub fn degree(&self) -> usize {
        self.cos.len()
    }

    /// Coefficients of harmonic `k` (`k >= 1`), zero beyond the degree.
    pub fn harmonic(&self, k: usize) -> (f64, f64) {
        if k == 0 || k > self.degree() {
            (0.0, 0.0)
        } else {
            (self.cos[k - 1], self.sin[k - 1])
        }
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let theta = theta.rem_euclid(TAU);
        let mut value = self.a0;
        for (i, (c, s)) in self.cos.iter().zip(&self.sin).enumerate() {
            let (sk, ck) = ((i + 1) as f64 * theta).sin_cos();
            value += c * ck + s * sk;
        }
        value
    }

    /// Applies `f(k, c_k, s_k) -> (c_k', s_k')` to every harmonic `k >= 1`.
    pub fn map_harmonics(&self, a0: f64, f: impl Fn(usize, f64, f64) -> (f64, f64)) -> Self {
        let (cos, sin) = self
            .cos
            .iter()
            .zip(&self.sin)
            .enumerate()
            .map(|(i, (&c, &s))| f(i + 1, c, s))
            .unzip();
        Self { a0, cos, sin }
    }

    pub fn derivative(&self) -> Self {
        self.map_harmonics(0.0, |k, c, s| (k as f64 * s, -(k as f64) * c))
    }

    /// `p + p''`: harmonic `k` is scaled by `1 - k^2`.
    pub fn curvature(&self) -> Self {
        self.map_harmonics(self.a0, |k, c, s| {
            let f = 1.0 - (k * k) as f64;
            (f * c, f * s)
        })
    }

    /// `self + t * other`, padded to the larger degree.
    pub fn add_scaled(&self, other: &Self, t: f64) -> Self {
        let degree = self.degree().max(other.degree());
        let mut cos = vec![0.0; degree];
        let mut sin = vec![0.0; degree];
        for k in 1..=degree {
            let (c1, s1) = self.harmonic(k);
            let (c2, s2) = other.harmonic(k);
            cos[k - 1] = c1 + t * c2;
            sin[k - 1] = s1 + t * s2;
        }
        Self {
            a0: self.a0 + t * other.a0,
            cos,
            sin,
        }
    }

    pub fn scaled(&self, t: f64) -> Self {
        self.map_harmonics(t * self.a0, |_, c, s| (t * c, t * s))
    }

    /// Exact product; the degree of the result is the sum of the degrees.
    pub fn mul(&self, other: &Self) -> Self {
        let degree = self.degree() + other.degree();
        let mut a0 = 0.0;
        let mut cos = vec![0.0; degree];
        let mut sin = vec![0.0; degree];
        // Index 0 carries the constant term as a cosine of order zero.
        let lhs = |k: usize| {
            if k == 0 {
                (self.a0, 0.0)
            } else {
                self.harmonic(k)
            }
        };
        let rhs = |k: usize| {
            if k == 0 {
                (other.a0, 0.0)
            } else {
                other.harmonic(k)
            }
        };
        let mut add_cos = |k: isize, v: f64| {
            let k = k.unsigned_abs();
            if k == 0 {
                a0 += v;
            } else {
                cos[k - 1] += v;
            }
        };
        let mut sin_terms: Vec<(isize, f64)> = Vec::new();
        for m in 0..=self.degree() {
            let (cm, sm) = lhs(m);
            for n in 0..=other.degree() {
                let (cn, sn) = rhs(n);
                let (mi, ni) = (m as isize, n as isize);
                // cos m cos n = [cos(m-n) + cos(m+n)] / 2
                add_cos(mi - ni, 0.5 * cm * cn);
                add_cos(mi + ni, 0.5 * cm * cn);
                // sin m sin n = [cos(m-n) - cos(m+n)] / 2
                add_cos(mi - ni, 0.5 * sm * sn);
                add_cos(mi + ni, -0.5 * sm * sn);
                // cos m sin n = [sin(m+n) + sin(n-m)] / 2
                sin_terms.push((mi + ni, 0.5 * cm * sn));
                sin_terms.push((ni - mi, 0.5 * cm * sn));
                // sin m cos n = [sin(m+n) + sin(m-n)] / 2
                sin_terms.push((mi + ni, 0.5 * sm * cn));
                sin_terms.push((mi - ni, 0.5 * sm * cn));
            }
        }
        for (k, v) in sin_terms {
            if k != 0 {
                sin[k.unsigned_abs() - 1] += k.signum() as f64 * v;
            }
        }
        Self { a0, cos, sin }
    }

    /// Exact integral over `[from, to]`.
    pub fn integral(&self, from: f64, to: f64) -> f64 {
        let mut total = self.a0 * (to - from);
        for (i, (c, s)) in self.cos.iter().zip(&self.sin).enumerate() {
            let k = (i + 1) as f64;
            let (sb, cb) = (k * to).sin_cos();
            let (sa, ca) = (k * from).sin_cos();
            total += (c * (sb - sa) - s * (cb - ca)) / k;
        }
        total
    }

    /// Integral over a full period.
    pub fn period_integral(&self) -> f64 {
        TAU * self.a0
    }

    /// Global minimum as `(theta, value)`: dense scan followed by golden-section
    /// refinement of the lowest local minima.
    pub fn minimum(&self) -> (f64, f64) {
        let n = (64 * (self.degree() + 1)).max(512);
        let step = TAU / n as f64;
        let samples: Vec<f64> = (0..n).map(|j| self.eval(j as f64 * step)).collect();
        let mut candidates: Vec<usize> = (0..n)
            .filter(|&j| {
                let prev = samples[(j + n - 1) % n];
                let next = samples[(j + 1) % n];
                samples[j] <= prev && samples[j] <= next
            })
            .collect();
        candidates.sort_by(|&a, &b| samples[a].total_cmp(&samples[b]).then(a.cmp(&b)));
        candidates.truncate(4);
        let mut best = (0.0, f64::INFINITY);
        for j in candidates {
            let centre = j as f64 * step;
            let (theta, value) = golden_min(|t| self.eval(t), centre - step, centre + step);
            if value < best.1 {
                best = (theta.rem_euclid(TAU), value);
            }
        }
        if !best.1.is_finite() {
            // NaN coefficients
            best = (0.0, self.a0);
        }
        best
    }

    pub fn maximum(&self) -> (f64, f64) {
        let (theta, value) = self.scaled(-1.0).minimum();
        (theta, -value)
    }

    pub fn is_finite(&self) -> bool {
        self.a0.is_finite() && self.cos.iter().chain(&self.sin).all(|v| v.is_finite())
    }
}

fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Uniform grid `theta_j = 2 pi j / n` with tabulated unit vectors.
#[derive(Clone, Debug)]
pub struct Grid {
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl Grid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::BadNodeCount(n));
        }
        let (sin, cos) = (0..n)
            .map(|j| (TAU * j as f64 / n as f64).sin_cos())
            .unzip();
        Ok(Self { cos, sin })
    }

    pub fn len(&self) -> usize {
        self.cos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cos.is_empty()
    }

    pub fn angle(&self, j: usize) -> f64 {
        TAU * j as f64 / self.len() as f64
    }

    /// Outward unit normal `u(theta_j)`.
    pub fn normal(&self, j: usize) -> [f64; 2] {
        [self.cos[j], self.sin[j]]
    }

    pub fn sample(&self, p: &TrigPoly) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|j| {
                let mut value = p.a0;
                let mut idx = 0usize;
                for (c, s) in p.cos.iter().zip(&p.sin) {
                    idx = (idx + j) % n;
                    value += c * self.cos[idx] + s * self.sin[idx];
                }
                value
            })
            .collect()
    }
}

/// Smallest power of two that is at least `n` (and at least 8).
pub fn pow2_at_least(n: usize) -> usize {
    n.max(8).next_power_of_two()
}
