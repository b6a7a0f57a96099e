//! Banded Hermitian matrices and eigenvalues by inertia counting.
//!
//! `LDL^H` without pivoting gives the inertia of `H - σI` (Sylvester), so the
//! number of eigenvalues below `σ` costs one `O(N b^2)` factorization.
//! Intervals holding a single eigenvalue are finished by inverse iteration
//! with a Kato–Temple certificate.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

pub trait BandScalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const ZERO: Self;
    fn conj(self) -> Self;
    fn re(self) -> f64;
    fn from_re(x: f64) -> Self;
    fn abs_sq(self) -> f64;
    fn scale(self, s: f64) -> Self;
}

impl BandScalar for f64 {
    const ZERO: Self = 0.0;
    fn conj(self) -> Self {
        self
    }
    fn re(self) -> f64 {
        self
    }
    fn from_re(x: f64) -> Self {
        x
    }
    fn abs_sq(self) -> f64 {
        self * self
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
}

impl BandScalar for Complex64 {
    const ZERO: Self = Complex64::new(0.0, 0.0);
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn re(self) -> f64 {
        self.re
    }
    fn from_re(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn abs_sq(self) -> f64 {
        self.norm_sqr()
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
}

/// Hermitian matrix stored by its lower band: entry `(i, j)`, `0 <= i - j <= b`.
#[derive(Debug, Clone)]
pub struct BandedHermitian<T> {
    n: usize,
    b: usize,
    data: Vec<T>,
}

impl<T: BandScalar> BandedHermitian<T> {
    pub fn zeros(n: usize, bandwidth: usize) -> Self {
        let b = bandwidth.min(n.saturating_sub(1));
        Self {
            n,
            b,
            data: vec![T::ZERO; n * (b + 1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.b
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j <= i && i - j <= self.b);
        i * (self.b + 1) + (i - j)
    }

    /// Adds `value` at `(i, j)` and its conjugate at `(j, i)`; for `i == j`
    /// only the real part is kept.
    pub fn add(&mut self, i: usize, j: usize, value: T) {
        let (r, c, v) = if i >= j {
            (i, j, value)
        } else {
            (j, i, value.conj())
        };
        assert!(r - c <= self.b, "entry ({i}, {j}) outside the band");
        let k = self.idx(r, c);
        self.data[k] = if r == c {
            self.data[k] + T::from_re(v.re())
        } else {
            self.data[k] + v
        };
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        if i >= j {
            if i - j > self.b {
                T::ZERO
            } else {
                self.data[self.idx(i, j)]
            }
        } else {
            self.get(j, i).conj()
        }
    }

    /// `y = H x`.
    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::ZERO; self.n];
        for i in 0..self.n {
            let row = &self.data[i * (self.b + 1)..(i + 1) * (self.b + 1)];
            y[i] = y[i] + row[0] * x[i];
            for d in 1..=self.b.min(i) {
                let a = row[d];
                let j = i - d;
                y[i] = y[i] + a * x[j];
                y[j] = y[j] + a.conj() * x[i];
            }
        }
        y
    }

    /// Gershgorin enclosure `[lo, hi]` of the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let mut radius = vec![0.0; self.n];
        for i in 0..self.n {
            for d in 1..=self.b.min(i) {
                let a = self.data[self.idx(i, i - d)].abs_sq().sqrt();
                radius[i] += a;
                radius[i - d] += a;
            }
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (i, r) in radius.iter().enumerate() {
            let d = self.data[self.idx(i, i)].re();
            lo = lo.min(d - r);
            hi = hi.max(d + r);
        }
        (lo, hi)
    }

    fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.abs_sq()).fold(0.0, f64::max).sqrt()
    }

    /// `LDL^H` of `H - σI`.
    pub fn ldl(&self, sigma: f64) -> Ldl<T> {
        let (n, b) = (self.n, self.b);
        let w_stride = b + 1;
        let mut w = self.data.clone();
        for i in 0..n {
            w[i * w_stride] = w[i * w_stride] - T::from_re(sigma);
        }
        let pivmin = f64::EPSILON * self.max_abs().max(sigma.abs()).max(1.0);
        let mut d = vec![0.0; n];
        let mut negatives = 0;
        let mut l = vec![T::ZERO; b];
        for i in 0..n {
            let mut di = w[i * w_stride].re();
            if di.abs() < pivmin {
                di = -pivmin;
            }
            if di < 0.0 {
                negatives += 1;
            }
            d[i] = di;
            let end = (i + b).min(n - 1);
            let m = end - i;
            for (s, lr) in l.iter_mut().enumerate().take(m) {
                let r = i + 1 + s;
                *lr = w[r * w_stride + (r - i)] / T::from_re(di);
                w[r * w_stride + (r - i)] = *lr;
            }
            for s in 0..m {
                let r = i + 1 + s;
                let lr_d = l[s].scale(di);
                let base = r * w_stride;
                for (t, lc) in l.iter().enumerate().take(s + 1) {
                    let c = i + 1 + t;
                    let k = base + (r - c);
                    w[k] = w[k] - lr_d * lc.conj();
                }
            }
        }
        Ldl {
            n,
            b,
            factors: w,
            d,
            negatives,
        }
    }

    /// Number of eigenvalues strictly below `sigma`.
    pub fn count_below(&self, sigma: f64) -> usize {
        self.ldl(sigma).negatives
    }

    /// All eigenvalues in `[lo, hi)`, ascending, repeated by multiplicity,
    /// to absolute accuracy `tol * max(1, |λ|)`.
    pub fn eigenvalues_in(&self, lo: f64, hi: f64, tol: f64) -> Vec<f64> {
        let c_lo = self.count_below(lo);
        let c_hi = self.count_below(hi);
        let mut out = Vec::with_capacity(c_hi.saturating_sub(c_lo));
        // depth-first from the left keeps the output sorted
        let mut stack = vec![(lo, hi, c_lo, c_hi)];
        while let Some((a, b, ca, cb)) = stack.pop() {
            if cb <= ca {
                continue;
            }
            let width_tol = tol * a.abs().max(b.abs()).max(1.0);
            if b - a <= width_tol {
                let mid = 0.5 * (a + b);
                out.extend(std::iter::repeat_n(mid, cb - ca));
                continue;
            }
            let mid = 0.5 * (a + b);
            let f = self.ldl(mid);
            if cb - ca == 1 {
                if let Some(theta) = self.inverse_iteration(&f, a, b, tol) {
                    out.push(theta);
                    continue;
                }
            }
            let cm = f.negatives;
            stack.push((mid, b, cm, cb));
            stack.push((a, mid, ca, cm));
        }
        out
    }

    /// Rayleigh quotient of inverse iteration with the factorization `f`,
    /// accepted only when its residual certifies the single eigenvalue in `(a, b)`.
    fn inverse_iteration(&self, f: &Ldl<T>, a: f64, b: f64, tol: f64) -> Option<f64> {
        let n = self.n;
        let mut x: Vec<T> = (0..n)
            .map(|i| T::from_re(((i as f64 * 0.618_033_988_749_895).fract() - 0.5) + 1e-3))
            .collect();
        normalize(&mut x);
        for _ in 0..12 {
            x = f.solve(&x);
            if !normalize(&mut x) {
                return None;
            }
            let hx = self.mul_vec(&x);
            let theta = dot(&x, &hx);
            let r = hx
                .iter()
                .zip(&x)
                .map(|(h, v)| (*h - v.scale(theta)).abs_sq())
                .sum::<f64>()
                .sqrt();
            if !(theta - r > a && theta + r < b) {
                continue;
            }
            // Kato–Temple: |θ - λ| <= r^2 / δ with δ the distance to the rest of the spectrum
            let delta = (theta - a).min(b - theta);
            if r * r / delta <= tol * theta.abs().max(1.0) {
                return Some(theta);
            }
        }
        None
    }
}

fn dot<T: BandScalar>(x: &[T], y: &[T]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a.conj() * *b).re()).sum()
}

fn normalize<T: BandScalar>(x: &mut [T]) -> bool {
    let norm = x.iter().map(|v| v.abs_sq()).sum::<f64>().sqrt();
    if !(norm.is_finite() && norm > 0.0) {
        return false;
    }
    for v in x.iter_mut() {
        *v = v.scale(1.0 / norm);
    }
    true
}

/// Factorization `H - σI = L D L^H` with unit lower-banded `L`.
#[derive(Debug, Clone)]
pub struct Ldl<T> {
    n: usize,
    b: usize,
    factors: Vec<T>,
    d: Vec<f64>,
    pub negatives: usize,
}

impl<T: BandScalar> Ldl<T> {
    pub fn solve(&self, y: &[T]) -> Vec<T> {
        let stride = self.b + 1;
        let mut z = y.to_vec();
        for i in 0..self.n {
            let mut acc = z[i];
            for d in 1..=self.b.min(i) {
                acc = acc - self.factors[i * stride + d] * z[i - d];
            }
            z[i] = acc;
        }
        for i in 0..self.n {
            z[i] = z[i] / T::from_re(self.d[i]);
        }
        for i in (0..self.n).rev() {
            let mut acc = z[i];
            for d in 1..=self.b.min(self.n - 1 - i) {
                let r = i + d;
                acc = acc - self.factors[r * stride + d].conj() * z[r];
            }
            z[i] = acc;
        }
        z
    }
}
