//! Quadrature rules: composite Newton–Cotes on uniform samples, Gauss–Legendre
//! panels and double-exponential (tanh–sinh) integration for endpoint
//! singularities.

use std::f64::consts::PI;

/// Composite trapezoid rule on uniformly spaced samples.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => h * (0.5 * (values[0] + values[n - 1]) + values[1..n - 1].iter().sum::<f64>()),
    }
}

/// Composite Simpson rule on uniformly spaced samples. An odd number of
/// intervals is closed with Simpson's 3/8 rule on the last three intervals.
pub fn simpson(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    if n < 3 {
        return trapezoid(values, h);
    }
    let intervals = n - 1;
    let (even_end, tail) = if intervals.is_multiple_of(2) {
        (n - 1, 0.0)
    } else if intervals >= 3 {
        let k = n - 4;
        let t = 3.0 * h / 8.0
            * (values[k] + 3.0 * values[k + 1] + 3.0 * values[k + 2] + values[k + 3]);
        (k, t)
    } else {
        return trapezoid(values, h);
    };
    let mut s = values[0] + values[even_end];
    for (i, v) in values.iter().enumerate().take(even_end).skip(1) {
        s += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    s * h / 3.0 + tail
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1);
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        let m = order.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(order, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(order, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[order - 1 - i] = x;
            weights[i] = w;
            weights[order - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Integral of `f` over `[a, b]` with one panel.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    /// Mapped nodes and weights for `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, w * half))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Tanh–sinh integration of `f` over `[a, b]`; tolerant of integrable
/// endpoint singularities. `f` is never evaluated at the endpoints.
pub fn tanh_sinh(a: f64, b: f64, rel_tol: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    if a == b {
        return 0.0;
    }
    const T_MAX: f64 = 4.0;
    let half = 0.5 * (b - a);
    let mut sum = PI / 2.0 * f(0.5 * (a + b));
    // Weighted pair contribution of the node t > 0.
    let mut pair = |t: f64| {
        let u = PI / 2.0 * t.sinh();
        let ch = u.cosh();
        let w = PI / 2.0 * t.cosh() / (ch * ch);
        // 1 - tanh(u), computed without cancellation
        let d = 1.0 / (u.exp() * ch);
        // nodes that round onto an endpoint are dropped
        let (xa, xb) = (a + half * d, b - half * d);
        let mut acc = 0.0;
        if xa > a {
            acc += f(xa);
        }
        if xb < b {
            acc += f(xb);
        }
        w * acc
    };
    let mut h = 0.5;
    let mut k = 1;
    while k as f64 * h <= T_MAX {
        sum += pair(k as f64 * h);
        k += 1;
    }
    let mut estimate = sum * h * half;
    for _ in 0..10 {
        h *= 0.5;
        let mut k = 1;
        while k as f64 * h <= T_MAX {
            sum += pair(k as f64 * h);
            k += 2;
        }
        let next = sum * h * half;
        let diff = (next - estimate).abs();
        estimate = next;
        if diff <= rel_tol * next.abs().max(1e-300) {
            break;
        }
    }
    estimate
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezoid_is_exact_on_constants_and_lines() {
        let v = vec![2.0; 11];
        assert!((trapezoid(&v, 0.1) - 2.0).abs() < 1e-14);
        let l: Vec<f64> = (0..11).map(|i| i as f64 * 0.1).collect();
        assert!((trapezoid(&l, 0.1) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn simpson_is_exact_on_cubics_for_both_parities() {
        for n in [7usize, 8, 21, 22] {
            let h = 1.0 / (n - 1) as f64;
            let v: Vec<f64> = (0..n).map(|i| (i as f64 * h).powi(3)).collect();
            assert!((simpson(&v, h) - 0.25).abs() < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let gl = GaussLegendre::new(8);
        assert!((gl.weights.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let i = gl.integrate(0.0, 2.0, |x| x.powi(15));
        assert!((i - 2f64.powi(16) / 16.0).abs() < 1e-9);
        let gl = GaussLegendre::new(20);
        let i = gl.integrate(0.0, PI, f64::sin);
        assert!((i - 2.0).abs() < 1e-14);
    }

    #[test]
    fn tanh_sinh_handles_endpoint_singularities() {
        let i = tanh_sinh(0.0, 1.0, 1e-14, |x| x.ln());
        assert!((i + 1.0).abs() < 1e-12);
        let i = tanh_sinh(0.0, 1.0, 1e-14, |x| (1.0 - x * x).powf(1.5));
        assert!((i - 3.0 * PI / 16.0).abs() < 1e-13);
        let i = tanh_sinh(0.0, 1.0, 1e-14, |x| x.powf(-0.5));
        assert!((i - 2.0).abs() < 1e-10);
    }
}
