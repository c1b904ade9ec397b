//! One-dimensional differentiation and quadrature rules.
//!
//! Periodic rules are circulant and stored as a single row of coefficients;
//! the interval rules live on Chebyshev–Gauss nodes of `(−1, 1)`.

use crate::prelude::*;

/// First-derivative rule on the unit circle sampled at `m` equispaced points.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Stencil {
    /// Fourier differentiation (exact on trigonometric polynomials of degree `< m/2`).
    #[default]
    Spectral,
    /// Fourth-order central differences.
    Central4,
}

/// Coefficients `c` with `(Df)_i = Σ_k c_k f_{(i+k) mod m}` for period 1.
pub fn periodic_derivative_row(m: usize, stencil: Stencil) -> Vec<f64> {
    let mut row = vec![0.0; m];
    match stencil {
        Stencil::Spectral => {
            // D_{ij} = π (−1)^{i−j} cot(π (i−j)/m) for even m, π (−1)^{i−j} csc(π (i−j)/m) for odd m.
            for (k, c) in row.iter_mut().enumerate().skip(1) {
                let d = -(k as f64); // i − j with j = i + k
                let x = PI * d / m as f64;
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                *c = if m.is_multiple_of(2) { PI * sign / x.tan() } else { PI * sign / x.sin() };
            }
        }
        Stencil::Central4 => {
            let inv = m as f64 / 12.0;
            let idx = |k: isize| k.rem_euclid(m as isize) as usize;
            row[idx(1)] += 8.0 * inv;
            row[idx(-1)] -= 8.0 * inv;
            row[idx(2)] -= inv;
            row[idx(-2)] += inv;
        }
    }
    row
}

/// Chebyshev–Gauss nodes, interval differentiation matrix and Fejér weights.
#[derive(Clone, Debug, PartialEq)]
pub struct ChebyshevRule {
    theta: Vec<f64>,
    nodes: Vec<f64>,
    diff: Vec<f64>,
    weights: Vec<f64>,
}

impl ChebyshevRule {
    /// `n` interior nodes in ascending order.
    pub fn new(n: usize) -> Self {
        let theta: Vec<f64> = (0..n).map(|j| (2 * (n - 1 - j) + 1) as f64 * PI / (2 * n) as f64).collect();
        let nodes: Vec<f64> = theta.iter().map(|t| t.cos()).collect();
        let bary: Vec<f64> = theta
            .iter()
            .enumerate()
            .map(|(j, t)| if (n - 1 - j).is_multiple_of(2) { t.sin() } else { -t.sin() })
            .collect();
        let mut diff = vec![0.0; n * n];
        for i in 0..n {
            let mut diag = 0.0;
            for j in 0..n {
                if i != j {
                    let d = (bary[j] / bary[i]) / (nodes[i] - nodes[j]);
                    diff[i * n + j] = d;
                    diag -= d;
                }
            }
            diff[i * n + i] = diag;
        }
        let weights = theta
            .iter()
            .map(|t| {
                let mut s = 0.0;
                for k in 1..=n / 2 {
                    s += (2.0 * k as f64 * t).cos() / (4.0 * (k * k) as f64 - 1.0);
                }
                2.0 / n as f64 * (1.0 - 2.0 * s)
            })
            .collect();
        ChebyshevRule { theta, nodes, diff, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn differentiate(&self, f: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n).map(|i| self.diff[i * n..(i + 1) * n].iter().zip(f).map(|(a, b)| a * b).sum()).collect()
    }

    /// Transpose of the differentiation matrix applied to `f`.
    pub fn differentiate_transpose(&self, f: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut out = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                out[j] += self.diff[i * n + j] * f[i];
            }
        }
        out
    }

    pub fn integrate(&self, f: &[f64]) -> f64 {
        self.weights.iter().zip(f).map(|(w, x)| w * x).sum()
    }

    /// Primitive of the interpolant of `f` that vanishes at `−1`.
    pub fn antiderivative(&self, f: &[f64]) -> Vec<f64> {
        let n = self.len();
        // Chebyshev coefficients of the interpolant.
        let a: Vec<f64> = (0..n)
            .map(|k| {
                let s: f64 = self.theta.iter().zip(f).map(|(t, f)| f * (k as f64 * t).cos()).sum();
                if k == 0 {
                    s / n as f64
                } else {
                    2.0 * s / n as f64
                }
            })
            .collect();
        // ∫T₀ = T₁, ∫T₁ = T₂/4, ∫T_k = T_{k+1}/(2(k+1)) − T_{k−1}/(2(k−1)).
        let mut b = vec![0.0; n + 1];
        for (k, ak) in a.iter().enumerate() {
            match k {
                0 => b[1] += ak,
                1 => b[2] += ak / 4.0,
                _ => {
                    b[k + 1] += ak / (2.0 * (k + 1) as f64);
                    b[k - 1] -= ak / (2.0 * (k - 1) as f64);
                }
            }
        }
        let at_minus_one: f64 = b.iter().enumerate().map(|(k, c)| if k % 2 == 0 { *c } else { -c }).sum();
        self.theta
            .iter()
            .map(|t| b.iter().enumerate().map(|(k, c)| c * (k as f64 * t).cos()).sum::<f64>() - at_minus_one)
            .collect()
    }

    /// Barycentric interpolation of nodal values at `x`.
    pub fn interpolate(&self, f: &[f64], x: f64) -> f64 {
        let n = self.len();
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..n {
            let t = (2 * (n - 1 - j) + 1) as f64 * PI / (2 * n) as f64;
            let b = if (n - 1 - j).is_multiple_of(2) { t.sin() } else { -t.sin() };
            let d = x - self.nodes[j];
            if d == 0.0 {
                return f[j];
            }
            num += b / d * f[j];
            den += b / d;
        }
        num / den
    }
}

/// Precomputed twiddles for a length-`m` discrete Fourier transform.
#[derive(Clone, Debug)]
pub struct Dft {
    m: usize,
    twiddle: Vec<C64>,
}

impl Dft {
    pub fn new(m: usize) -> Self {
        let twiddle = (0..m).map(|k| C64::from_polar(1.0, -2.0 * PI * k as f64 / m as f64)).collect();
        Dft { m, twiddle }
    }

    pub fn len(&self) -> usize {
        self.m
    }
    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    /// In-place transform of every line along `axis` of a row-major array with
    /// `axes` axes of length `m`; `inverse` uses the conjugate kernel and `1/m`.
    pub fn transform_axis(&self, data: &mut [C64], axes: usize, axis: usize, inverse: bool) {
        let m = self.m;
        let stride = m.pow((axes - 1 - axis) as u32);
        let block = stride * m;
        let mut line = vec![C64::new(0.0, 0.0); m];
        let mut out = vec![C64::new(0.0, 0.0); m];
        for start in (0..data.len()).step_by(block) {
            for off in 0..stride {
                for (k, l) in line.iter_mut().enumerate() {
                    *l = data[start + off + k * stride];
                }
                for (f, o) in out.iter_mut().enumerate() {
                    let mut s = C64::new(0.0, 0.0);
                    for (k, l) in line.iter().enumerate() {
                        let tw = self.twiddle[(f * k) % m];
                        s += l * if inverse { tw.conj() } else { tw };
                    }
                    *o = if inverse { s / m as f64 } else { s };
                }
                for (k, o) in out.iter().enumerate() {
                    data[start + off + k * stride] = *o;
                }
            }
        }
    }

    /// Signed wavenumber of bin `k`.
    pub fn wavenumber(&self, k: usize) -> f64 {
        let m = self.m;
        if 2 * k < m {
            k as f64
        } else if 2 * k == m {
            0.0
        } else {
            k as f64 - m as f64
        }
    }
}
