//! Small dense complex matrices (dimension ≤ 3) used pointwise on grids,
//! mixed discriminants, and deterministic summation.

use crate::prelude::*;
use core::ops::{Add, Mul, Neg, Sub};

pub const MAX_DIM: usize = 3;

/// An `n × n` complex matrix with `n ≤ 3`, stored inline (row-major).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat {
    n: usize,
    a: [C64; MAX_DIM * MAX_DIM],
}

const ZERO: C64 = C64::new(0.0, 0.0);

impl Mat {
    pub fn zeros(n: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&n), "Mat supports 1 ≤ n ≤ 3");
        Mat { n, a: [ZERO; MAX_DIM * MAX_DIM] }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, C64::new(1.0, 0.0))
    }

    pub fn scalar(n: usize, s: C64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = s;
        }
        m
    }

    /// Real diagonal matrix.
    pub fn diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = C64::new(x, 0.0);
        }
        m
    }

    pub fn from_rows(n: usize, rows: &[C64]) -> Self {
        assert_eq!(rows.len(), n * n);
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = rows[i * n + j];
            }
        }
        m
    }

    pub fn from_real_rows(n: usize, rows: &[f64]) -> Self {
        assert_eq!(rows.len(), n * n);
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = C64::new(rows[i * n + j], 0.0);
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut m = *self;
        for x in m.a.iter_mut() {
            *x *= s;
        }
        m
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn dagger(&self) -> Self {
        let mut m = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m[(i, j)] = self[(j, i)].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m[(i, j)] = self[(j, i)];
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        let mut m = *self;
        for x in m.a.iter_mut() {
            *x = x.conj();
        }
        m
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn det(&self) -> C64 {
        let m = self;
        match self.n {
            1 => m[(0, 0)],
            2 => m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)],
            _ => {
                m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
                    - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
                    + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)])
            }
        }
    }

    /// Adjugate (transpose of the cofactor matrix): `adj(M)·M = det(M)·I`.
    pub fn adj(&self) -> Self {
        let m = self;
        let mut r = Self::zeros(self.n);
        match self.n {
            1 => r[(0, 0)] = C64::new(1.0, 0.0),
            2 => {
                r[(0, 0)] = m[(1, 1)];
                r[(0, 1)] = -m[(0, 1)];
                r[(1, 0)] = -m[(1, 0)];
                r[(1, 1)] = m[(0, 0)];
            }
            _ => {
                for i in 0..3 {
                    for j in 0..3 {
                        // cofactor C_ji goes to r[i][j]
                        let (r0, r1) = others(j);
                        let (c0, c1) = others(i);
                        let minor = m[(r0, c0)] * m[(r1, c1)] - m[(r0, c1)] * m[(r1, c0)];
                        let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                        r[(i, j)] = minor * sign;
                    }
                }
            }
        }
        r
    }

    pub fn inv(&self) -> Option<Self> {
        let d = self.det();
        if d.norm() == 0.0 || !d.norm().is_finite() {
            return None;
        }
        Some(self.adj().scale(d.inv()))
    }

    /// `tr(self · other)` without forming the product.
    pub fn trace_mul(&self, other: &Mat) -> C64 {
        let mut s = ZERO;
        for i in 0..self.n {
            for k in 0..self.n {
                s += self[(i, k)] * other[(k, i)];
            }
        }
        s
    }

    pub fn max_abs(&self) -> f64 {
        self.a[..self.n * self.n].iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn hermitian_defect(&self) -> f64 {
        (*self - self.dagger()).max_abs()
    }

    /// Real part of the Hermitian quadratic form `x† M x`.
    pub fn quad(&self, x: &[C64]) -> f64 {
        let mut s = ZERO;
        for i in 0..self.n {
            for j in 0..self.n {
                s += x[i].conj() * self[(i, j)] * x[j];
            }
        }
        s.re
    }

    /// Eigenvalues of a Hermitian matrix, ascending (closed forms, n ≤ 2;
    /// Jacobi sweeps for n = 3).
    pub fn hermitian_eigenvalues(&self) -> [f64; MAX_DIM] {
        let m = self;
        let mut out = [0.0; MAX_DIM];
        match self.n {
            1 => out[0] = m[(0, 0)].re,
            2 => {
                let a = m[(0, 0)].re;
                let d = m[(1, 1)].re;
                let b = m[(0, 1)].norm();
                let mean = 0.5 * (a + d);
                let rad = (0.25 * (a - d) * (a - d) + b * b).sqrt();
                out[0] = mean - rad;
                out[1] = mean + rad;
            }
            _ => {
                let ev = crate::pointwise::hermitian_eigenvalues_dyn(self);
                out[..3].copy_from_slice(&ev[..3]);
            }
        }
        out
    }

    /// Cholesky-based positivity test with a relative tolerance on the
    /// smallest eigenvalue.
    pub fn is_positive_definite(&self) -> bool {
        let ev = self.hermitian_eigenvalues();
        let n = self.n;
        let max = ev[n - 1];
        max > 0.0 && ev[0] > 1e-12 * max
    }
}

fn others(i: usize) -> (usize, usize) {
    match i {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

impl core::ops::Index<(usize, usize)> for Mat {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.a[i * MAX_DIM + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Mat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.a[i * MAX_DIM + j]
    }
}

impl Add for Mat {
    type Output = Mat;
    fn add(mut self, o: Mat) -> Mat {
        debug_assert_eq!(self.n, o.n);
        for (x, y) in self.a.iter_mut().zip(o.a.iter()) {
            *x += *y;
        }
        self
    }
}

impl Sub for Mat {
    type Output = Mat;
    fn sub(mut self, o: Mat) -> Mat {
        debug_assert_eq!(self.n, o.n);
        for (x, y) in self.a.iter_mut().zip(o.a.iter()) {
            *x -= *y;
        }
        self
    }
}

impl Neg for Mat {
    type Output = Mat;
    fn neg(self) -> Mat {
        self.scale_re(-1.0)
    }
}

impl Mul for Mat {
    type Output = Mat;
    fn mul(self, o: Mat) -> Mat {
        let n = self.n;
        let mut r = Mat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut s = ZERO;
                for k in 0..n {
                    s += self[(i, k)] * o[(k, j)];
                }
                r[(i, j)] = s;
            }
        }
        r
    }
}

/// Mixed discriminant `D(M₁,…,Mₙ)`: the symmetric multilinear form with
/// `D(M,…,M) = det M`, computed by polarization.
pub fn mixed_discriminant(mats: &[Mat]) -> C64 {
    let n = mats.len();
    assert!(n >= 1);
    let dim = mats[0].dim();
    assert_eq!(dim, n, "mixed discriminant needs n matrices of size n");
    let mut total = ZERO;
    for mask in 1u32..(1 << n) {
        let mut s = Mat::zeros(dim);
        for (i, m) in mats.iter().enumerate() {
            if mask & (1 << i) != 0 {
                s = s + *m;
            }
        }
        let k = mask.count_ones() as usize;
        let sign = if (n - k).is_multiple_of(2) { 1.0 } else { -1.0 };
        total += s.det() * sign;
    }
    total / factorial(n)
}

/// `Σ_{j=0}^{n} D(a^{(j)}, b^{(n-j)})`, the integrand of energy-type
/// functionals `Σ_j a^j ∧ b^{n-j}` (divided by `n!`).
pub fn energy_kernel(a: &Mat, b: &Mat) -> C64 {
    let n = a.dim();
    match n {
        1 => a[(0, 0)] + b[(0, 0)],
        2 => a.det() + b.det() + mixed_discriminant(&[*a, *b]),
        _ => {
            let mut s = ZERO;
            for j in 0..=n {
                let mut list = Vec::with_capacity(n);
                list.extend(std::iter::repeat_n(*a, j));
                list.extend(std::iter::repeat_n(*b, n - j));
                s += mixed_discriminant(&list);
            }
            s
        }
    }
}

/// `Σ_{j=0}^{n-1} D(η, a^{(j)}, b^{(n-1-j)})`, the integrand of twisted
/// energies (divided by `n!`).
pub fn twisted_energy_kernel(eta: &Mat, a: &Mat, b: &Mat) -> C64 {
    let n = a.dim();
    match n {
        1 => eta[(0, 0)],
        2 => mixed_discriminant(&[*eta, *a]) + mixed_discriminant(&[*eta, *b]),
        _ => {
            let mut s = ZERO;
            for j in 0..n {
                let mut list = Vec::with_capacity(n);
                list.push(*eta);
                list.extend(std::iter::repeat_n(*a, j));
                list.extend(std::iter::repeat_n(*b, n - 1 - j));
                s += mixed_discriminant(&list);
            }
            s
        }
    }
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Pairwise (cascade) summation; the result does not depend on anything but
/// the order of the input slice.
pub fn pairwise_sum(x: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if x.len() <= BLOCK {
        return x.iter().sum();
    }
    let mid = x.len() / 2;
    pairwise_sum(&x[..mid]) + pairwise_sum(&x[mid..])
}

pub fn pairwise_sum_c(x: &[C64]) -> C64 {
    const BLOCK: usize = 32;
    if x.len() <= BLOCK {
        return x.iter().sum();
    }
    let mid = x.len() / 2;
    pairwise_sum_c(&x[..mid]) + pairwise_sum_c(&x[mid..])
}

pub fn sup_norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn mean(x: &[f64]) -> f64 {
    pairwise_sum(x) / x.len() as f64
}
