//! Flat complex torus `ℂⁿ/(ℤ + iℤ)ⁿ` sampled on a uniform periodic grid.
//!
//! Real axes are ordered `(x₁, y₁, …, xₙ, yₙ)` with `z_j = x_j + i y_j`; samples
//! are stored row-major with the last axis fastest. Complex derivatives are
//! `∂_j = ½(D_{x_j} − i D_{y_j})` and `∂̄_j = ½(D_{x_j} + i D_{y_j})` for a
//! circulant first-derivative rule `D`.

use crate::error::{Error, Result};
use crate::geometry::{Backend, Covector, FormField};
use crate::linalg::{factorial, Mat};
use crate::prelude::*;
use crate::random::TrigSeries;
use crate::spectral::{periodic_derivative_row, Dft, Stencil};

#[derive(Clone, Debug, PartialEq)]
pub struct TorusGrid {
    dim: usize,
    m: usize,
    stencil: Stencil,
    row: Vec<f64>,
    weights: Vec<f64>,
}

impl TorusGrid {
    /// `dim ∈ {1, 2}` complex dimensions, `m ≥ 4` points per real axis.
    pub fn new(dim: usize, m: usize, stencil: Stencil) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::InvalidGrid("torus dimension must be 1 or 2"));
        }
        if m < 4 {
            return Err(Error::InvalidGrid("need at least 4 points per axis"));
        }
        let total = m.pow(2 * dim as u32);
        let w = factorial(dim) / total as f64;
        Ok(TorusGrid { dim, m, stencil, row: periodic_derivative_row(m, stencil), weights: vec![w; total] })
    }

    pub fn points_per_axis(&self) -> usize {
        self.m
    }
    pub fn spacing(&self) -> f64 {
        1.0 / self.m as f64
    }
    pub fn stencil(&self) -> Stencil {
        self.stencil
    }
    pub fn axes(&self) -> usize {
        2 * self.dim
    }

    /// Real coordinates of sample `idx`.
    pub fn coords(&self, idx: usize) -> Vec<f64> {
        let mut c = vec![0.0; self.axes()];
        let mut r = idx;
        for a in (0..self.axes()).rev() {
            c[a] = (r % self.m) as f64 / self.m as f64;
            r /= self.m;
        }
        c
    }

    pub fn sample(&self, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
        (0..self.len()).map(|i| f(&self.coords(i))).collect()
    }

    /// Samples of a trigonometric series, via one inverse transform. Agrees
    /// with pointwise evaluation, including aliasing of frequencies beyond
    /// the grid.
    pub fn sample_series(&self, s: &TrigSeries) -> Vec<f64> {
        let axes = self.axes();
        let mut data = vec![C64::new(0.0, 0.0); self.len()];
        let scale = self.len() as f64 * 0.5;
        let bin = |k: &[i32], sign: i32| -> usize {
            k.iter().fold(0, |acc, &k| acc * self.m + (sign * k).rem_euclid(self.m as i32) as usize)
        };
        for (k, a, b) in s.terms() {
            assert_eq!(k.len(), axes, "series and grid disagree on the number of axes");
            data[bin(k, 1)] += C64::new(*a, -*b) * scale;
            data[bin(k, -1)] += C64::new(*a, *b) * scale;
        }
        self.from_fourier(data)
    }

    pub fn constant_form(&self, m: Mat) -> FormField {
        vec![m; self.len()]
    }

    /// Eigenvalue of the derivative rule on `e^{2πiκx}` for `κ = 0..m`.
    pub fn derivative_symbol(&self) -> Vec<C64> {
        let m = self.m;
        (0..m)
            .map(|f| {
                self.row
                    .iter()
                    .enumerate()
                    .map(|(k, c)| C64::from_polar(*c, 2.0 * PI * (f * k % m) as f64 / m as f64))
                    .sum()
            })
            .collect()
    }

    /// Discrete Fourier coefficients over all axes, in sample order.
    pub fn to_fourier(&self, f: &[f64]) -> Vec<C64> {
        let dft = Dft::new(self.m);
        let mut data: Vec<C64> = f.iter().map(|x| C64::new(*x, 0.0)).collect();
        for a in 0..self.axes() {
            dft.transform_axis(&mut data, self.axes(), a, false);
        }
        data
    }

    /// Inverse of [`Self::to_fourier`], keeping the real part.
    pub fn from_fourier(&self, mut data: Vec<C64>) -> Vec<f64> {
        let dft = Dft::new(self.m);
        for a in 0..self.axes() {
            dft.transform_axis(&mut data, self.axes(), a, true);
        }
        data.into_iter().map(|z| z.re).collect()
    }

    /// Symbol of `f ↦ tr(A ∂∂̄f)` for constant `A`, one entry per Fourier mode.
    pub fn trace_ddbar_symbol(&self, a: &Mat) -> Vec<C64> {
        let sigma = self.derivative_symbol();
        let n = self.dim;
        (0..self.len())
            .map(|idx| {
                let bins: Vec<usize> = self.coords(idx).iter().map(|c| (c * self.m as f64).round() as usize % self.m).collect();
                let d = |j: usize| 0.5 * (sigma[bins[2 * j]] - C64::new(0.0, 1.0) * sigma[bins[2 * j + 1]]);
                let db = |k: usize| 0.5 * (sigma[bins[2 * k]] + C64::new(0.0, 1.0) * sigma[bins[2 * k + 1]]);
                let mut s = C64::new(0.0, 0.0);
                for j in 0..n {
                    for k in 0..n {
                        s += a[(k, j)] * d(j) * db(k);
                    }
                }
                s
            })
            .collect()
    }

    /// Solves `tr(A ∂∂̄x) = f` on mean-free data; the constant mode and any
    /// mode the rule cannot see are set to zero.
    pub fn solve_trace_ddbar(&self, a: &Mat, f: &[f64]) -> Vec<f64> {
        let sym = self.trace_ddbar_symbol(a);
        let scale = sym.iter().fold(0.0f64, |m, s| m.max(s.norm()));
        let fh = self.to_fourier(f);
        let xh = fh
            .iter()
            .zip(&sym)
            .map(|(f, s)| if s.norm() <= 1e-12 * scale { C64::new(0.0, 0.0) } else { f / s })
            .collect();
        self.from_fourier(xh)
    }

    /// Derivative along real axis `axis`.
    pub fn apply_axis(&self, f: &[f64], axis: usize) -> Vec<f64> {
        let m = self.m;
        let stride = m.pow((self.axes() - 1 - axis) as u32);
        let block = stride * m;
        let mut out = vec![0.0; f.len()];
        let nz: Vec<(usize, f64)> = self.row.iter().copied().enumerate().filter(|(_, c)| *c != 0.0).collect();
        for start in (0..f.len()).step_by(block) {
            for off in 0..stride {
                let base = start + off;
                for i in 0..m {
                    let mut s = 0.0;
                    for &(k, c) in &nz {
                        s += c * f[base + ((i + k) % m) * stride];
                    }
                    out[base + i * stride] = s;
                }
            }
        }
        out
    }

    /// Transpose of [`apply_axis`](Self::apply_axis).
    pub fn apply_axis_transpose(&self, f: &[f64], axis: usize) -> Vec<f64> {
        // Rules are antisymmetric circulants.
        self.apply_axis(f, axis).into_iter().map(|x| -x).collect()
    }

    /// All real second derivatives `D_a D_b f` for `a ≤ b`, keyed by `(a, b)`.
    fn hessian_real(&self, f: &[f64]) -> Vec<Vec<f64>> {
        let ax = self.axes();
        let first: Vec<Vec<f64>> = (0..ax).map(|a| self.apply_axis(f, a)).collect();
        let mut out = Vec::with_capacity(ax * ax);
        for a in 0..ax {
            for b in 0..ax {
                if b < a {
                    out.push(Vec::new());
                } else {
                    out.push(self.apply_axis(&first[a], b));
                }
            }
        }
        out
    }

    /// `Σ_{j,k} ∂_j∂̄_k` of a matrix field contracted as `Σ ∂̄_k ∂_j A_{kj}`;
    /// the adjoint of `f ↦ tr(A ∂∂̄f)` under the bilinear pairing.
    pub fn ddbar_adjoint(&self, a: &[Mat]) -> Vec<f64> {
        let n = self.dim;
        let len = self.len();
        // tr(A H) = Σ_{jk} A_{kj} ∂_j∂̄_k f, and ∂_j∂̄_k = ¼(D_xj − iD_yj)(D_xk + iD_yk).
        let mut total = vec![0.0; len];
        for j in 0..n {
            for k in 0..n {
                let re: Vec<f64> = a.iter().map(|m| m[(k, j)].re).collect();
                let im: Vec<f64> = a.iter().map(|m| m[(k, j)].im).collect();
                // Real part of A_{kj}·¼[(XjXk + YjYk) + i(XjYk − YjXk)] f.
                let (xj, yj, xk, yk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
                let t1 = self.apply_axis(&self.apply_axis(&re, xk), xj);
                let t2 = self.apply_axis(&self.apply_axis(&re, yk), yj);
                let t3 = self.apply_axis(&self.apply_axis(&im, yk), xj);
                let t4 = self.apply_axis(&self.apply_axis(&im, xk), yj);
                for i in 0..len {
                    // Transposes of two first derivatives cancel in sign.
                    total[i] += 0.25 * (t1[i] + t2[i] - (t3[i] - t4[i]));
                }
            }
        }
        total
    }

    /// `∂̄_j` of a complex field.
    pub fn dzbar_complex(&self, f: &[C64]) -> Vec<Covector> {
        let re: Vec<f64> = f.iter().map(|z| z.re).collect();
        let im: Vec<f64> = f.iter().map(|z| z.im).collect();
        let dre = self.dz(&re);
        let dim_ = self.dz(&im);
        let i = C64::new(0.0, 1.0);
        dre.iter()
            .zip(&dim_)
            .map(|(a, b)| {
                let mut c = [C64::new(0.0, 0.0); 3];
                for j in 0..self.dim {
                    c[j] = a[j].conj() + i * b[j].conj();
                }
                c
            })
            .collect()
    }

    /// Pointwise `|∂̄∇^{1,0}u|²_g` and the inverse metrics used.
    fn lichnerowicz_density(&self, u: &[f64], g: &[Mat]) -> Vec<f64> {
        let n = self.dim;
        let du = self.dz(u);
        let ginv: Vec<Mat> = g.iter().map(|m| m.inv().unwrap_or_else(|| Mat::zeros(n))).collect();
        // V_j = Σ_p (g⁻¹)_{pj} ∂̄_p u.
        let mut t = vec![[[C64::new(0.0, 0.0); 3]; 3]; u.len()];
        for j in 0..n {
            let vj: Vec<C64> = (0..u.len())
                .map(|i| (0..n).map(|p| ginv[i][(p, j)] * du[i][p].conj()).sum())
                .collect();
            let dv = self.dzbar_complex(&vj);
            for i in 0..u.len() {
                for mm in 0..n {
                    t[i][j][mm] = dv[i][mm];
                }
            }
        }
        (0..u.len())
            .map(|i| {
                let mut s = C64::new(0.0, 0.0);
                for j in 0..n {
                    for k in 0..n {
                        for l in 0..n {
                            for mm in 0..n {
                                s += g[i][(j, k)] * ginv[i][(l, mm)] * t[i][j][l] * t[i][k][mm].conj();
                            }
                        }
                    }
                }
                s.re
            })
            .collect()
    }
}

impl Backend for TorusGrid {
    fn dim(&self) -> usize {
        self.dim
    }

    fn len(&self) -> usize {
        self.weights.len()
    }

    fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn dz(&self, f: &[f64]) -> Vec<Covector> {
        let n = self.dim;
        let parts: Vec<(Vec<f64>, Vec<f64>)> =
            (0..n).map(|j| (self.apply_axis(f, 2 * j), self.apply_axis(f, 2 * j + 1))).collect();
        (0..f.len())
            .map(|i| {
                let mut c = [C64::new(0.0, 0.0); 3];
                for (j, (dx, dy)) in parts.iter().enumerate() {
                    c[j] = C64::new(0.5 * dx[i], -0.5 * dy[i]);
                }
                c
            })
            .collect()
    }

    fn ddbar(&self, f: &[f64]) -> FormField {
        let n = self.dim;
        let ax = self.axes();
        let h = self.hessian_real(f);
        let get = |a: usize, b: usize, i: usize| if a <= b { h[a * ax + b][i] } else { h[b * ax + a][i] };
        (0..f.len())
            .map(|i| {
                let mut m = Mat::zeros(n);
                for j in 0..n {
                    for k in 0..n {
                        let (xj, yj, xk, yk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
                        let re = 0.25 * (get(xj, xk, i) + get(yj, yk, i));
                        let im = 0.25 * (get(xj, yk, i) - get(yj, xk, i));
                        m[(j, k)] = C64::new(re, im);
                    }
                }
                m
            })
            .collect()
    }

    fn background_ricci(&self) -> Mat {
        Mat::zeros(self.dim)
    }

    fn lichnerowicz(&self, u: &[f64], g: &[Mat]) -> Result<f64> {
        crate::geometry::check_positive(g)?;
        let d = self.lichnerowicz_density(u, g);
        Ok(crate::geometry::integrate(self, &d, g))
    }

    fn spacing(&self) -> f64 {
        1.0 / self.m as f64
    }

    fn smooth(&self, f: &[f64], order: u32) -> Vec<f64> {
        let lap = self.trace_ddbar_symbol(&Mat::identity(self.dim));
        let fh = self.to_fourier(f);
        self.from_fourier(fh.iter().zip(&lap).map(|(f, l)| f / (1.0 + (-l.re).powi(order as i32))).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::*;

    fn grid(n: usize, m: usize) -> TorusGrid {
        TorusGrid::new(n, m, Stencil::Spectral).unwrap()
    }

    #[test]
    fn series_sampling_matches_pointwise_evaluation() {
        let mut rng = crate::random::LabRng::new(3);
        for (n, m, f) in [(1, 8, 2), (1, 7, 5), (2, 6, 2)] {
            let g = grid(n, m);
            let s = TrigSeries::random(&mut rng, g.axes(), f, 0.7);
            let direct = g.sample(|x| s.eval(x));
            for (a, b) in g.sample_series(&s).iter().zip(&direct) {
                assert!((a - b).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn ddbar_of_cosine_is_quarter_laplacian() {
        let g = grid(1, 32);
        let f = g.sample(|x| (2.0 * PI * x[0]).cos());
        let h = g.ddbar(&f);
        for (i, m) in h.iter().enumerate() {
            let x = g.coords(i);
            assert!((m[(0, 0)].re + PI * PI * (2.0 * PI * x[0]).cos()).abs() < 1e-10);
            assert!(m[(0, 0)].im.abs() < 1e-12);
        }
        let c = g.ddbar(&vec![3.0; g.len()]);
        assert!(c.iter().all(|m| m.max_abs() < 1e-10));
    }

    #[test]
    fn ddbar_mixed_entry_for_plane_waves() {
        // φ = cos(2π x₁) cos(2π x₂): ∂₁∂̄₂φ = ¼ D_{x1}D_{x2}φ = π² sin sin.
        let g = grid(2, 8);
        let f = g.sample(|x| (2.0 * PI * x[0]).cos() * (2.0 * PI * x[2]).cos());
        let h = g.ddbar(&f);
        for (i, m) in h.iter().enumerate() {
            let x = g.coords(i);
            let exact = PI * PI * (2.0 * PI * x[0]).sin() * (2.0 * PI * x[2]).sin();
            assert!((m[(0, 1)].re - exact).abs() < 1e-10);
            assert!((m[(0, 1)] - m[(1, 0)].conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn central_stencil_converges_at_fourth_order() {
        let err = |m: usize| {
            let g = TorusGrid::new(1, m, Stencil::Central4).unwrap();
            let f = g.sample(|x| (2.0 * PI * x[0]).cos());
            g.ddbar(&f)
                .iter()
                .enumerate()
                .map(|(i, h)| (h[(0, 0)].re + PI * PI * (2.0 * PI * g.coords(i)[0]).cos()).abs())
                .fold(0.0, f64::max)
        };
        let r = err(16) / err(32);
        assert!(r > 14.0 && r < 18.0, "{r}");
    }

    #[test]
    fn normalization_and_volume_invariance() {
        let g = grid(2, 8);
        let id = g.constant_form(Mat::identity(2));
        assert!((volume(&g, &id) - 2.0).abs() < 1e-13);
        let v = g.sample(|x| 0.02 * (2.0 * PI * (x[0] + x[3])).sin() + 0.01 * (2.0 * PI * x[1]).cos());
        let gv = assemble_metric(&g, &id, &v).unwrap();
        assert!((volume(&g, &gv) - 2.0).abs() < 1e-10);
        let s = scalar_curvature(&g, &gv).unwrap();
        assert!(integrate(&g, &s, &gv).abs() < 1e-10);
        assert!(s.iter().any(|x| x.abs() > 1e-3));
    }

    #[test]
    fn n1_curvature_matches_conformal_formula() {
        // ω = w ω₀ with w = 1 + ε cos: s = −(1/w)·¼Δ log w.
        let g = grid(1, 64);
        let eps = 0.3;
        let metric: Vec<Mat> =
            g.sample(|x| 1.0 + eps * (2.0 * PI * x[0]).cos()).into_iter().map(|w| Mat::diag(&[w])).collect();
        let s = scalar_curvature(&g, &metric).unwrap();
        for (i, si) in s.iter().enumerate() {
            let x = g.coords(i)[0];
            let c = (2.0 * PI * x).cos();
            let sn = (2.0 * PI * x).sin();
            let w = 1.0 + eps * c;
            // (log w)'' = (w'' w − w'²)/w².
            let wp = -2.0 * PI * eps * sn;
            let wpp = -4.0 * PI * PI * eps * c;
            let lap = (wpp * w - wp * wp) / (w * w);
            assert!((si + 0.25 * lap / w).abs() < 1e-8, "{i}");
        }
    }

    #[test]
    fn positivity_loss_is_located() {
        let g = grid(1, 16);
        let id = g.constant_form(Mat::identity(1));
        let f = g.sample(|x| (2.0 * PI * x[0]).cos());
        assert!(assemble_metric(&g, &id, &f.iter().map(|v| 0.05 * v).collect::<Vec<_>>()).is_ok());
        let big: Vec<f64> = f.iter().map(|v| 0.2 * v).collect();
        assert!(matches!(assemble_metric(&g, &id, &big), Err(Error::LostPositivity { .. })));
        let bneg = g.constant_form(Mat::diag(&[-2.0]));
        let _ = assemble_form(&g, &bneg, &f);
    }

    #[test]
    fn lichnerowicz_is_positive_quadratic() {
        let g = grid(2, 8);
        let id = g.constant_form(Mat::identity(2));
        assert!(g.lichnerowicz(&vec![1.0; g.len()], &id).unwrap().abs() < 1e-20);
        let u = g.sample(|x| (2.0 * PI * x[1]).sin() + 0.3 * (2.0 * PI * (x[0] - x[2])).cos());
        let a = g.lichnerowicz(&u, &id).unwrap();
        let u2: Vec<f64> = u.iter().map(|x| 2.0 * x).collect();
        let b = g.lichnerowicz(&u2, &id).unwrap();
        assert!(a > 1.0);
        assert!((b - 4.0 * a).abs() < 1e-9 * b);
        // Flat metric: ‖∂̄∂̄u‖² = Σ|k|⁴-weighted Fourier mass; for sin(2πy): ∂̄∂̄ = −¼D_y² → π² amplitude.
        let single = g.sample(|x| (2.0 * PI * x[1]).sin());
        let val = g.lichnerowicz(&single, &id).unwrap();
        // |∂̄₁∂̄₁u|² = (π² sin)², mean ½π⁴, times n! = 2.
        assert!((val - PI.powi(4)).abs() < 1e-9, "{val}");
    }

    #[test]
    fn ddbar_adjoint_matches_pairing() {
        let g = grid(2, 8);
        let f = g.sample(|x| (2.0 * PI * (x[0] + 2.0 * x[3])).cos() + (2.0 * PI * x[1]).sin());
        let a: Vec<Mat> = (0..g.len())
            .map(|i| {
                let c = g.coords(i);
                let t = (2.0 * PI * c[2]).sin();
                Mat::from_rows(2, &[C64::new(1.0 + t, 0.0), C64::new(0.2, 0.3 * t), C64::new(0.2, -0.3 * t), C64::new(2.0, 0.0)])
            })
            .collect();
        let h = g.ddbar(&f);
        let lhs: f64 = h.iter().zip(&a).map(|(h, a)| a.trace_mul(h).re).sum();
        let adj = g.ddbar_adjoint(&a);
        let rhs: f64 = adj.iter().zip(&f).map(|(x, y)| x * y).sum();
        assert!((lhs - rhs).abs() < 1e-9 * lhs.abs().max(1.0), "{lhs} {rhs}");
    }
}
