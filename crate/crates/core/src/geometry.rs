//! Backend-independent field operations.
//!
//! A backend is a discretized complex manifold: it samples fields at `len()`
//! points, differentiates them, and integrates top-degree forms. Top forms are
//! represented by a per-point density `q` normalized so that
//! `∫ q = Σ_i weights[i]·q[i]`; the weights carry the factor `n!`, so the density
//! of `Mⁿ` is just `det M`.

use crate::error::{Error, Result};
use crate::linalg::{pairwise_sum, pairwise_sum_c, Mat};
use crate::prelude::*;

/// Real samples, one per point.
pub type ScalarField = Vec<f64>;
/// Complex samples, one per point.
pub type ComplexField = Vec<C64>;
/// Coefficient matrix of a `(1,1)`-form at every point.
pub type FormField = Vec<Mat>;
/// `(∂_1 f, …, ∂_n f)` padded to three entries.
pub type Covector = [C64; 3];

pub trait Backend {
    /// Complex dimension.
    fn dim(&self) -> usize;
    /// Number of sample points.
    fn len(&self) -> usize;
    /// Quadrature weights for top-form densities.
    fn weights(&self) -> &[f64];
    /// Holomorphic gradient `∂f` of a real field.
    fn dz(&self, f: &[f64]) -> Vec<Covector>;
    /// Complex Hessian `∂∂̄f` of a real field.
    fn ddbar(&self, f: &[f64]) -> FormField;
    /// Constant part of the Ricci form: `Ric(g) = background − ∂∂̄ log det g`.
    fn background_ricci(&self) -> Mat;
    /// `‖∂̄∇^{1,0}u‖²` with respect to the metric `g`.
    fn lichnerowicz(&self, u: &[f64], g: &[Mat]) -> Result<f64>;
    /// Characteristic grid spacing, used to scale explicit time steps.
    fn spacing(&self) -> f64;
    /// Solves `(1 + (−Δ₀)^order) x = f` for the Laplacian `Δ₀` of the flat
    /// (torus) or round (ℂP¹) reference metric.
    fn smooth(&self, f: &[f64], order: u32) -> Vec<f64>;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `∂∂̄φ` of a complex field, as (generally non-Hermitian) matrices.
pub fn ddbar_complex<B: Backend + ?Sized>(b: &B, phi: &[C64]) -> FormField {
    let (re, im) = split(phi);
    let i = C64::new(0.0, 1.0);
    b.ddbar(&re).into_iter().zip(b.ddbar(&im)).map(|(a, c)| a + c.scale(i)).collect()
}

/// `(∂φ, ∂̄φ)` of a complex field.
pub fn gradients_complex<B: Backend + ?Sized>(b: &B, phi: &[C64]) -> (Vec<Covector>, Vec<Covector>) {
    let (re, im) = split(phi);
    let du = b.dz(&re);
    let dv = b.dz(&im);
    let i = C64::new(0.0, 1.0);
    let n = b.dim();
    let mut d = Vec::with_capacity(du.len());
    let mut dbar = Vec::with_capacity(du.len());
    for (a, c) in du.iter().zip(&dv) {
        let mut x = [C64::new(0.0, 0.0); 3];
        let mut y = [C64::new(0.0, 0.0); 3];
        for j in 0..n {
            x[j] = a[j] + i * c[j];
            y[j] = a[j].conj() + i * c[j].conj();
        }
        d.push(x);
        dbar.push(y);
    }
    (d, dbar)
}

pub fn split(phi: &[C64]) -> (Vec<f64>, Vec<f64>) {
    (phi.iter().map(|z| z.re).collect(), phi.iter().map(|z| z.im).collect())
}

pub fn combine(re: &[f64], im: &[f64]) -> Vec<C64> {
    re.iter().zip(im).map(|(a, b)| C64::new(*a, *b)).collect()
}

/// `∫ q` for a real top-form density `q`.
pub fn integrate_density<B: Backend + ?Sized>(b: &B, q: &[f64]) -> f64 {
    let terms: Vec<f64> = b.weights().iter().zip(q).map(|(w, q)| w * q).collect();
    pairwise_sum(&terms)
}

pub fn integrate_density_c<B: Backend + ?Sized>(b: &B, q: &[C64]) -> C64 {
    let terms: Vec<C64> = b.weights().iter().zip(q).map(|(w, q)| q * *w).collect();
    pairwise_sum_c(&terms)
}

/// `∫ f Mⁿ`.
pub fn integrate<B: Backend + ?Sized>(b: &B, f: &[f64], m: &[Mat]) -> f64 {
    let q: Vec<f64> = f.iter().zip(m).map(|(f, m)| f * m.det().re).collect();
    integrate_density(b, &q)
}

/// `∫ f Mⁿ` for complex `f` and complex-valued forms `M`.
pub fn integrate_c<B: Backend + ?Sized>(b: &B, f: &[C64], m: &[Mat]) -> C64 {
    let q: Vec<C64> = f.iter().zip(m).map(|(f, m)| f * m.det()).collect();
    integrate_density_c(b, &q)
}

/// Pointwise `reference + ∂∂̄φ`.
pub fn assemble_form<B: Backend + ?Sized>(b: &B, reference: &[Mat], potential: &[f64]) -> FormField {
    b.ddbar(potential).into_iter().zip(reference).map(|(d, r)| *r + d).collect()
}

/// Like [`assemble_form`] but requires a positive-definite result.
pub fn assemble_metric<B: Backend + ?Sized>(b: &B, reference: &[Mat], potential: &[f64]) -> Result<FormField> {
    let g = assemble_form(b, reference, potential);
    check_positive(&g)?;
    Ok(g)
}

/// `B₀ + iω₀ + ∂∂̄(u + iv)`.
pub fn assemble_complex<B: Backend + ?Sized>(b: &B, reference: &[Mat], phi: &[C64]) -> FormField {
    ddbar_complex(b, phi).into_iter().zip(reference).map(|(d, r)| *r + d).collect()
}

pub fn check_positive(g: &[Mat]) -> Result<()> {
    match g.iter().position(|m| !m.is_positive_definite()) {
        Some(index) => Err(Error::LostPositivity { index }),
        None => Ok(()),
    }
}

pub fn log_det(g: &[Mat]) -> Result<ScalarField> {
    check_positive(g)?;
    Ok(g.iter().map(|m| m.det().re.ln()).collect())
}

/// Ricci form coefficients of a metric field.
pub fn ricci_form<B: Backend + ?Sized>(b: &B, g: &[Mat]) -> Result<FormField> {
    let l = log_det(g)?;
    let r0 = b.background_ricci();
    Ok(b.ddbar(&l).into_iter().map(|d| r0 - d).collect())
}

/// `s = tr(g⁻¹ Ric(g))`.
pub fn scalar_curvature<B: Backend + ?Sized>(b: &B, g: &[Mat]) -> Result<ScalarField> {
    let ric = ricci_form(b, g)?;
    Ok(g.iter().zip(&ric).map(|(g, r)| trace_with_inverse(g, r).re).collect())
}

/// `tr(g⁻¹ a)`.
pub fn trace_with_inverse(g: &Mat, a: &Mat) -> C64 {
    g.adj().trace_mul(a) / g.det()
}

/// `‖∂f‖²_g = (∂f)† g⁻¹ ∂f` pointwise.
pub fn grad_norm_sq<B: Backend + ?Sized>(b: &B, f: &[f64], g: &[Mat]) -> ScalarField {
    b.dz(f).iter().zip(g).map(|(d, g)| inverse_quad(g, &d[..g.dim()])).collect()
}

/// `x† g⁻¹ x`.
pub fn inverse_quad(g: &Mat, x: &[C64]) -> f64 {
    let n = g.dim();
    let a = g.adj();
    let mut s = C64::new(0.0, 0.0);
    for j in 0..n {
        for k in 0..n {
            s += x[j].conj() * a[(j, k)] * x[k];
        }
    }
    (s / g.det()).re
}

/// Density of `n i∂f∧∂̄h∧M^{n−1}`: `tr(adj(M) P)` with `P_{jk} = ∂_j f ∂̄_k h`.
pub fn pair_density(df: &Covector, dbar_h: &Covector, m: &Mat) -> C64 {
    let n = m.dim();
    let a = m.adj();
    let mut s = C64::new(0.0, 0.0);
    for j in 0..n {
        for k in 0..n {
            s += a[(k, j)] * df[j] * dbar_h[k];
        }
    }
    s
}

/// Subtracts the `ωⁿ`-weighted mean.
pub fn normalize_mean<B: Backend + ?Sized>(b: &B, f: &mut [f64]) {
    let total = integrate_density(b, &vec![1.0; f.len()]);
    let m = integrate_density(b, f) / total;
    for x in f.iter_mut() {
        *x -= m;
    }
}

/// Total volume `∫ Mⁿ`.
pub fn volume<B: Backend + ?Sized>(b: &B, m: &[Mat]) -> f64 {
    integrate(b, &vec![1.0; m.len()], m)
}
