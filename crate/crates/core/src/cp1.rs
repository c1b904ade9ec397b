//! `S¹`-invariant geometry on the projective line.
//!
//! Fields are sampled at Chebyshev–Gauss nodes of the fixed coordinate
//! `ξ = tanh(log|z|) ∈ (−1, 1)`, which is the moment coordinate of the
//! reference metric `ω_FS` of total area 2 (density 1 in `ξ`). An invariant
//! `(1,1)`-form is stored as its density `w(ξ)` with respect to `dξ∧dθ`, and
//! integrals drop the trivial `2π` from the angle.
//!
//! In these units
//!
//! ```text
//! i∂∂̄f        = ½((1−ξ²) f_ξ)_ξ
//! i∂f∧∂̄h      = ½(1−ξ²) f_ξ h_ξ
//! Ric(w)       = 1 − i∂∂̄ log w,     s = Ric(w)/w
//! ```
//!
//! so `ω_FS` has `s = 1` and `∫ Ric = 2`.

use crate::class::ClassData;
use crate::error::{Error, Result};
use crate::functionals::ComplexPotential;
use crate::geodesics::PotentialPath;
use crate::geometry::{self, Backend, Covector, FormField};
use crate::linalg::Mat;
use crate::pointwise::arccot;
use crate::prelude::*;
use crate::spectral::ChebyshevRule;

/// Chebyshev discretization of the `ξ` interval.
#[derive(Clone, Debug, PartialEq)]
pub struct Cp1Grid {
    rule: ChebyshevRule,
    /// `√(½(1−ξ²))`, so that `∂f := sq·f_ξ` reproduces `i∂f∧∂̄h`.
    sq: Vec<f64>,
    one_minus: Vec<f64>,
}

impl Cp1Grid {
    pub fn new(nodes: usize) -> Result<Self> {
        if nodes < 8 {
            return Err(Error::InvalidGrid("need at least 8 nodes on the interval"));
        }
        let rule = ChebyshevRule::new(nodes);
        let one_minus: Vec<f64> = rule.nodes().iter().map(|x| 1.0 - x * x).collect();
        let sq = one_minus.iter().map(|a| (0.5 * a).sqrt()).collect();
        Ok(Cp1Grid { rule, sq, one_minus })
    }

    pub fn rule(&self) -> &ChebyshevRule {
        &self.rule
    }
    pub fn nodes(&self) -> &[f64] {
        self.rule.nodes()
    }

    pub fn derivative(&self, f: &[f64]) -> Vec<f64> {
        self.rule.differentiate(f)
    }

    /// Density `½((1−ξ²)f_ξ)_ξ` of `i∂∂̄f`.
    pub fn ddbar_density(&self, f: &[f64]) -> Vec<f64> {
        let df = self.rule.differentiate(f);
        let flux: Vec<f64> = df.iter().zip(&self.one_minus).map(|(d, a)| d * a).collect();
        self.rule.differentiate(&flux).into_iter().map(|x| 0.5 * x).collect()
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.nodes().iter().map(|x| f(*x)).collect()
    }

    pub fn form(&self, density: &[f64]) -> FormField {
        density.iter().map(|w| Mat::diag(&[*w])).collect()
    }
}

impl Backend for Cp1Grid {
    fn dim(&self) -> usize {
        1
    }
    fn len(&self) -> usize {
        self.rule.len()
    }
    fn weights(&self) -> &[f64] {
        self.rule.weights()
    }
    fn dz(&self, f: &[f64]) -> Vec<Covector> {
        self.rule
            .differentiate(f)
            .iter()
            .zip(&self.sq)
            .map(|(d, s)| [C64::new(d * s, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)])
            .collect()
    }
    fn ddbar(&self, f: &[f64]) -> FormField {
        self.form(&self.ddbar_density(f))
    }
    fn background_ricci(&self) -> Mat {
        Mat::identity(1)
    }
    fn lichnerowicz(&self, u: &[f64], g: &[Mat]) -> Result<f64> {
        geometry::check_positive(g)?;
        let w: Vec<f64> = g.iter().map(|m| m[(0, 0)].re).collect();
        let du = self.rule.differentiate(u);
        let q: Vec<f64> = du.iter().zip(&w).map(|(d, w)| d / w).collect();
        let dq = self.rule.differentiate(&q);
        let dens: Vec<f64> =
            dq.iter().zip(&self.one_minus).zip(&w).map(|((d, a), w)| 0.25 * a * a * d * d * w).collect();
        Ok(self.rule.integrate(&dens))
    }

    fn spacing(&self) -> f64 {
        PI / self.len() as f64
    }

    fn smooth(&self, f: &[f64], order: u32) -> Vec<f64> {
        let n = self.len();
        let mut lap = nalgebra::DMatrix::<f64>::zeros(n, n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            for (i, v) in self.ddbar_density(&e).into_iter().enumerate() {
                lap[(i, j)] = -v;
            }
            e[j] = 0.0;
        }
        let mut op = nalgebra::DMatrix::<f64>::identity(n, n);
        let mut power = nalgebra::DMatrix::<f64>::identity(n, n);
        for _ in 0..order {
            power = &power * &lap;
        }
        op += power;
        let rhs = nalgebra::DVector::from_column_slice(f);
        match op.lu().solve(&rhs) {
            Some(x) => x.iter().copied().collect(),
            None => f.to_vec(),
        }
    }
}

/// `G(x) = ½[(1+x)log(1+x) + (1−x)log(1−x)]`.
pub fn guillemin(x: f64) -> f64 {
    let a = if x > -1.0 { (1.0 + x) * (1.0 + x).ln() } else { 0.0 };
    let b = if x < 1.0 { (1.0 - x) * (1.0 - x).ln() } else { 0.0 };
    0.5 * (a + b)
}

/// Symplectic potential `u = G + c` on the moment interval `[−1, 1]`, with the
/// smooth correction `c` sampled at Chebyshev nodes in `x`. The metric is
/// `(class_scale/2)·ω_u`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentumProfile {
    rule: ChebyshevRule,
    correction: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
    class_scale: f64,
}

impl MomentumProfile {
    /// The Guillemin (round) potential.
    pub fn guillemin(nodes: usize, class_scale: f64) -> Self {
        Self::with_correction(nodes, class_scale, |_| 0.0).expect("round metric is convex")
    }

    pub fn with_correction(nodes: usize, class_scale: f64, c: impl Fn(f64) -> f64) -> Result<Self> {
        let rule = ChebyshevRule::new(nodes);
        let correction: Vec<f64> = rule.nodes().iter().map(|x| c(*x)).collect();
        Self::from_samples(rule, correction, class_scale)
    }

    fn from_samples(rule: ChebyshevRule, correction: Vec<f64>, class_scale: f64) -> Result<Self> {
        if !(class_scale > 0.0) {
            return Err(Error::InvalidInput("class scale must be positive"));
        }
        let d1 = rule.differentiate(&correction);
        let d2 = rule.differentiate(&d1);
        let p = MomentumProfile { rule, correction, d1, d2, class_scale };
        // u'' = 1/(1−x²) + c'' must stay positive; checking (1−x²)u'' is enough.
        for (i, x) in p.rule.nodes().iter().enumerate() {
            if 1.0 + (1.0 - x * x) * p.d2[i] <= 0.0 {
                return Err(Error::LostConvexity { index: i });
            }
        }
        Ok(p)
    }

    pub fn class_scale(&self) -> f64 {
        self.class_scale
    }
    pub fn x_nodes(&self) -> &[f64] {
        self.rule.nodes()
    }

    /// `u + a x + b`.
    pub fn add_affine(&self, a: f64, b: f64) -> Self {
        let correction = self.rule.nodes().iter().zip(&self.correction).map(|(x, c)| c + a * x + b).collect();
        Self::from_samples(self.rule.clone(), correction, self.class_scale).expect("affine terms keep convexity")
    }

    /// `(1−τ)u₀ + τu₁`, the Kähler geodesic between two profiles.
    pub fn interpolate(u0: &Self, u1: &Self, tau: f64) -> Result<Self> {
        if u0.rule.len() != u1.rule.len() || u0.class_scale != u1.class_scale {
            return Err(Error::DimensionMismatch { expected: u0.rule.len(), got: u1.rule.len() });
        }
        let c = u0.correction.iter().zip(&u1.correction).map(|(a, b)| (1.0 - tau) * a + tau * b).collect();
        Self::from_samples(u0.rule.clone(), c, u0.class_scale)
    }

    fn corr(&self, f: &[f64], x: f64) -> f64 {
        self.rule.interpolate(f, x)
    }

    pub fn value(&self, x: f64) -> f64 {
        guillemin(x) + self.corr(&self.correction, x)
    }

    /// `u'(x)`.
    pub fn slope(&self, x: f64) -> f64 {
        x.atanh() + self.corr(&self.d1, x)
    }

    /// `(1−x²)u''(x)`.
    pub fn scaled_hessian(&self, x: f64) -> f64 {
        1.0 + (1.0 - x * x) * self.corr(&self.d2, x)
    }

    /// Solves `u'(x) = artanh ξ`, i.e. the moment coordinate of the point `ξ`.
    pub fn moment_of(&self, xi: f64) -> Result<f64> {
        let t = xi.atanh();
        let mut s = t;
        for _ in 0..100 {
            let x = s.tanh();
            let g = s + self.corr(&self.d1, x) - t;
            let dg = 1.0 + self.corr(&self.d2, x) * (1.0 - x * x);
            if dg <= 0.0 {
                return Err(Error::LostConvexity { index: 0 });
            }
            let step = g / dg;
            s -= step;
            if step.abs() < 1e-15 * (1.0 + s.abs()) {
                return Ok(s.tanh());
            }
        }
        Ok(s.tanh())
    }

    /// Moment coordinates at the grid nodes.
    pub fn moments(&self, grid: &Cp1Grid) -> Result<Vec<f64>> {
        grid.nodes().iter().map(|xi| self.moment_of(*xi)).collect()
    }

    /// Density `w(ξ)` of the metric.
    pub fn density(&self, grid: &Cp1Grid) -> Result<Vec<f64>> {
        let half = 0.5 * self.class_scale;
        let xs = self.moments(grid)?;
        grid.nodes()
            .iter()
            .zip(&xs)
            .enumerate()
            .map(|(i, (xi, x))| {
                // (1−ξ²)u''(x) = (1−ξ²)/(1−x²)·(1−x²)u''.
                let h = self.scaled_hessian(*x) * (1.0 - xi * xi) / (1.0 - x * x);
                if h <= 0.0 {
                    Err(Error::LostConvexity { index: i })
                } else {
                    Ok(half / h)
                }
            })
            .collect()
    }

    pub fn form(&self, grid: &Cp1Grid) -> Result<InvariantForm> {
        Ok(InvariantForm::new(self.density(grid)?))
    }

    /// Kähler potential relative to the round one: `i∂∂̄` of it is `ω_u − (class_scale/2)ω_FS`.
    pub fn relative_kahler_potential(&self, grid: &Cp1Grid) -> Result<Vec<f64>> {
        let xs = self.moments(grid)?;
        Ok(grid
            .nodes()
            .iter()
            .zip(&xs)
            .map(|(xi, x)| {
                let t = xi.atanh();
                self.class_scale * ((x - xi) * t - self.value(*x) + guillemin(*xi))
            })
            .collect())
    }

    /// Scalar curvature `s = −(1/class_scale)(1/u'')''` at the profile's own nodes.
    pub fn abreu_scalar_curvature(&self) -> Result<Vec<f64>> {
        let inv: Vec<f64> = self
            .rule
            .nodes()
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let h = 1.0 + (1.0 - x * x) * self.d2[i];
                if h <= 0.0 {
                    Err(Error::LostConvexity { index: i })
                } else {
                    Ok((1.0 - x * x) / h)
                }
            })
            .collect::<Result<_>>()?;
        let d = self.rule.differentiate(&self.rule.differentiate(&inv));
        Ok(d.iter().map(|v| -v / self.class_scale).collect())
    }
}

/// Invariant `(1,1)`-form stored by its density in `ξ`.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantForm {
    density: Vec<f64>,
}

impl InvariantForm {
    pub fn new(density: Vec<f64>) -> Self {
        InvariantForm { density }
    }
    pub fn density(&self) -> &[f64] {
        &self.density
    }
    pub fn total(&self, grid: &Cp1Grid) -> f64 {
        grid.rule.integrate(&self.density)
    }
    pub fn field(&self) -> FormField {
        self.density.iter().map(|w| Mat::diag(&[*w])).collect()
    }
    pub fn check_metric(&self) -> Result<()> {
        match self.density.iter().position(|w| !(*w > 0.0)) {
            Some(index) => Err(Error::LostPositivity { index }),
            None => Ok(()),
        }
    }
    pub fn scaled(&self, s: f64) -> Self {
        InvariantForm { density: self.density.iter().map(|w| w * s).collect() }
    }
}

/// Class data of `(β, α) = ([B], [ω])` on the projective line, with `c₁` term 2.
pub fn class_data(grid: &Cp1Grid, omega: &InvariantForm, bfield: &InvariantForm, gamma_abs: f64) -> Result<ClassData> {
    let a = omega.total(grid);
    let b = bfield.total(grid);
    ClassData::from_numbers(1, a, C64::new(b, a), 2.0, gamma_abs)
}

/// The pointwise dHYM solution `b = cot(θ̂)·w`.
pub fn dhym_fiber_solution(omega: &InvariantForm, theta_hat: f64) -> Result<InvariantForm> {
    if !(theta_hat > 0.0 && theta_hat < PI) {
        return Err(Error::PhaseOutOfRange(theta_hat));
    }
    let k = theta_hat.cos() / theta_hat.sin();
    Ok(omega.scaled(k))
}

/// Moment map of an invariant form: the potential `φ` with `φ_ξ = density`, up to a constant.
pub fn form_potential(grid: &Cp1Grid, form: &InvariantForm) -> Vec<f64> {
    grid.rule.antiderivative(&form.density)
}

/// Holomorphy potentials of `coeff·ζ` for the generator `ζ` of the `ℂ*`-action:
/// returns `(φ(ζ, ω), φ(ζ, B))`, the first normalized to `ω`-mean zero and the
/// second to flat mean zero.
pub fn holomorphy_potential(
    grid: &Cp1Grid,
    omega: &InvariantForm,
    bfield: &InvariantForm,
    coeff: f64,
) -> (Vec<f64>, Vec<f64>) {
    let mut p = form_potential(grid, omega);
    let vol = omega.total(grid);
    let mean = grid.rule.integrate(&p.iter().zip(omega.density()).map(|(a, w)| a * w).collect::<Vec<_>>()) / vol;
    for x in &mut p {
        *x = coeff * (*x - mean);
    }
    let mut q = form_potential(grid, bfield);
    let qm = grid.rule.integrate(&q) / 2.0;
    for x in &mut q {
        *x = coeff * (*x - qm);
    }
    (p, q)
}

/// Residuals of the two kernel equations for a pair of potentials:
/// `sup |(φ_ω)_ξ/w − const|` and `sup |(φ_B)_ξ − (φ_ω)_ξ·b/w|`.
pub fn kernel_residuals(grid: &Cp1Grid, omega: &InvariantForm, bfield: &InvariantForm, p: &[f64], q: &[f64]) -> (f64, f64) {
    let dp = grid.derivative(p);
    let dq = grid.derivative(q);
    let ratio: Vec<f64> = dp.iter().zip(omega.density()).map(|(d, w)| d / w).collect();
    let avg = ratio.iter().sum::<f64>() / ratio.len() as f64;
    let r1 = ratio.iter().map(|r| (r - avg).abs()).fold(0.0, f64::max);
    let r2 = dq
        .iter()
        .zip(&ratio)
        .zip(bfield.density())
        .map(|((dq, r), b)| (dq - r * b).abs())
        .fold(0.0, f64::max);
    (r1, r2)
}

/// Futaki-type invariant on the generator scaled by `coeff`:
/// `∫φ(ζ,ω)(Re(γ(B+iω)) − (s − c_γ)ω) + ∫φ(ζ,B) Im(γ(B+iω))`.
///
/// With `φ(ζ,ω)` of `ω`-mean zero the `c_γ` term vanishes; keeping it makes the
/// value independent of that normalization.
pub fn futaki_invariant(
    grid: &Cp1Grid,
    omega: &InvariantForm,
    bfield: &InvariantForm,
    class: &ClassData,
    coeff: C64,
) -> Result<C64> {
    omega.check_metric()?;
    let g = omega.field();
    let s = geometry::scalar_curvature(grid, &g)?;
    let (p, q) = holomorphy_potential(grid, omega, bfield, 1.0);
    let gamma = class.gamma();
    let c = class.c_gamma();
    let dens: Vec<f64> = (0..grid.len())
        .map(|i| {
            let w = omega.density()[i];
            let z = gamma * C64::new(bfield.density()[i], w);
            p[i] * (z.re - (s[i] - c) * w) + q[i] * z.im
        })
        .collect();
    Ok(coeff * grid.rule.integrate(&dens))
}

/// Trivial geodesic generated by `affine_coeff·x`: the symplectic potentials
/// `u + τ·affine_coeff·x`, with the B-field carried along as `b_τ = k w_τ`.
/// Potentials are relative to the metric and B-field at `τ = 0`.
pub fn trivial_geodesic_path(
    grid: &Cp1Grid,
    start: &MomentumProfile,
    affine_coeff: f64,
    bfield: &InvariantForm,
    times: &[f64],
) -> Result<PotentialPath> {
    let w0 = start.density(grid)?;
    let lambdas: Vec<f64> = bfield.density().iter().zip(&w0).map(|(b, w)| b / w).collect();
    let phase0 = arccot(lambdas[0]);
    let worst = lambdas.iter().map(|l| (arccot(*l) - phase0).abs()).fold(0.0, f64::max);
    if worst > 1e-8 {
        return Err(Error::NotDHYMSolution { residual: worst });
    }
    let k = phase0.cos() / phase0.sin();
    let base = start.relative_kahler_potential(grid)?;
    let mut potentials = Vec::with_capacity(times.len());
    for &tau in times {
        let prof = start.add_affine(tau * affine_coeff, 0.0);
        let v: Vec<f64> = prof.relative_kahler_potential(grid)?.iter().zip(&base).map(|(a, b)| a - b).collect();
        let u = v.iter().map(|x| k * x).collect();
        potentials.push(ComplexPotential::new(u, v));
    }
    PotentialPath::new(times.to_vec(), potentials)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::*;

    fn grid() -> Cp1Grid {
        Cp1Grid::new(96).unwrap()
    }

    fn bumpy(nodes: usize) -> MomentumProfile {
        MomentumProfile::with_correction(nodes, 2.0, |x| 0.1 * x * x * x + 0.05 * (1.0 - x * x).powi(2)).unwrap()
    }

    #[test]
    fn round_metric_has_unit_curvature() {
        let g = grid();
        let p = MomentumProfile::guillemin(32, 2.0);
        let w = p.density(&g).unwrap();
        assert!(w.iter().all(|w| (w - 1.0).abs() < 1e-11));
        let s = scalar_curvature(&g, &p.form(&g).unwrap().field()).unwrap();
        assert!(s.iter().all(|s| (s - 1.0).abs() < 1e-8));
        let abreu = p.abreu_scalar_curvature().unwrap();
        assert!(abreu.iter().all(|s| (s - 1.0).abs() < 1e-9));
        // Gauss–Bonnet in these units: ∫ s ω = ∫ Ric = 2.
        assert!((integrate(&g, &s, &p.form(&g).unwrap().field()) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn abreu_matches_density_formula() {
        let g = grid();
        let p = bumpy(64);
        let w = p.density(&g).unwrap();
        assert!((g.rule().integrate(&w) - 2.0).abs() < 1e-10);
        let s = scalar_curvature(&g, &g.form(&w)).unwrap();
        let abreu = p.abreu_scalar_curvature().unwrap();
        let xs = p.moments(&g).unwrap();
        for (i, x) in xs.iter().enumerate() {
            let a = p.rule.interpolate(&abreu, *x);
            assert!((a - s[i]).abs() < 1e-7, "{i}: {a} {}", s[i]);
        }
        let shifted = p.add_affine(0.7, -0.2).abreu_scalar_curvature().unwrap();
        for (a, b) in shifted.iter().zip(&abreu) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn relative_potential_generates_the_metric() {
        let g = grid();
        let p = bumpy(64);
        let v = p.relative_kahler_potential(&g).unwrap();
        let w = p.density(&g).unwrap();
        let dd = g.ddbar_density(&v);
        for i in 0..g.len() {
            assert!((1.0 + dd[i] - w[i]).abs() < 1e-8, "{i}");
        }
    }

    #[test]
    fn legendre_round_trip() {
        let g = grid();
        let p = bumpy(64);
        let v = p.relative_kahler_potential(&g).unwrap();
        // v_ξ = A(x − ξ)/(1 − ξ²) recovers the moment coordinate.
        let dv = g.derivative(&v);
        let xs = p.moments(&g).unwrap();
        for (i, xi) in g.nodes().iter().enumerate() {
            let x = xi + (1.0 - xi * xi) * dv[i] / p.class_scale();
            assert!((x - xs[i]).abs() < 1e-8, "{i}");
            assert!((p.slope(xs[i]) - xi.atanh()).abs() < 1e-10);
            if xi.abs() < 0.95 {
                // u(x) = x t − ψ(t) with ψ = v/A + ξt − G(ξ).
                let t = xi.atanh();
                let psi = v[i] / p.class_scale() + xi * t - guillemin(*xi);
                assert!((x * t - psi - p.value(xs[i])).abs() < 1e-8, "{i}");
            }
        }
    }

    #[test]
    fn fiber_solution_has_constant_phase() {
        let g = grid();
        let w = InvariantForm::new(bumpy(40).density(&g).unwrap());
        assert!(dhym_fiber_solution(&w, 0.5 * PI).unwrap().density().iter().all(|b| b.abs() < 1e-15));
        let b = dhym_fiber_solution(&w, 0.25 * PI).unwrap();
        for (b, w) in b.density().iter().zip(w.density()) {
            assert!((b - w).abs() < 1e-12);
        }
        for &th in &[0.3, 1.1, 2.9] {
            let b = dhym_fiber_solution(&w, th).unwrap();
            for (b, w) in b.density().iter().zip(w.density()) {
                assert!((arccot(b / w) - th).abs() < 1e-12);
            }
        }
        assert!(matches!(dhym_fiber_solution(&w, PI), Err(Error::PhaseOutOfRange(_))));
    }

    #[test]
    fn holomorphy_potentials_solve_kernel_equations() {
        let g = grid();
        let fs = InvariantForm::new(vec![1.0; g.len()]);
        let zero = InvariantForm::new(vec![0.0; g.len()]);
        let (p, _) = holomorphy_potential(&g, &fs, &zero, 1.0);
        for (p, x) in p.iter().zip(g.nodes()) {
            assert!((p - x).abs() < 1e-12);
        }
        let (p0, q0) = holomorphy_potential(&g, &fs, &zero, 0.0);
        assert!(p0.iter().chain(&q0).all(|x| *x == 0.0));
        let k = 0.8;
        let b = fs.scaled(k);
        let (p, q) = holomorphy_potential(&g, &fs, &b, 1.0);
        for (q, x) in q.iter().zip(g.nodes()) {
            assert!((q - k * x).abs() < 1e-12);
        }
        let (r1, r2) = kernel_residuals(&g, &fs, &b, &p, &q);
        assert!(r1 < 1e-10 && r2 < 1e-10);
    }

    #[test]
    fn lichnerowicz_kernel_is_holomorphy_potentials() {
        let g = grid();
        let w = InvariantForm::new(bumpy(40).density(&g).unwrap());
        let (p, _) = holomorphy_potential(&g, &w, &w, 1.0);
        assert!(g.lichnerowicz(&p, &w.field()).unwrap() < 1e-14);
        let other: Vec<f64> = g.nodes().iter().map(|x| x * x).collect();
        assert!(g.lichnerowicz(&other, &w.field()).unwrap() > 1e-3);
    }

    #[test]
    fn futaki_vanishes_on_round_solution_and_is_linear() {
        let g = grid();
        let fs = InvariantForm::new(vec![1.0; g.len()]);
        let b = fs.scaled(0.6);
        let cd = class_data(&g, &fs, &b, 1.3).unwrap();
        let f = futaki_invariant(&g, &fs, &b, &cd, C64::new(1.0, 0.0)).unwrap();
        assert!(f.norm() < 1e-10);
        let w = InvariantForm::new(bumpy(40).density(&g).unwrap());
        let bw = w.scaled(0.6);
        let cd = class_data(&g, &w, &bw, 1.3).unwrap();
        let f1 = futaki_invariant(&g, &w, &bw, &cd, C64::new(1.0, 0.0)).unwrap();
        let f2 = futaki_invariant(&g, &w, &bw, &cd, C64::new(2.0, 0.0)).unwrap();
        assert!((f2 - f1 * 2.0).norm() < 1e-12);
    }

    #[test]
    fn trivial_geodesic_on_round_metric_is_explicit() {
        let g = grid();
        let start = MomentumProfile::guillemin(32, 2.0);
        let fs = start.form(&g).unwrap();
        let b = fs.scaled(0.5);
        let times = [0.0, 0.25, 0.5];
        let path = trivial_geodesic_path(&g, &start, 0.8, &b, &times).unwrap();
        for (tau, phi) in times.iter().zip(path.potentials()) {
            let (c, s) = ((0.8 * tau).cosh(), (0.8 * tau).sinh());
            for (i, xi) in g.nodes().iter().enumerate() {
                let exact = 2.0 * (c - xi * s).ln();
                assert!((phi.v()[i] - exact).abs() < 1e-10);
                assert!((phi.u()[i] - 0.5 * exact).abs() < 1e-10);
            }
        }
        let bad = InvariantForm::new(g.nodes().iter().map(|x| 0.5 + 0.1 * x).collect());
        assert!(matches!(trivial_geodesic_path(&g, &start, 0.8, &bad, &times), Err(Error::NotDHYMSolution { .. })));
    }
}
