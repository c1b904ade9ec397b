//! Exact pointwise algebra for a pair `(ω, B)` of Hermitian matrices.
//!
//! The relative eigenvalues `λ₁ ≤ … ≤ λₙ` of `ω⁻¹B` determine everything else:
//! the Lagrangian phase `Θ = Σ arccot λₐ ∈ (0, nπ)`, the Lagrangian radius
//! `r = Π (1+λₐ²)^{1/2}`, and `r·e^{iΘ} = det(B+iω)/det ω`.

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::prelude::*;
use nalgebra::DMatrix;

/// Inverse cotangent with range `(0, π)`.
#[inline]
pub fn arccot(x: f64) -> f64 {
    core::f64::consts::FRAC_PI_2 - x.atan()
}

/// A pair `(ω, B)` of `n × n` Hermitian matrices with `ω` positive-definite.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianPair {
    omega: DMatrix<C64>,
    bfield: DMatrix<C64>,
}

const HERMITIAN_TOL: f64 = 1e-10;

impl HermitianPair {
    pub fn new(omega: DMatrix<C64>, bfield: DMatrix<C64>) -> Result<Self> {
        let n = omega.nrows();
        if n == 0 || omega.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n.max(1), got: omega.ncols() });
        }
        if bfield.nrows() != n || bfield.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: bfield.nrows() });
        }
        let scale = 1.0 + omega.iter().chain(bfield.iter()).map(|z| z.norm()).fold(0.0, f64::max);
        if hermitian_defect(&omega) > HERMITIAN_TOL * scale || hermitian_defect(&bfield) > HERMITIAN_TOL * scale {
            return Err(Error::InvalidInput("matrices must be Hermitian"));
        }
        check_positive(&omega)?;
        Ok(HermitianPair { omega, bfield })
    }

    /// Builds a pair from the small inline matrices used on grids.
    pub fn from_mats(omega: &Mat, bfield: &Mat) -> Result<Self> {
        Self::new(to_dmatrix(omega), to_dmatrix(bfield))
    }

    /// Real diagonal pair, convenient in tests and examples.
    pub fn diagonal(omega: &[f64], bfield: &[f64]) -> Result<Self> {
        let n = omega.len();
        let o = DMatrix::from_fn(n, n, |i, j| if i == j { C64::new(omega[i], 0.0) } else { C64::new(0.0, 0.0) });
        let b = DMatrix::from_fn(n, n, |i, j| if i == j { C64::new(bfield[i], 0.0) } else { C64::new(0.0, 0.0) });
        Self::new(o, b)
    }

    pub fn dim(&self) -> usize {
        self.omega.nrows()
    }

    pub fn omega(&self) -> &DMatrix<C64> {
        &self.omega
    }

    pub fn bfield(&self) -> &DMatrix<C64> {
        &self.bfield
    }
}

fn hermitian_defect(m: &DMatrix<C64>) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn check_positive(omega: &DMatrix<C64>) -> Result<()> {
    let ev = nalgebra::SymmetricEigen::new(omega.clone()).eigenvalues;
    let min = ev.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = ev.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(max > 0.0) || min <= 1e-12 * max {
        return Err(Error::NonPositiveMetric { min_eigenvalue: min });
    }
    Ok(())
}

pub(crate) fn to_dmatrix(m: &Mat) -> DMatrix<C64> {
    let n = m.dim();
    DMatrix::from_fn(n, n, |i, j| m[(i, j)])
}

pub(crate) fn hermitian_eigenvalues_dyn(m: &Mat) -> Vec<f64> {
    let mut ev: Vec<f64> = nalgebra::SymmetricEigen::new(to_dmatrix(m)).eigenvalues.iter().cloned().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Real relative eigenvalues, sorted ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    lambdas: Vec<f64>,
}

impl Spectrum {
    pub fn new(mut lambdas: Vec<f64>) -> Self {
        lambdas.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
        Spectrum { lambdas }
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn dim(&self) -> usize {
        self.lambdas.len()
    }
}

/// Lagrangian phase and radius of a pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseRadius {
    pub theta: f64,
    pub radius: f64,
}

impl PhaseRadius {
    pub fn of(spec: &Spectrum) -> Self {
        PhaseRadius { theta: lagrangian_phase(spec), radius: lagrangian_radius(spec) }
    }

    /// `r·e^{iΘ}`.
    pub fn to_complex(self) -> C64 {
        C64::from_polar(self.radius, self.theta)
    }
}

/// Solutions of `det(B − λω) = 0`, via Cholesky reduction `ω = LL†` to the
/// Hermitian matrix `L⁻¹BL⁻†`.
pub fn relative_eigenvalues(pair: &HermitianPair) -> Result<Spectrum> {
    let n = pair.dim();
    let chol = pair.omega.clone().cholesky().ok_or(Error::NonPositiveMetric { min_eigenvalue: 0.0 })?;
    let l = chol.l();
    // Solve L X = B, then L Y = X† so that Y = L⁻¹ B† L⁻† = L⁻¹ B L⁻†.
    let x = l.solve_lower_triangular(&pair.bfield).ok_or(Error::NonPositiveMetric { min_eigenvalue: 0.0 })?;
    let y = l.solve_lower_triangular(&x.adjoint()).ok_or(Error::NonPositiveMetric { min_eigenvalue: 0.0 })?;
    let reduced = (&y + y.adjoint()).scale(0.5);
    let ev = nalgebra::SymmetricEigen::new(reduced).eigenvalues;
    let mut lambdas: Vec<f64> = ev.iter().cloned().collect();
    debug_assert_eq!(lambdas.len(), n);
    lambdas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(Spectrum { lambdas })
}

/// `Θ = Σ arccot λₐ`.
pub fn lagrangian_phase(spec: &Spectrum) -> f64 {
    spec.lambdas.iter().map(|&l| arccot(l)).sum()
}

/// `r = Π (1+λₐ²)^{1/2}`.
pub fn lagrangian_radius(spec: &Spectrum) -> f64 {
    spec.lambdas.iter().map(|&l| (1.0 + l * l).sqrt()).product()
}

/// `det(B+iω)/det(ω)`, computed directly from the matrices.
pub fn complexified_volume_ratio(pair: &HermitianPair) -> Result<C64> {
    check_positive(&pair.omega)?;
    let i = C64::new(0.0, 1.0);
    let m = &pair.bfield + pair.omega.map(|z| z * i);
    let num = m.determinant();
    let den = pair.omega.clone().determinant();
    Ok(num / den)
}

/// `cos(Θ − θ̂) > 0`.
pub fn is_almost_calibrated(pair: &HermitianPair, theta_hat: f64) -> bool {
    match relative_eigenvalues(pair) {
        Ok(spec) => spectrum_is_almost_calibrated(&spec, theta_hat),
        Err(_) => false,
    }
}

pub fn spectrum_is_almost_calibrated(spec: &Spectrum, theta_hat: f64) -> bool {
    (lagrangian_phase(spec) - theta_hat).cos() > 0.0
}

/// Per-eigendirection summands appearing in the convexity computations.
///
/// `u`, `v` are the frame components `(∂u̇)ₐ`, `(∂v̇)ₐ` of the real and
/// imaginary parts of the velocity, `λ` the relative eigenvalue and `η = Θ − θ̂`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvexitySummands {
    /// `|v|² + (|u|²−|v|²) sin ϑ / r − (u v̄ + ū v) cos ϑ / r`, `ϑ = arccot λ`.
    pub critical: f64,
    /// The summand of the geodesic second variation, including the `1/cos η`
    /// prefactor.
    pub geodesic: f64,
    /// `cos η + λ⁻¹ sin η`; `None` when `λ = 0`.
    pub kgeod_weight: Option<f64>,
    /// `|λ v − u|² / (1+λ²)`.
    pub square_form: f64,
}

pub fn convexity_summands(lambda: f64, eta: f64, u: C64, v: C64) -> ConvexitySummands {
    let theta = arccot(lambda);
    let r = (1.0 + lambda * lambda).sqrt();
    let uu = u.norm_sqr();
    let vv = v.norm_sqr();
    let cross = (u * v.conj() + u.conj() * v).re;

    let critical = vv + (uu - vv) / r * theta.sin() - cross / r * theta.cos();

    // Expanded summand of the geodesic computation, kept term by term.
    let (s, c) = eta.sin_cos();
    let l = lambda;
    let q = 1.0 + l * l;
    let bracket = vv * s * s + (uu - vv) / q * (l * c * s + s * s) - cross / q * (l * s * s - c * s) + vv * c * c
        - (uu - vv) / q * (l * c * s - c * c)
        - cross / q * (l * c * c + c * s);
    let geodesic = bracket / c;

    let square_form = (v * lambda - u).norm_sqr() / q;
    ConvexitySummands { critical, geodesic, kgeod_weight: kahler_geodesic_weight(lambda, eta).ok(), square_form }
}

/// `cos η + λ⁻¹ sin η`, the pointwise weight of the Kähler-geodesic convexity
/// identity.
pub fn kahler_geodesic_weight(lambda: f64, eta: f64) -> Result<f64> {
    if lambda == 0.0 {
        return Err(Error::DivisionByZero("kgeod_weight requires λ ≠ 0"));
    }
    Ok(eta.cos() + eta.sin() / lambda)
}

/// Relative eigenvalues of a 1×1 or 2×2 pencil in closed form (grid loops).
pub(crate) fn small_relative_eigenvalues(omega: &Mat, b: &Mat) -> [f64; 2] {
    match omega.dim() {
        1 => [b[(0, 0)].re / omega[(0, 0)].re, 0.0],
        2 => {
            // det(g) λ² − tr(adj(g) B) λ + det(B) = 0
            let dg = omega.det().re;
            let t = omega.adj().trace_mul(b).re;
            let db = b.det().re;
            let disc = (t * t - 4.0 * dg * db).max(0.0).sqrt();
            let q = -0.5 * (-t + if t >= 0.0 { -disc } else { disc });
            let (r1, r2) = if q != 0.0 { (q / dg, db / q) } else { (0.0, 0.0) };
            if r1 <= r2 {
                [r1, r2]
            } else {
                [r2, r1]
            }
        }
        _ => {
            let pair = HermitianPair::from_mats(omega, b).expect("positive metric");
            let s = relative_eigenvalues(&pair).expect("positive metric");
            [s.lambdas[0], s.lambdas[1]]
        }
    }
}

/// `(Θ, r)` for small pointwise pairs.
pub(crate) fn small_phase_radius(omega: &Mat, b: &Mat) -> PhaseRadius {
    let n = omega.dim();
    if n <= 2 {
        let l = small_relative_eigenvalues(omega, b);
        let mut theta = 0.0;
        let mut radius = 1.0;
        for &x in &l[..n] {
            theta += arccot(x);
            radius *= (1.0 + x * x).sqrt();
        }
        PhaseRadius { theta, radius }
    } else {
        let pair = HermitianPair::from_mats(omega, b).expect("positive metric");
        PhaseRadius::of(&relative_eigenvalues(&pair).expect("positive metric"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn diagonal_and_scalar_pencils() {
        let p = HermitianPair::diagonal(&[1.0, 1.0], &[1.0, 2.0]).unwrap();
        assert_eq!(relative_eigenvalues(&p).unwrap().lambdas(), &[1.0, 2.0]);
        let p = HermitianPair::diagonal(&[2.0], &[1.0]).unwrap();
        assert!((relative_eigenvalues(&p).unwrap().lambdas()[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn phase_examples() {
        assert!((lagrangian_phase(&Spectrum::new(vec![0.0])) - FRAC_PI_2).abs() < 1e-15);
        assert!((lagrangian_phase(&Spectrum::new(vec![1.0, 1.0])) - FRAC_PI_2).abs() < 1e-15);
        assert!((lagrangian_phase(&Spectrum::new(vec![-1.0, -1.0])) - 3.0 * FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn radius_examples() {
        assert_eq!(lagrangian_radius(&Spectrum::new(vec![0.0, 0.0])), 1.0);
        assert!((lagrangian_radius(&Spectrum::new(vec![1.0, 1.0])) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn volume_ratio_examples() {
        let p = HermitianPair::diagonal(&[1.0, 1.0], &[0.0, 0.0]).unwrap();
        assert!((complexified_volume_ratio(&p).unwrap() - C64::new(-1.0, 0.0)).norm() < 1e-15);
        let p = HermitianPair::diagonal(&[1.0], &[3.5]).unwrap();
        assert!((complexified_volume_ratio(&p).unwrap() - C64::new(3.5, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn rejects_non_positive_metric() {
        let err = HermitianPair::diagonal(&[1.0, 0.0], &[0.0, 0.0]).unwrap_err();
        assert!(matches!(err, Error::NonPositiveMetric { .. }));
        let err = HermitianPair::diagonal(&[1.0, -2.0], &[0.0, 0.0]).unwrap_err();
        assert!(matches!(err, Error::NonPositiveMetric { .. }));
    }

    #[test]
    fn calibration_examples() {
        let p = HermitianPair::diagonal(&[1.0], &[0.0]).unwrap();
        assert!(is_almost_calibrated(&p, FRAC_PI_2));
        assert!(!is_almost_calibrated(&p, 3.0 * FRAC_PI_2));
        let p = HermitianPair::diagonal(&[1.0, 1.0], &[1.0, 1.0]).unwrap();
        assert!(is_almost_calibrated(&p, FRAC_PI_4));
    }

    #[test]
    fn summand_examples() {
        let s = convexity_summands(2.0, 0.0, C64::new(1.0, 0.0), C64::new(1.0, 0.0));
        assert!((s.critical - 0.2).abs() < 1e-15);
        assert!((s.square_form - 0.2).abs() < 1e-15);
        let v = C64::new(0.3, -0.7);
        let s = convexity_summands(-1.7, 0.4, v * -1.7, v);
        assert!(s.critical.abs() < 1e-15);
        assert!((s.geodesic * 0.4f64.cos()).abs() < 1e-15);
        assert!((kahler_geodesic_weight(1.0, FRAC_PI_4).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!(matches!(kahler_geodesic_weight(0.0, 1.0), Err(Error::DivisionByZero(_))));
        assert!(convexity_summands(0.0, 0.1, v, v).kgeod_weight.is_none());
    }

    #[test]
    fn small_closed_form_agrees_with_cholesky_route() {
        let g = Mat::from_rows(2, &[C64::new(2.0, 0.0), C64::new(0.3, 0.4), C64::new(0.3, -0.4), C64::new(1.0, 0.0)]);
        let b = Mat::from_rows(2, &[C64::new(-0.5, 0.0), C64::new(1.0, -0.2), C64::new(1.0, 0.2), C64::new(0.7, 0.0)]);
        let l = small_relative_eigenvalues(&g, &b);
        let s = relative_eigenvalues(&HermitianPair::from_mats(&g, &b).unwrap()).unwrap();
        assert!((l[0] - s.lambdas()[0]).abs() < 1e-12 && (l[1] - s.lambdas()[1]).abs() < 1e-12);
    }
}
