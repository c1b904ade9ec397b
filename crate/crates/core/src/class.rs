//! Cohomology-level constants of a complexified class `α^ℂ = β + iα`.
//!
//! On the flat torus a class is represented by a constant Hermitian matrix and
//! intersection numbers are mixed discriminants, normalized so that the
//! identity matrix has `∫ ω_Iⁿ = n!` on the unit-volume torus.

use crate::error::{Error, Result};
use crate::linalg::{factorial, mixed_discriminant, Mat};
use crate::prelude::*;

/// Intersection number of `n` constant forms on the unit-volume torus.
pub fn mixed_intersection(forms: &[Mat], dim: usize) -> Result<C64> {
    if forms.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: forms.len() });
    }
    if let Some(bad) = forms.iter().find(|m| m.dim() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, got: bad.dim() });
    }
    Ok(mixed_discriminant(forms) * factorial(dim))
}

/// Class-level data: volumes, lifted phase and coupling constants.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassData {
    dim: usize,
    /// `αⁿ`.
    volume: f64,
    /// `(β + iα)ⁿ`.
    complex_volume: C64,
    /// `n c₁(X).α^{n−1}`.
    c1_term: f64,
    gamma_abs: f64,
    theta_hat: f64,
    c_gamma: f64,
    reps: Option<(Mat, Mat)>,
}

const VANISHING_TOL: f64 = 1e-12;

impl ClassData {
    /// Builds class data from intersection numbers.
    pub fn from_numbers(dim: usize, volume: f64, complex_volume: C64, c1_term: f64, gamma_abs: f64) -> Result<Self> {
        if !(volume > 0.0) {
            return Err(Error::NonPositiveMetric { min_eigenvalue: volume });
        }
        if !(gamma_abs > 0.0) {
            return Err(Error::InvalidInput("|γ| must be positive"));
        }
        if complex_volume.norm() <= VANISHING_TOL * volume {
            return Err(Error::VanishingComplexifiedVolume { modulus: complex_volume.norm() });
        }
        let ratio = complex_volume / volume;
        let mut theta_hat = ratio.arg();
        if theta_hat <= 0.0 {
            theta_hat += 2.0 * PI;
        }
        let c_gamma = c1_term / volume - gamma_abs * ratio.norm();
        Ok(ClassData { dim, volume, complex_volume, c1_term, gamma_abs, theta_hat, c_gamma, reps: None })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn volume(&self) -> f64 {
        self.volume
    }
    pub fn complex_volume(&self) -> C64 {
        self.complex_volume
    }
    pub fn c1_term(&self) -> f64 {
        self.c1_term
    }
    pub fn gamma_abs(&self) -> f64 {
        self.gamma_abs
    }
    pub fn theta_hat(&self) -> f64 {
        self.theta_hat
    }
    pub fn c_gamma(&self) -> f64 {
        self.c_gamma
    }
    /// Constant representatives `(α, β)` when the class lives on the torus.
    pub fn representatives(&self) -> Option<(Mat, Mat)> {
        self.reps
    }

    /// `γ = |γ| e^{−iθ̂}`.
    pub fn gamma(&self) -> C64 {
        C64::from_polar(self.gamma_abs, -self.theta_hat)
    }

    /// `(β+iα)ⁿ/αⁿ`.
    pub fn volume_ratio(&self) -> C64 {
        self.complex_volume / self.volume
    }

    /// Replaces the lift of the phase. The new lift must lie in `(0, nπ)` and
    /// differ from the current one by a multiple of `2π`.
    pub fn with_theta_hat(mut self, lift: f64) -> Result<Self> {
        let n = self.dim as f64;
        if !(lift > 0.0 && lift < n * PI) {
            return Err(Error::PhaseOutOfRange(lift));
        }
        let turns = (lift - self.theta_hat) / (2.0 * PI);
        if (turns - turns.round()).abs() > 1e-9 {
            return Err(Error::PhaseOutOfRange(lift));
        }
        self.theta_hat = lift;
        Ok(self)
    }

    /// Whether the lifted phase is in `(0, π)`.
    pub fn is_supercritical(&self) -> bool {
        self.theta_hat > 0.0 && self.theta_hat < PI
    }

    /// Whether the lifted phase is in `(0, π/2)`.
    pub fn is_hypercritical(&self) -> bool {
        self.theta_hat > 0.0 && self.theta_hat < 0.5 * PI
    }
}

/// Constants of a torus class with constant representatives `alpha`, `beta`;
/// `c1` represents the first Chern class (zero on the torus when absent).
pub fn class_constants(alpha: &Mat, beta: &Mat, gamma_abs: f64, c1: Option<&Mat>) -> Result<ClassData> {
    let n = alpha.dim();
    if beta.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: beta.dim() });
    }
    if !alpha.is_positive_definite() {
        return Err(Error::NonPositiveMetric { min_eigenvalue: alpha.hermitian_eigenvalues()[0] });
    }
    let i = C64::new(0.0, 1.0);
    let volume = (alpha.det() * factorial(n)).re;
    let complex_volume = (*beta + alpha.scale(i)).det() * factorial(n);
    let c1_term = match c1 {
        Some(c) => {
            let mut forms = vec![*c];
            forms.extend(std::iter::repeat_n(*alpha, n - 1));
            (mixed_intersection(&forms, n)? * n as f64).re
        }
        None => 0.0,
    };
    let mut data = ClassData::from_numbers(n, volume, complex_volume, c1_term, gamma_abs)?;
    data.reps = Some((*alpha, *beta));
    Ok(data)
}

/// Values of `Im(e^{−iθ̂}(α^ℂ)ᵖ.χ^{n−p})` for `p = 1..n`.
#[derive(Clone, Debug, PartialEq)]
pub struct StabilityReport {
    pub inequalities: Vec<f64>,
    pub pass: bool,
}

/// Top-dimensional part of the class-level stability condition; conditions
/// on subvarieties are not examined.
pub fn stability_check_top(class: &ClassData, chi: &Mat) -> Result<StabilityReport> {
    let (alpha, beta) = class.representatives().ok_or(Error::InvalidInput("class has no constant representatives"))?;
    let n = class.dim();
    if chi.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: chi.dim() });
    }
    if !chi.is_positive_definite() {
        return Err(Error::NonPositiveChi);
    }
    let ac = beta + alpha.scale(C64::new(0.0, 1.0));
    let rot = C64::from_polar(1.0, -class.theta_hat());
    let mut inequalities = Vec::with_capacity(n);
    for p in 1..=n {
        let mut forms = Vec::with_capacity(n);
        forms.extend(std::iter::repeat_n(ac, p));
        forms.extend(std::iter::repeat_n(*chi, n - p));
        inequalities.push((rot * mixed_intersection(&forms, n)?).im);
    }
    let pass = inequalities.iter().all(|&x| x <= 1e-10);
    Ok(StabilityReport { inequalities, pass })
}

/// Constants of the complex-surface reformulation: the class of
/// `χ = sin θ̂·B − cos θ̂·ω` and the rescaled coupling `γ̃ = |γ|/sin²θ̂`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfaceConstants {
    pub chi_class: Mat,
    pub gamma_tilde: f64,
    /// Constant `c` of `s(ω) = γ̃ Λ_ω χ + c`.
    pub c: f64,
}

pub fn surface_constants(class: &ClassData) -> Result<SurfaceConstants> {
    if class.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: class.dim() });
    }
    let (alpha, beta) = class.representatives().ok_or(Error::InvalidInput("class has no constant representatives"))?;
    let (s, c) = class.theta_hat().sin_cos();
    if s.abs() <= 1e-12 {
        return Err(Error::DegeneratePhase(s.abs()));
    }
    let chi_class = beta.scale_re(s) - alpha.scale_re(c);
    let gamma_tilde = class.gamma_abs() / (s * s);
    // ∫(s − c − γ̃Λχ)ω² = 0 with ∫Λ_ωχ ω² = 2 χ.α = 2·2!·D(χ, α).
    let chi_alpha = mixed_intersection(&[chi_class, alpha], 2)?.re;
    let c_surface = (class.c1_term() - gamma_tilde * 2.0 * chi_alpha) / class.volume();
    Ok(SurfaceConstants { chi_class, gamma_tilde, c: c_surface })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::FRAC_PI_2;

    #[test]
    fn intersection_examples() {
        let i2 = Mat::identity(2);
        assert!((mixed_intersection(&[i2, i2], 2).unwrap() - C64::new(2.0, 0.0)).norm() < 1e-14);
        let z = Mat::zeros(2);
        assert_eq!(mixed_intersection(&[i2, z], 2).unwrap(), C64::new(0.0, 0.0));
        assert!(matches!(mixed_intersection(&[i2], 2), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn torus_n1_constants() {
        let a = Mat::diag(&[1.3]);
        let b = Mat::diag(&[0.0]);
        let cd = class_constants(&a, &b, 0.7, None).unwrap();
        assert!((cd.theta_hat() - FRAC_PI_2).abs() < 1e-15);
        assert!((cd.c_gamma() + 0.7).abs() < 1e-15);
    }

    #[test]
    fn shifted_class_phase_is_arccot() {
        for &k in &[0.3, 1.0, 2.5] {
            let cd = ClassData::from_numbers(1, 2.0, C64::new(2.0 * k, 2.0), 2.0, 1.0).unwrap();
            assert!((cd.theta_hat() - crate::pointwise::arccot(k)).abs() < 1e-14);
            assert!(cd.is_hypercritical());
        }
    }

    #[test]
    fn rotated_volume_is_positive_real() {
        let a = Mat::from_real_rows(2, &[2.0, 0.3, 0.3, 1.0]);
        let b = Mat::from_real_rows(2, &[-1.0, 0.5, 0.5, 0.4]);
        let cd = class_constants(&a, &b, 1.0, None).unwrap();
        let z = C64::from_polar(1.0, -cd.theta_hat()) * cd.volume_ratio();
        assert!(z.im.abs() <= 1e-12 * z.norm() && z.re > 0.0);
    }

    #[test]
    fn vanishing_volume_is_rejected() {
        // det(B + iA) never vanishes for Hermitian B and positive A, so feed the number directly.
        let err = ClassData::from_numbers(2, 1.0, C64::new(0.0, 0.0), 0.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::VanishingComplexifiedVolume { .. }));
    }

    #[test]
    fn lift_override() {
        let a = Mat::identity(2);
        let b = Mat::diag(&[-2.0, -2.0]);
        let cd = class_constants(&a, &b, 1.0, None).unwrap();
        let lift = 2.0 * crate::pointwise::arccot(-2.0);
        assert!((cd.theta_hat() - lift).abs() < 1e-12);
        assert!(cd.clone().with_theta_hat(lift + 0.1).is_err());
        assert!(cd.with_theta_hat(-0.1).is_err());
    }

    #[test]
    fn stability_top_term_vanishes() {
        let a = Mat::identity(2);
        let b = Mat::identity(2);
        let cd = class_constants(&a, &b, 1.0, None).unwrap();
        let rep = stability_check_top(&cd, &Mat::identity(2)).unwrap();
        assert!(rep.inequalities[1].abs() < 1e-12);
        assert!(matches!(stability_check_top(&cd, &Mat::diag(&[1.0, -1.0])), Err(Error::NonPositiveChi)));
        let cd1 = class_constants(&Mat::identity(1), &Mat::diag(&[-0.4]), 1.0, None).unwrap();
        assert!(stability_check_top(&cd1, &Mat::identity(1)).unwrap().pass);
    }
}
