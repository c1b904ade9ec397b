//! Scalar functionals on the space of complexified potentials.
//!
//! All functionals are taken relative to an explicit [`Reference`] pair
//! `ω₀^ℂ = B₀ + iω₀`, and a complex potential `φ = u + iv` gives
//! `ω_φ^ℂ = B_u + iω_v` with `B_u = B₀ + i∂∂̄u`, `ω_v = ω₀ + i∂∂̄v`.

use crate::class::ClassData;
use crate::error::Result;
use crate::geometry::{self, Backend, FormField};
use crate::linalg::{energy_kernel, twisted_energy_kernel, Mat};
use crate::pointwise::arccot;
use crate::prelude::*;

/// `φ = u + iv`: `u` moves the B-field, `v` the Kähler form.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexPotential {
    u: Vec<f64>,
    v: Vec<f64>,
}

impl ComplexPotential {
    pub fn new(u: Vec<f64>, v: Vec<f64>) -> Self {
        assert_eq!(u.len(), v.len(), "real and imaginary parts must share a grid");
        ComplexPotential { u, v }
    }

    pub fn zero(len: usize) -> Self {
        ComplexPotential { u: vec![0.0; len], v: vec![0.0; len] }
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }
    pub fn v(&self) -> &[f64] {
        &self.v
    }
    pub fn len(&self) -> usize {
        self.u.len()
    }
    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn to_complex(&self) -> Vec<C64> {
        geometry::combine(&self.u, &self.v)
    }

    pub fn from_complex(phi: &[C64]) -> Self {
        let (u, v) = geometry::split(phi);
        ComplexPotential { u, v }
    }

    /// `self + t·other`.
    pub fn axpy(&self, t: f64, other: &Self) -> Self {
        ComplexPotential {
            u: self.u.iter().zip(&other.u).map(|(a, b)| a + t * b).collect(),
            v: self.v.iter().zip(&other.v).map(|(a, b)| a + t * b).collect(),
        }
    }

    pub fn scale(&self, t: f64) -> Self {
        ComplexPotential { u: self.u.iter().map(|a| t * a).collect(), v: self.v.iter().map(|a| t * a).collect() }
    }

    /// Subtracts the quadrature means of both parts.
    pub fn normalized<B: Backend + ?Sized>(mut self, b: &B) -> Self {
        geometry::normalize_mean(b, &mut self.u);
        geometry::normalize_mean(b, &mut self.v);
        self
    }
}

/// Reference pair `(ω₀, B₀)` together with `Ric(ω₀)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Reference {
    omega0: FormField,
    b0: FormField,
    ric0: FormField,
}

impl Reference {
    pub fn new<B: Backend + ?Sized>(b: &B, omega0: FormField, b0: FormField) -> Result<Self> {
        let ric0 = geometry::ricci_form(b, &omega0)?;
        Ok(Reference { omega0, b0, ric0 })
    }

    /// Constant representatives on a flat backend.
    pub fn constant<B: Backend + ?Sized>(b: &B, omega0: Mat, b0: Mat) -> Result<Self> {
        Self::new(b, vec![omega0; b.len()], vec![b0; b.len()])
    }

    pub fn omega0(&self) -> &[Mat] {
        &self.omega0
    }
    pub fn b0(&self) -> &[Mat] {
        &self.b0
    }
    pub fn ricci0(&self) -> &[Mat] {
        &self.ric0
    }

    /// `B₀ + iω₀`.
    pub fn complex(&self) -> FormField {
        let i = C64::new(0.0, 1.0);
        self.b0.iter().zip(&self.omega0).map(|(b, w)| *b + w.scale(i)).collect()
    }

    pub fn metric<B: Backend + ?Sized>(&self, b: &B, v: &[f64]) -> Result<FormField> {
        geometry::assemble_metric(b, &self.omega0, v)
    }

    pub fn bfield<B: Backend + ?Sized>(&self, b: &B, u: &[f64]) -> FormField {
        geometry::assemble_form(b, &self.b0, u)
    }

    /// `B_u + iω_v`.
    pub fn complex_form<B: Backend + ?Sized>(&self, b: &B, phi: &ComplexPotential) -> FormField {
        geometry::assemble_complex(b, &self.complex(), &phi.to_complex())
    }
}

/// `H(v) = ∫ log(ω_vⁿ/ω₀ⁿ) ω_vⁿ`.
pub fn entropy<B: Backend + ?Sized>(b: &B, v: &[f64], omega0: &[Mat]) -> Result<f64> {
    let g = geometry::assemble_metric(b, omega0, v)?;
    let q: Vec<f64> = g
        .iter()
        .zip(omega0)
        .map(|(g, g0)| {
            let d = g.det().re;
            d * (d / g0.det().re).ln()
        })
        .collect();
    Ok(geometry::integrate_density(b, &q))
}

/// `E(v) = ∫ v Σ_j ω₀^j∧ω_v^{n−j}`, or with a twist `η`,
/// `E_η(v) = ∫ v Σ_j η∧ω₀^j∧ω_v^{n−1−j}`.
pub fn energy_family<B: Backend + ?Sized>(b: &B, v: &[f64], omega0: &[Mat], twist: Option<&[Mat]>) -> f64 {
    let g = geometry::assemble_form(b, omega0, v);
    let q: Vec<f64> = match twist {
        None => v.iter().zip(omega0).zip(&g).map(|((v, a), g)| v * energy_kernel(a, g).re).collect(),
        Some(eta) => v
            .iter()
            .zip(omega0)
            .zip(&g)
            .zip(eta)
            .map(|(((v, a), g), e)| v * twisted_energy_kernel(e, a, g).re)
            .collect(),
    };
    geometry::integrate_density(b, &q)
}

/// `E^ℂ(φ) = ∫ φ Σ_j (ω₀^ℂ)^j∧(ω_φ^ℂ)^{n−j}`.
pub fn complexified_energy<B: Backend + ?Sized>(b: &B, phi: &ComplexPotential, reference: &Reference) -> C64 {
    let r = reference.complex();
    let m = geometry::assemble_complex(b, &r, &phi.to_complex());
    let q: Vec<C64> =
        phi.to_complex().iter().zip(&r).zip(&m).map(|((p, a), m)| p * energy_kernel(a, m)).collect();
    geometry::integrate_density_c(b, &q)
}

/// Complexified K-energy
/// `H(v) + c_γ/(n+1)·E(v) − E_{Ric(ω₀)}(v) + 1/(n+1)·Im(γ E^ℂ(φ))`.
pub fn complexified_k_energy<B: Backend + ?Sized>(
    b: &B,
    phi: &ComplexPotential,
    reference: &Reference,
    class: &ClassData,
) -> Result<f64> {
    let n1 = (b.dim() + 1) as f64;
    let h = entropy(b, phi.v(), reference.omega0())?;
    let e = energy_family(b, phi.v(), reference.omega0(), None);
    let ric = energy_family(b, phi.v(), reference.omega0(), Some(reference.ricci0()));
    let ec = complexified_energy(b, phi, reference);
    Ok(h + class.c_gamma() / n1 * e - ric + (class.gamma() * ec).im / n1)
}

/// Pointwise density (per quadrature weight) of `γ(ω^ℂ)ⁿ − (s − c_γ)ωⁿ`.
pub fn variation_density<B: Backend + ?Sized>(
    b: &B,
    phi: &ComplexPotential,
    reference: &Reference,
    class: &ClassData,
) -> Result<Vec<C64>> {
    let g = reference.metric(b, phi.v())?;
    let s = geometry::scalar_curvature(b, &g)?;
    let m = reference.complex_form(b, phi);
    let gamma = class.gamma();
    let c = class.c_gamma();
    Ok(m.iter().zip(&g).zip(&s).map(|((m, g), s)| gamma * m.det() - (s - c) * g.det().re).collect())
}

/// `σ_φ(ψ) = ∫ Im[ψ(γ(ω^ℂ)ⁿ − (s − c_γ)ωⁿ)]`.
pub fn first_variation<B: Backend + ?Sized>(
    b: &B,
    phi: &ComplexPotential,
    direction: &ComplexPotential,
    reference: &Reference,
    class: &ClassData,
) -> Result<f64> {
    let z = variation_density(b, phi, reference, class)?;
    let q: Vec<f64> =
        direction.to_complex().iter().zip(&z).map(|(p, z)| (p * z).im).collect();
    Ok(geometry::integrate_density(b, &q))
}

/// Complexified Calabi functional with its splitting
/// `value = deviation + c_γ²·Vol`, `deviation = ∫|s − γ(ω^ℂ)ⁿ/ωⁿ − c_γ|² ωⁿ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CalabiValue {
    pub value: f64,
    pub deviation: f64,
    pub c_squared_volume: f64,
}

pub fn complexified_calabi<B: Backend + ?Sized>(
    b: &B,
    phi: &ComplexPotential,
    reference: &Reference,
    class: &ClassData,
) -> Result<CalabiValue> {
    let g = reference.metric(b, phi.v())?;
    let s = geometry::scalar_curvature(b, &g)?;
    let m = reference.complex_form(b, phi);
    let gamma = class.gamma();
    let c = class.c_gamma();
    let mut full = Vec::with_capacity(g.len());
    let mut dev = Vec::with_capacity(g.len());
    for ((g, m), s) in g.iter().zip(&m).zip(&s) {
        let dg = g.det().re;
        let z = C64::new(*s, 0.0) - gamma * m.det() / dg;
        full.push(z.norm_sqr() * dg);
        dev.push((z - c).norm_sqr() * dg);
    }
    let vol = geometry::volume(b, &reference.metric(b, phi.v())?);
    Ok(CalabiValue {
        value: geometry::integrate_density(b, &full),
        deviation: geometry::integrate_density(b, &dev),
        c_squared_volume: c * c * vol,
    })
}

/// `V_ω(B_u) = ∫ |(B_u + iω)ⁿ|`.
pub fn volume_functional<B: Backend + ?Sized>(b: &B, u: &[f64], metric: &[Mat], b0: &[Mat]) -> Result<f64> {
    geometry::check_positive(metric)?;
    let bu = geometry::assemble_form(b, b0, u);
    let i = C64::new(0.0, 1.0);
    let q: Vec<f64> = bu.iter().zip(metric).map(|(bf, w)| (*bf + w.scale(i)).det().norm()).collect();
    Ok(geometry::integrate_density(b, &q))
}

/// Pointwise Lagrangian phase `Θ(ω^{-1}B)` of a pair of fields.
pub fn phase_field(metric: &[Mat], bfield: &[Mat]) -> Vec<f64> {
    metric
        .iter()
        .zip(bfield)
        .map(|(g, bf)| match g.dim() {
            1 => arccot(bf[(0, 0)].re / g[(0, 0)].re),
            _ => crate::pointwise::small_phase_radius(g, bf).theta,
        })
        .collect()
}

/// Whether `cos(Θ − θ̂) > 0` at every point.
pub fn is_calibrated<B: Backend + ?Sized>(b: &B, phi: &ComplexPotential, reference: &Reference, theta_hat: f64) -> bool {
    match reference.metric(b, phi.v()) {
        Ok(g) => {
            let bf = reference.bfield(b, phi.u());
            phase_field(&g, &bf).iter().all(|t| (t - theta_hat).cos() > 0.0)
        }
        Err(_) => false,
    }
}

/// One row of a batch evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FunctionalRow {
    pub entropy: f64,
    pub energy: f64,
    pub complexified_energy: C64,
    pub k_energy: f64,
    pub calabi: f64,
}

/// Evaluates the main functionals on each potential of a batch.
pub fn evaluate_batch<B: Backend + ?Sized>(
    b: &B,
    potentials: &[ComplexPotential],
    reference: &Reference,
    class: &ClassData,
) -> Result<Vec<FunctionalRow>> {
    potentials
        .iter()
        .map(|phi| {
            Ok(FunctionalRow {
                entropy: entropy(b, phi.v(), reference.omega0())?,
                energy: energy_family(b, phi.v(), reference.omega0(), None),
                complexified_energy: complexified_energy(b, phi, reference),
                k_energy: complexified_k_energy(b, phi, reference, class)?,
                calabi: complexified_calabi(b, phi, reference, class)?.value,
            })
        })
        .collect()
}
