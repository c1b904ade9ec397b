//! Paths of complex potentials: second variation, geodesic residuals, the
//! lift to the annulus, and convexity probes.
//!
//! Time derivatives are second-order central differences on the uniform time
//! grid of the path, so quantities are only reported at interior times.

use crate::class::ClassData;
use crate::error::{Error, Result};
use crate::functionals::{complexified_k_energy, first_variation, ComplexPotential, Reference};
use crate::geometry::{self, Backend, Covector};
use crate::linalg::{factorial, Mat};
use crate::prelude::*;

/// Potentials sampled at uniform times.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialPath {
    times: Vec<f64>,
    potentials: Vec<ComplexPotential>,
}

impl PotentialPath {
    pub fn new(times: Vec<f64>, potentials: Vec<ComplexPotential>) -> Result<Self> {
        if times.len() != potentials.len() || times.is_empty() {
            return Err(Error::DimensionMismatch { expected: times.len(), got: potentials.len() });
        }
        let len = potentials[0].len();
        if let Some(p) = potentials.iter().find(|p| p.len() != len) {
            return Err(Error::DimensionMismatch { expected: len, got: p.len() });
        }
        if times.len() > 1 {
            let dt = times[1] - times[0];
            if !(dt > 0.0) || times.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > 1e-12 * (1.0 + dt)) {
                return Err(Error::InvalidInput("path times must be increasing and uniform"));
            }
        }
        Ok(PotentialPath { times, potentials })
    }

    /// Samples `f(t)` at `steps + 1` uniform times in `[0, 1]`.
    pub fn from_fn(steps: usize, f: impl Fn(f64) -> ComplexPotential) -> Result<Self> {
        let times: Vec<f64> = (0..=steps).map(|k| k as f64 / steps as f64).collect();
        let potentials = times.iter().map(|t| f(*t)).collect();
        Self::new(times, potentials)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }
    pub fn potentials(&self) -> &[ComplexPotential] {
        &self.potentials
    }
    pub fn len(&self) -> usize {
        self.times.len()
    }
    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
    pub fn dt(&self) -> f64 {
        if self.times.len() > 1 {
            self.times[1] - self.times[0]
        } else {
            0.0
        }
    }

    /// The same samples traversed backwards.
    pub fn reversed(&self) -> Self {
        let t0 = self.times[0];
        let t1 = *self.times.last().unwrap();
        let times = self.times.iter().rev().map(|t| t0 + t1 - t).collect();
        PotentialPath { times, potentials: self.potentials.iter().rev().cloned().collect() }
    }

    /// `(φ, φ̇, φ̈)` at interior index `k`.
    pub fn derivatives(&self, k: usize) -> Result<(Vec<C64>, Vec<C64>, Vec<C64>)> {
        if k == 0 || k + 1 >= self.len() {
            return Err(Error::InvalidInput("time derivatives need an interior index"));
        }
        let dt = self.dt();
        let a = self.potentials[k - 1].to_complex();
        let b = self.potentials[k].to_complex();
        let c = self.potentials[k + 1].to_complex();
        let d1 = a.iter().zip(&c).map(|(a, c)| (c - a) / (2.0 * dt)).collect();
        let d2 = a.iter().zip(&b).zip(&c).map(|((a, b), c)| (a - b * 2.0 + c) / (dt * dt)).collect();
        Ok((b, d1, d2))
    }
}

/// Analytic and finite-difference second derivatives of the K-energy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SecondVariation {
    pub analytic: f64,
    pub finite_diff: f64,
}

/// Second variation of the complexified K-energy at the interior index `k`.
pub fn second_variation_along_path<B: Backend + ?Sized>(
    b: &B,
    path: &PotentialPath,
    reference: &Reference,
    class: &ClassData,
    k: usize,
) -> Result<SecondVariation> {
    let (phi, d1, d2) = path.derivatives(k)?;
    let analytic = second_variation_formula(b, &phi, &d1, &d2, reference, class)?;
    let dt = path.dt();
    let e = |j: usize| complexified_k_energy(b, &path.potentials[j], reference, class);
    let finite_diff = (e(k - 1)? - 2.0 * e(k)? + e(k + 1)?) / (dt * dt);
    Ok(SecondVariation { analytic, finite_diff })
}

/// `∫Im[γ(φ̈(ω^ℂ)ⁿ − n i∂φ̇∧∂̄φ̇∧(ω^ℂ)^{n−1})] + ‖D Im φ̇‖² − ∫(Im φ̈ − ‖∂ Im φ̇‖²)(s − c_γ)ωⁿ`.
pub fn second_variation_formula<B: Backend + ?Sized>(
    b: &B,
    phi: &[C64],
    d1: &[C64],
    d2: &[C64],
    reference: &Reference,
    class: &ClassData,
) -> Result<f64> {
    let pot = ComplexPotential::from_complex(phi);
    let g = reference.metric(b, pot.v())?;
    let s = geometry::scalar_curvature(b, &g)?;
    let m = reference.complex_form(b, &pot);
    let (dphi, dbar_phi) = geometry::gradients_complex(b, d1);
    let (_, vdot) = geometry::split(d1);
    let (_, vddot) = geometry::split(d2);
    let grad2 = geometry::grad_norm_sq(b, &vdot, &g);
    let gamma = class.gamma();
    let c = class.c_gamma();
    let q: Vec<f64> = (0..g.len())
        .map(|i| {
            let pair = geometry::pair_density(&dphi[i], &dbar_phi[i], &m[i]);
            let cplx = (gamma * (d2[i] * m[i].det() - pair)).im;
            cplx - (vddot[i] - grad2[i]) * (s[i] - c) * g[i].det().re
        })
        .collect();
    Ok(geometry::integrate_density(b, &q) + b.lichnerowicz(&vdot, &g)?)
}

/// Sup-norms of the two coupled geodesic residuals at one interior time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResidualPair {
    pub time: f64,
    pub first: f64,
    pub second: f64,
}

/// Pointwise residuals of the coupled system
/// `Im φ̈ − ‖∂ Im φ̇‖² = 0`, `Re[e^{−iθ̂}(φ̈(ω^ℂ)ⁿ − n i∂φ̇∧∂̄φ̇∧(ω^ℂ)^{n−1})]/ωⁿ = 0`.
pub fn coupled_residual_fields<B: Backend + ?Sized>(
    b: &B,
    path: &PotentialPath,
    reference: &Reference,
    theta_hat: f64,
    k: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let (phi, d1, d2) = path.derivatives(k)?;
    let pot = ComplexPotential::from_complex(&phi);
    let g = reference.metric(b, pot.v())?;
    let m = reference.complex_form(b, &pot);
    let (dphi, dbar_phi) = geometry::gradients_complex(b, &d1);
    let (_, vdot) = geometry::split(&d1);
    let grad2 = geometry::grad_norm_sq(b, &vdot, &g);
    let rot = C64::from_polar(1.0, -theta_hat);
    let first = (0..g.len()).map(|i| d2[i].im - grad2[i]).collect();
    let second = (0..g.len())
        .map(|i| {
            let pair = geometry::pair_density(&dphi[i], &dbar_phi[i], &m[i]);
            (rot * (d2[i] * m[i].det() - pair)).re / g[i].det().re
        })
        .collect();
    Ok((first, second))
}

pub fn residual_coupled<B: Backend + ?Sized>(
    b: &B,
    path: &PotentialPath,
    reference: &Reference,
    class: &ClassData,
) -> Result<Vec<ResidualPair>> {
    (1..path.len().saturating_sub(1))
        .map(|k| {
            let (f, s) = coupled_residual_fields(b, path, reference, class.theta_hat(), k)?;
            Ok(ResidualPair { time: path.times[k], first: sup(&f), second: sup(&s) })
        })
        .collect()
}

/// Residuals of the pair of Kähler geodesic equations
/// `Im φ̈ − ‖∂ Im φ̇‖²_{ω} = 0` and `Re φ̈ − ‖∂ Re φ̇‖²_{B} = 0`.
pub fn residual_kahler_pair<B: Backend + ?Sized>(
    b: &B,
    path: &PotentialPath,
    reference: &Reference,
) -> Result<Vec<ResidualPair>> {
    (1..path.len().saturating_sub(1))
        .map(|k| {
            let (phi, d1, d2) = path.derivatives(k)?;
            let pot = ComplexPotential::from_complex(&phi);
            let g = reference.metric(b, pot.v())?;
            let bf = geometry::assemble_metric(b, reference.b0(), pot.u())?;
            let (udot, vdot) = geometry::split(&d1);
            let gv = geometry::grad_norm_sq(b, &vdot, &g);
            let gu = geometry::grad_norm_sq(b, &udot, &bf);
            let first: Vec<f64> = (0..g.len()).map(|i| d2[i].im - gv[i]).collect();
            let second: Vec<f64> = (0..g.len()).map(|i| d2[i].re - gu[i]).collect();
            Ok(ResidualPair { time: path.times[k], first: sup(&first), second: sup(&second) })
        })
        .collect()
}

/// An `S¹`-invariant function on `A × X` sampled on the radial grid
/// `s = −log|z|` of the path times.
#[derive(Clone, Debug, PartialEq)]
pub struct AnnulusField {
    radial: Vec<f64>,
    values: Vec<Vec<C64>>,
}

impl AnnulusField {
    /// `Φ(z, x) = φ_{−log|z|}(x)`.
    pub fn lift(path: &PotentialPath) -> Self {
        AnnulusField {
            radial: path.times.clone(),
            values: path.potentials.iter().map(|p| p.to_complex()).collect(),
        }
    }

    /// `−log|z|` at each radial sample.
    pub fn radial(&self) -> &[f64] {
        &self.radial
    }
    pub fn values(&self) -> &[Vec<C64>] {
        &self.values
    }
    pub fn radius(&self, k: usize) -> f64 {
        (-self.radial[k]).exp()
    }

    /// `∂_r f` and `∂_r² f` at radial index `k` from the three-point stencil on
    /// the (non-uniform) radii.
    fn radial_derivatives(&self, f: impl Fn(usize) -> C64, k: usize) -> (C64, C64) {
        let (ra, rb, rc) = (self.radius(k + 1), self.radius(k), self.radius(k - 1));
        let hm = rb - ra;
        let hp = rc - rb;
        let (fa, fb, fc) = (f(k + 1), f(k), f(k - 1));
        let d1 = fa * (-hp / (hm * (hm + hp))) + fb * ((hp - hm) / (hm * hp)) + fc * (hm / (hp * (hm + hp)));
        let d2 = (fa / (hm * (hm + hp)) - fb / (hm * hp) + fc / (hp * (hm + hp))) * 2.0;
        (d1, d2)
    }

    /// Complex Hessian of `π*χ + iDD̄Φ` on `A × X` at radial index `k`, at the
    /// points with `arg z = 0`; index 0 is the annulus direction.
    pub fn hessian<B: Backend + ?Sized>(&self, b: &B, chi: &[Mat], k: usize) -> Vec<Mat> {
        let n = b.dim();
        let r = self.radius(k);
        let grads: Vec<(Vec<Covector>, Vec<Covector>)> =
            (k - 1..=k + 1).map(|j| geometry::gradients_complex(b, &self.values[j])).collect();
        let inner = geometry::assemble_complex(b, chi, &self.values[k]);
        (0..b.len())
            .map(|i| {
                let (d1, d2) = self.radial_derivatives(|j| self.values[j][i], k);
                let mut h = Mat::zeros(n + 1);
                h[(0, 0)] = (d2 + d1 / r) * 0.25;
                for a in 0..n {
                    let (da, _) = self.radial_derivatives(|j| grads[j + 1 - k].1[i][a], k);
                    let (db, _) = self.radial_derivatives(|j| grads[j + 1 - k].0[i][a], k);
                    h[(0, a + 1)] = da * 0.5;
                    h[(a + 1, 0)] = db * 0.5;
                    for c in 0..n {
                        h[(a + 1, c + 1)] = inner[i][(a, c)];
                    }
                }
                h
            })
            .collect()
    }
}

/// Both sides of the lift identity and the annulus residuals at one radius.
#[derive(Clone, Debug, PartialEq)]
pub struct AnnulusSlice {
    pub time: f64,
    /// Density of `(π*ω₀^ℂ + iDD̄Φ)^{n+1}`.
    pub lhs: Vec<C64>,
    /// Density of `(n+1)·i dz∧dz̄/(8|z|²)∧(φ̈(ω^ℂ)ⁿ − n i∂φ̇∧∂̄φ̇∧(ω^ℂ)^{n−1})`.
    pub rhs: Vec<C64>,
    pub identity_err: f64,
    /// `sup |(π*ω₀ + iDD̄ Im Φ)^{n+1}|`, normalized like the path residual.
    pub kahler_residual: f64,
    /// `sup |Re[e^{−iθ̂}(…)^{n+1}]|`, normalized like the path residual.
    pub phase_residual: f64,
    /// `min Im[e^{−iθ̂}(…)^{n+1}]`, normalized; positive along calibrated geodesics.
    pub calibration_min: f64,
}

/// Evaluates the lift identity on the product grid at every interior radius.
pub fn annulus_residual<B: Backend + ?Sized>(
    b: &B,
    path: &PotentialPath,
    reference: &Reference,
    class: &ClassData,
) -> Result<Vec<AnnulusSlice>> {
    let lift = AnnulusField::lift(path);
    let n = b.dim();
    let big = factorial(n + 1);
    let chi = reference.complex();
    let rot = C64::from_polar(1.0, -class.theta_hat());
    // The Kähler equation only sees Im Φ; lift it as a real function.
    let im_lift = AnnulusField {
        radial: path.times.clone(),
        values: path.potentials.iter().map(|p| p.v().iter().map(|v| C64::new(*v, 0.0)).collect()).collect(),
    };
    let mut out = Vec::new();
    for k in 1..path.len().saturating_sub(1) {
        let r = lift.radius(k);
        let h = lift.hessian(b, &chi, k);
        let hk = im_lift.hessian(b, reference.omega0(), k);
        let (phi, d1, d2) = path.derivatives(k)?;
        let pot = ComplexPotential::from_complex(&phi);
        let g = reference.metric(b, pot.v())?;
        let m = reference.complex_form(b, &pot);
        let (dphi, dbar_phi) = geometry::gradients_complex(b, &d1);
        let mut lhs = Vec::with_capacity(b.len());
        let mut rhs = Vec::with_capacity(b.len());
        let mut kres: f64 = 0.0;
        let mut pres: f64 = 0.0;
        let mut cal = f64::INFINITY;
        for i in 0..b.len() {
            let l = h[i].det() * big;
            let pair = geometry::pair_density(&dphi[i], &dbar_phi[i], &m[i]);
            let rr = (d2[i] * m[i].det() - pair) * (big / (4.0 * r * r));
            let norm = 4.0 * r * r / (big * g[i].det().re);
            let kd = (hk[i].det() * big).norm();
            kres = kres.max(kd * norm);
            pres = pres.max(((rot * l).re * norm).abs());
            cal = cal.min((rot * l).im * norm);
            lhs.push(l);
            rhs.push(rr);
        }
        let scale = rhs.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
        let identity_err = lhs.iter().zip(&rhs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / scale;
        out.push(AnnulusSlice {
            time: path.times[k],
            lhs,
            rhs,
            identity_err,
            kahler_residual: kres,
            phase_residual: pres,
            calibration_min: cal,
        });
    }
    Ok(out)
}

/// Second-derivative estimates `(F(t+Δt) − 2F(t) + F(t−Δt))/Δt²` of a
/// functional along the path.
pub fn convexity_probe(path: &PotentialPath, functional: impl Fn(&ComplexPotential) -> Result<f64>) -> Result<Vec<f64>> {
    if path.len() < 3 {
        return Err(Error::InvalidInput("convexity probe needs at least three samples"));
    }
    let vals: Vec<f64> = path.potentials.iter().map(&functional).collect::<Result<_>>()?;
    let dt = path.dt();
    Ok(vals.windows(3).map(|w| (w[0] - 2.0 * w[1] + w[2]) / (dt * dt)).collect())
}

/// Directional derivative of `σ` along the path direction, for tests that
/// compare against differences of the K-energy.
pub fn sigma_along<B: Backend + ?Sized>(
    b: &B,
    path: &PotentialPath,
    reference: &Reference,
    class: &ClassData,
    k: usize,
) -> Result<f64> {
    let (phi, d1, _) = path.derivatives(k)?;
    first_variation(b, &ComplexPotential::from_complex(&phi), &ComplexPotential::from_complex(&d1), reference, class)
}

fn sup(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}
