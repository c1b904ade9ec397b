//! The coupled system on a complex surface after the change of variables
//! `χ = sin θ̂·B − cos θ̂·ω`:
//!
//! ```text
//! χ² = ω²,    s(ω) = γ̃ Λ_ω χ + c,    γ̃ = |γ| / sin²θ̂.
//! ```
//!
//! `u` is the potential of `ω = ω₀ + i∂∂̄u` and `v` the potential of
//! `χ = χ₀ + i∂∂̄v`.

use crate::class::{surface_constants, ClassData};
use crate::error::{Error, Result};
use crate::functionals::{energy_family, entropy};
use crate::geometry::{self, Backend, Covector, FormField};
use crate::linalg::{pairwise_sum, Mat};
use crate::prelude::*;
use crate::random::LabRng;
use crate::torus::TorusGrid;

const CLASS_TOL: f64 = 1e-12;

/// Pointwise `sin θ̂·B − cos θ̂·ω`.
pub fn chi_change_of_variables(bfield: &[Mat], metric: &[Mat], theta_hat: f64) -> Result<FormField> {
    if bfield.len() != metric.len() {
        return Err(Error::DimensionMismatch { expected: metric.len(), got: bfield.len() });
    }
    let (s, c) = theta_hat.sin_cos();
    if s.abs() <= 1e-12 {
        return Err(Error::DegeneratePhase(s.abs()));
    }
    Ok(bfield.iter().zip(metric).map(|(b, w)| b.scale_re(s) - w.scale_re(c)).collect())
}

/// Potentials `(u, v)` together with references and coupling constants.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfacePair {
    u: Vec<f64>,
    v: Vec<f64>,
    omega0: FormField,
    chi0: FormField,
    gamma_tilde: f64,
    c: f64,
}

impl SurfacePair {
    pub fn new<B: Backend + ?Sized>(
        b: &B,
        u: Vec<f64>,
        v: Vec<f64>,
        omega0: FormField,
        chi0: FormField,
        gamma_tilde: f64,
        c: f64,
    ) -> Result<Self> {
        if b.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: b.dim() });
        }
        for len in [u.len(), v.len(), omega0.len(), chi0.len()] {
            if len != b.len() {
                return Err(Error::DimensionMismatch { expected: b.len(), got: len });
            }
        }
        geometry::check_positive(&omega0)?;
        geometry::check_positive(&chi0)?;
        let (va, vb) = (geometry::volume(b, &omega0), geometry::volume(b, &chi0));
        if (va - vb).abs() > CLASS_TOL * va.abs().max(vb.abs()) {
            return Err(Error::VolumeMismatch { left: va, right: vb });
        }
        let pair = SurfacePair { u, v, omega0, chi0, gamma_tilde, c };
        pair.omega(b)?;
        pair.chi(b)?;
        Ok(pair)
    }

    /// Constant references and constants derived from a torus class.
    pub fn from_class<B: Backend + ?Sized>(b: &B, class: &ClassData, u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        let k = surface_constants(class)?;
        let (alpha, _) = class.representatives().ok_or(Error::InvalidInput("class has no constant representatives"))?;
        if !k.chi_class.is_positive_definite() {
            return Err(Error::NonPositiveChi);
        }
        let len = b.len();
        Self::new(b, u, v, vec![alpha; len], vec![k.chi_class; len], k.gamma_tilde, k.c)
    }

    /// Same references and constants, new potentials.
    pub fn with_potentials<B: Backend + ?Sized>(&self, b: &B, u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        let pair = SurfacePair { u, v, ..self.clone() };
        pair.omega(b)?;
        pair.chi(b)?;
        Ok(pair)
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }
    pub fn v(&self) -> &[f64] {
        &self.v
    }
    pub fn omega0(&self) -> &[Mat] {
        &self.omega0
    }
    pub fn chi0(&self) -> &[Mat] {
        &self.chi0
    }
    pub fn gamma_tilde(&self) -> f64 {
        self.gamma_tilde
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn len(&self) -> usize {
        self.u.len()
    }
    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    /// `ω_u`.
    pub fn omega<B: Backend + ?Sized>(&self, b: &B) -> Result<FormField> {
        geometry::assemble_metric(b, &self.omega0, &self.u)
    }

    /// `χ_v`.
    pub fn chi<B: Backend + ?Sized>(&self, b: &B) -> Result<FormField> {
        geometry::assemble_metric(b, &self.chi0, &self.v)
    }
}

/// Pointwise residuals of the two equations.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceResidual {
    /// `χ²/ω² − 1`.
    pub dhym: Vec<f64>,
    /// `s(ω) − c − γ̃ Λ_ω χ`.
    pub scalar: Vec<f64>,
}

impl SurfaceResidual {
    pub fn sup(&self) -> f64 {
        self.dhym.iter().chain(&self.scalar).fold(0.0, |m, x| m.max(x.abs()))
    }
}

pub fn surface_residuals<B: Backend + ?Sized>(b: &B, pair: &SurfacePair) -> Result<SurfaceResidual> {
    let omega = pair.omega(b)?;
    let chi = pair.chi(b)?;
    let s = geometry::scalar_curvature(b, &omega)?;
    let dhym = omega.iter().zip(&chi).map(|(w, x)| x.det().re / w.det().re - 1.0).collect();
    let scalar = s
        .iter()
        .zip(omega.iter().zip(&chi))
        .map(|(s, (w, x))| s - pair.c - pair.gamma_tilde * geometry::trace_with_inverse(w, x).re)
        .collect();
    Ok(SurfaceResidual { dhym, scalar })
}

/// `M′(u,v) = H(u) + (c/3)E(u) − E_{Ric(ω₀)}(u) − γ̃((1/3)E^χ(v) − E_{χ₀}(u) − ∫ v ω_u²)`.
pub fn m_prime<B: Backend + ?Sized>(b: &B, pair: &SurfacePair) -> Result<f64> {
    let omega = pair.omega(b)?;
    pair.chi(b)?;
    let h = entropy(b, &pair.u, &pair.omega0)?;
    let e = energy_family(b, &pair.u, &pair.omega0, None);
    let ric0 = geometry::ricci_form(b, &pair.omega0)?;
    let e_ric = energy_family(b, &pair.u, &pair.omega0, Some(&ric0));
    let e_chi = energy_family(b, &pair.v, &pair.chi0, None);
    let e_chi0 = energy_family(b, &pair.u, &pair.omega0, Some(&pair.chi0));
    let coupling = geometry::integrate(b, &pair.v, &omega);
    Ok(h + pair.c / 3.0 * e - e_ric - pair.gamma_tilde * (e_chi / 3.0 - e_chi0 - coupling))
}

/// Densities `(g_u, g_v)` with `DM′(u̇, v̇) = ∫ (u̇ g_u + v̇ g_v)`:
/// `g_u = −(s − c − γ̃Λ_ωχ) det ω`, `g_v = −γ̃(det χ − det ω)`.
pub fn m_prime_gradient<B: Backend + ?Sized>(b: &B, pair: &SurfacePair) -> Result<(Vec<f64>, Vec<f64>)> {
    let omega = pair.omega(b)?;
    let chi = pair.chi(b)?;
    let r = surface_residuals(b, pair)?;
    let gu = r.scalar.iter().zip(&omega).map(|(r, w)| -r * w.det().re).collect();
    let gv = omega.iter().zip(&chi).map(|(w, x)| -pair.gamma_tilde * (x.det().re - w.det().re)).collect();
    Ok((gu, gv))
}

pub fn m_prime_variation<B: Backend + ?Sized>(b: &B, pair: &SurfacePair, du: &[f64], dv: &[f64]) -> Result<f64> {
    let (gu, gv) = m_prime_gradient(b, pair)?;
    let q: Vec<f64> = (0..gu.len()).map(|i| du[i] * gu[i] + dv[i] * gv[i]).collect();
    Ok(geometry::integrate_density(b, &q))
}

/// Constant density with total mass `∫ω₀²`.
pub fn default_mu<B: Backend + ?Sized>(b: &B, pair: &SurfacePair) -> Vec<f64> {
    let total = geometry::volume(b, &pair.omega0);
    let unit = geometry::integrate_density(b, &vec![1.0; b.len()]);
    vec![total / unit; b.len()]
}

fn check_mu<B: Backend + ?Sized>(b: &B, pair: &SurfacePair, mu: &[f64]) -> Result<()> {
    if mu.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: b.len(), got: mu.len() });
    }
    let mass = geometry::integrate_density(b, mu);
    let vol = geometry::volume(b, &pair.omega0);
    if (mass - vol).abs() > 1e-10 * vol {
        return Err(Error::VolumeMismatch { left: mass, right: vol });
    }
    Ok(())
}

/// `F_μ(u,v) = ∫uμ − (1/3)E(u) + (γ̃/2)(∫vμ − (1/3)E^χ(v))`.
pub fn f_mu<B: Backend + ?Sized>(b: &B, pair: &SurfacePair, mu: &[f64]) -> Result<f64> {
    check_mu(b, pair, mu)?;
    pair.omega(b)?;
    pair.chi(b)?;
    let um: Vec<f64> = pair.u.iter().zip(mu).map(|(u, m)| u * m).collect();
    let vm: Vec<f64> = pair.v.iter().zip(mu).map(|(v, m)| v * m).collect();
    let eu = energy_family(b, &pair.u, &pair.omega0, None);
    let ev = energy_family(b, &pair.v, &pair.chi0, None);
    Ok(geometry::integrate_density(b, &um) - eu / 3.0
        + 0.5 * pair.gamma_tilde * (geometry::integrate_density(b, &vm) - ev / 3.0))
}

/// `∫u̇(μ − ω_u²) + (γ̃/2)∫v̇(μ − χ_v²)`.
pub fn f_mu_variation<B: Backend + ?Sized>(
    b: &B,
    pair: &SurfacePair,
    mu: &[f64],
    du: &[f64],
    dv: &[f64],
) -> Result<f64> {
    check_mu(b, pair, mu)?;
    let omega = pair.omega(b)?;
    let chi = pair.chi(b)?;
    let q: Vec<f64> = (0..mu.len())
        .map(|i| du[i] * (mu[i] - omega[i].det().re) + 0.5 * pair.gamma_tilde * dv[i] * (mu[i] - chi[i].det().re))
        .collect();
    Ok(geometry::integrate_density(b, &q))
}

/// A direction `(a, b)` in the tangent space of potential pairs.
pub type Direction<'a> = (&'a [f64], &'a [f64]);

/// `Re Σ_{jk} A_{kj} x_j conj(y_k)`.
fn pair_with(a: &Mat, x: &Covector, y: &Covector) -> f64 {
    let n = a.dim();
    let mut s = C64::new(0.0, 0.0);
    for j in 0..n {
        for k in 0..n {
            s += a[(k, j)] * x[j] * y[k].conj();
        }
    }
    s.re
}

/// `c_k = Σ_j A_{kj} x_j`.
fn apply_mat(a: &Mat, x: &Covector) -> Covector {
    let n = a.dim();
    let mut c = [C64::new(0.0, 0.0); 3];
    for (k, ck) in c.iter_mut().enumerate().take(n) {
        for (j, xj) in x.iter().enumerate().take(n) {
            *ck += a[(k, j)] * xj;
        }
    }
    c
}

/// Pointwise data of the Hessian at `(ω_u, χ_v)`.
struct HessianData {
    omega: FormField,
    ginv: FormField,
    chi_inv: FormField,
    /// `g⁻¹ χ g⁻¹`.
    transfer: FormField,
    /// `w_i det g_i`.
    measure: Vec<f64>,
    gamma_tilde: f64,
}

impl HessianData {
    fn new(grid: &TorusGrid, pair: &SurfacePair) -> Result<Self> {
        let omega = pair.omega(grid)?;
        let chi = pair.chi(grid)?;
        let ginv: FormField = omega.iter().map(|g| g.inv().expect("positive metric")).collect();
        let chi_inv = chi.iter().map(|x| x.inv().expect("positive metric")).collect();
        let transfer = ginv.iter().zip(&chi).map(|(gi, x)| *gi * *x * *gi).collect();
        let measure = omega.iter().zip(grid.weights()).map(|(g, w)| w * g.det().re).collect();
        Ok(HessianData { omega, ginv, chi_inv, transfer, measure, gamma_tilde: pair.gamma_tilde })
    }
}

/// `T_{jm} = ∂̄_m V_j`, `V_j = Σ_p (g⁻¹)_{pj} ∂̄_p u`.
fn dbar_gradient(grid: &TorusGrid, ginv: &[Mat], u: &[f64]) -> Vec<[Covector; 3]> {
    let n = grid.dim();
    let du = grid.dz(u);
    let mut t = vec![[[C64::new(0.0, 0.0); 3]; 3]; u.len()];
    for j in 0..n {
        let vj: Vec<C64> = (0..u.len()).map(|i| (0..n).map(|p| ginv[i][(p, j)] * du[i][p].conj()).sum()).collect();
        for (ti, d) in t.iter_mut().zip(grid.dzbar_complex(&vj)) {
            ti[j] = d;
        }
    }
    t
}

/// Gradient in `y` of `Re Σ_i Σ_j c_{ij} (∂_j y)_i`.
fn dz_adjoint(grid: &TorusGrid, c: &[Covector]) -> Vec<f64> {
    let mut out = vec![0.0; c.len()];
    for j in 0..grid.dim() {
        let re: Vec<f64> = c.iter().map(|c| 0.5 * c[j].re).collect();
        let im: Vec<f64> = c.iter().map(|c| 0.5 * c[j].im).collect();
        for (o, (a, b)) in
            out.iter_mut().zip(grid.apply_axis_transpose(&re, 2 * j).into_iter().zip(grid.apply_axis_transpose(&im, 2 * j + 1)))
        {
            *o += a + b;
        }
    }
    out
}

/// Adjoint of the complex-linear map `f ↦ ∂̄_m f` under `Re Σ conj(·)(·)`.
fn dzbar_adjoint(grid: &TorusGrid, z: &[C64], m: usize) -> Vec<C64> {
    let re: Vec<f64> = z.iter().map(|z| z.re).collect();
    let im: Vec<f64> = z.iter().map(|z| z.im).collect();
    let (xr, xi) = (grid.apply_axis_transpose(&re, 2 * m), grid.apply_axis_transpose(&im, 2 * m));
    let (yr, yi) = (grid.apply_axis_transpose(&re, 2 * m + 1), grid.apply_axis_transpose(&im, 2 * m + 1));
    // ½(Xᵀ − iYᵀ)(re + i·im)
    (0..z.len()).map(|i| C64::new(0.5 * (xr[i] + yi[i]), 0.5 * (xi[i] - yr[i]))).collect()
}

/// Symmetric Hessian form of `M′` at `(ω_u, χ_v)`:
///
/// ```text
/// ∫ Re⟨𝒟a₀, 𝒟a₁⟩ ω² + γ̃ ∫ [⟨∂b₀,∂b₁⟩_{χ⁻¹} + ⟨∂a₀,∂a₁⟩_{ω⁻¹χω⁻¹}
///                           − ⟨∂a₀,∂b₁⟩_{ω⁻¹} − ⟨∂b₀,∂a₁⟩_{ω⁻¹}] ω²
/// ```
pub fn hessian_form(grid: &TorusGrid, pair: &SurfacePair, x: Direction, y: Direction) -> Result<f64> {
    let d = HessianData::new(grid, pair)?;
    let n = grid.dim();
    let (t0, t1) = (dbar_gradient(grid, &d.ginv, x.0), dbar_gradient(grid, &d.ginv, y.0));
    let (da0, db0, da1, db1) = (grid.dz(x.0), grid.dz(x.1), grid.dz(y.0), grid.dz(y.1));
    let terms: Vec<f64> = (0..grid.len())
        .map(|i| {
            let (g, gi) = (&d.omega[i], &d.ginv[i]);
            let mut lich = C64::new(0.0, 0.0);
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        for m in 0..n {
                            lich += g[(j, k)] * gi[(l, m)] * t0[i][j][l] * t1[i][k][m].conj();
                        }
                    }
                }
            }
            let coupled = pair_with(&d.chi_inv[i], &db0[i], &db1[i]) + pair_with(&d.transfer[i], &da0[i], &da1[i])
                - pair_with(gi, &da0[i], &db1[i])
                - pair_with(gi, &db0[i], &da1[i]);
            d.measure[i] * (lich.re + d.gamma_tilde * coupled)
        })
        .collect();
    Ok(pairwise_sum(&terms))
}

/// `⟨x, y⟩_{L²(ω_u)}` on pairs of fields.
pub fn l2_pairing(grid: &TorusGrid, pair: &SurfacePair, x: Direction, y: Direction) -> Result<f64> {
    let omega = pair.omega(grid)?;
    let terms: Vec<f64> = (0..grid.len())
        .map(|i| grid.weights()[i] * omega[i].det().re * (x.0[i] * y.0[i] + x.1[i] * y.1[i]))
        .collect();
    Ok(pairwise_sum(&terms))
}

/// `Q(a, b)`: the operator with `⟨Q(x), y⟩_{L²(ω)} = Hess(x, y)`, computed as
/// the exact adjoint of the discrete form.
pub fn hessian_q_apply(grid: &TorusGrid, pair: &SurfacePair, a: &[f64], b: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let d = HessianData::new(grid, pair)?;
    let n = grid.dim();
    let len = grid.len();
    let t0 = dbar_gradient(grid, &d.ginv, a);
    let (da, db) = (grid.dz(a), grid.dz(b));

    // Lichnerowicz part: chain the adjoints of T ← V ← ∂y.
    let mut cu = vec![[C64::new(0.0, 0.0); 3]; len];
    for k in 0..n {
        let mut bk = vec![C64::new(0.0, 0.0); len];
        for m in 0..n {
            let akm: Vec<C64> = (0..len)
                .map(|i| {
                    let mut s = C64::new(0.0, 0.0);
                    for j in 0..n {
                        for l in 0..n {
                            s += d.omega[i][(j, k)] * d.ginv[i][(l, m)] * t0[i][j][l];
                        }
                    }
                    s * d.measure[i]
                })
                .collect();
            for (b, z) in bk.iter_mut().zip(dzbar_adjoint(grid, &akm, m)) {
                *b += z;
            }
        }
        for i in 0..len {
            for p in 0..n {
                cu[i][p] += d.ginv[i][(p, k)].conj() * bk[i];
            }
        }
    }

    // Coupling part: Re Σ A_{kj} x_j conj(∂_k y) has coefficient conj(Ax)_k on ∂_k y.
    let mut cv = vec![[C64::new(0.0, 0.0); 3]; len];
    for i in 0..len {
        let gt = d.gamma_tilde * d.measure[i];
        let tu = apply_mat(&d.transfer[i], &da[i]);
        let gb = apply_mat(&d.ginv[i], &db[i]);
        let xv = apply_mat(&d.chi_inv[i], &db[i]);
        let ga = apply_mat(&d.ginv[i], &da[i]);
        for k in 0..n {
            cu[i][k] += (tu[k] - gb[k]).conj() * gt;
            cv[i][k] = (xv[k] - ga[k]).conj() * gt;
        }
    }
    let qu = dz_adjoint(grid, &cu);
    let qv = dz_adjoint(grid, &cv);
    let w = grid.weights();
    let scale: Vec<f64> = (0..len).map(|i| w[i] * d.omega[i].det().re).collect();
    Ok((qu.iter().zip(&scale).map(|(q, s)| q / s).collect(), qv.iter().zip(&scale).map(|(q, s)| q / s).collect()))
}

/// `Q(a, b)` from its differential-operator expression
///
/// ```text
/// Q_u = Re(Δ²a + tr(g⁻¹ Ric g⁻¹ ∂∂̄a) + ⟨∂s, ∂a⟩) − γ̃ div(ω⁻¹χω⁻¹∂a − ω⁻¹∂b)
/// Q_v = −γ̃ div(χ⁻¹∂b − ω⁻¹∂a)
/// ```
///
/// with `div F = (det g)⁻¹ Re Σ_k ∂̄_k(det g·F_k)`. Agrees with
/// [`hessian_q_apply`] up to discretization error.
pub fn hessian_q_operator(grid: &TorusGrid, pair: &SurfacePair, a: &[f64], b: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let d = HessianData::new(grid, pair)?;
    let n = grid.dim();
    let len = grid.len();
    let lap = |f: &[f64]| -> Vec<f64> {
        grid.ddbar(f).iter().zip(&d.ginv).map(|(h, gi)| gi.trace_mul(h).re).collect()
    };
    let ric = geometry::ricci_form(grid, &d.omega)?;
    let s = geometry::scalar_curvature(grid, &d.omega)?;
    let ds = grid.dz(&s);
    let ha = grid.ddbar(a);
    let bilap = lap(&lap(a));
    let (da, db) = (grid.dz(a), grid.dz(b));
    let det: Vec<f64> = d.omega.iter().map(|g| g.det().re).collect();
    let div = |flux: &dyn Fn(usize) -> Covector| -> Vec<f64> {
        let mut out = vec![0.0; len];
        for k in 0..n {
            let fk: Vec<C64> = (0..len).map(|i| flux(i)[k] * det[i]).collect();
            for (o, c) in out.iter_mut().zip(grid.dzbar_complex(&fk)) {
                *o += c[k].re;
            }
        }
        out.iter().zip(&det).map(|(o, d)| o / d).collect()
    };
    let flux_u = |i: usize| {
        let x = apply_mat(&d.transfer[i], &da[i]);
        let y = apply_mat(&d.ginv[i], &db[i]);
        let mut c = [C64::new(0.0, 0.0); 3];
        for k in 0..n {
            c[k] = x[k] - y[k];
        }
        c
    };
    let flux_v = |i: usize| {
        let x = apply_mat(&d.chi_inv[i], &db[i]);
        let y = apply_mat(&d.ginv[i], &da[i]);
        let mut c = [C64::new(0.0, 0.0); 3];
        for k in 0..n {
            c[k] = x[k] - y[k];
        }
        c
    };
    let div_u = div(&flux_u);
    let div_v = div(&flux_v);
    let qu = (0..len)
        .map(|i| {
            let gi = &d.ginv[i];
            let curv = (*gi * ric[i] * *gi).trace_mul(&ha[i]).re;
            let grad = pair_with(gi, &ds[i], &da[i]);
            bilap[i] + curv + grad - d.gamma_tilde * div_u[i]
        })
        .collect();
    let qv = div_v.iter().map(|x| -d.gamma_tilde * x).collect();
    Ok((qu, qv))
}

/// Result of a Lanczos scan of `Q` on the complement of the constants.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenScan {
    /// Ritz values, ascending.
    pub ritz: Vec<f64>,
    /// `‖Q(1,0)‖ + ‖Q(0,1)‖`, which vanishes when constants are in the kernel.
    pub constant_defect: f64,
}

impl EigenScan {
    pub fn min(&self) -> f64 {
        self.ritz.first().copied().unwrap_or(f64::NAN)
    }
}

/// Lanczos iteration with full reorthogonalization in the `L²(ω_u)` inner
/// product, started from a random mean-free pair.
pub fn hessian_eigen_scan(grid: &TorusGrid, pair: &SurfacePair, steps: usize, seed: u64) -> Result<EigenScan> {
    let len = grid.len();
    let omega = pair.omega(grid)?;
    let mass: Vec<f64> = (0..len).map(|i| grid.weights()[i] * omega[i].det().re).collect();
    let total: f64 = mass.iter().sum();
    let dot = |x: &[f64], y: &[f64]| -> f64 {
        pairwise_sum(&(0..2 * len).map(|i| mass[i % len] * x[i] * y[i]).collect::<Vec<_>>())
    };
    let deflate = |x: &mut [f64]| {
        for part in 0..2 {
            let s = &mut x[part * len..(part + 1) * len];
            let m: f64 = s.iter().zip(&mass).map(|(a, w)| a * w).sum::<f64>() / total;
            s.iter_mut().for_each(|a| *a -= m);
        }
    };
    let apply = |x: &[f64]| -> Result<Vec<f64>> {
        let (qu, qv) = hessian_q_apply(grid, pair, &x[..len], &x[len..])?;
        Ok(qu.into_iter().chain(qv).collect())
    };

    let ones = vec![1.0; len];
    let zeros = vec![0.0; len];
    let (a1, b1) = hessian_q_apply(grid, pair, &ones, &zeros)?;
    let (a2, b2) = hessian_q_apply(grid, pair, &zeros, &ones)?;
    let constant_defect = [a1, b1, a2, b2].iter().map(|f| crate::linalg::sup_norm(f)).sum();

    let mut rng = LabRng::new(seed);
    let mut q: Vec<f64> = (0..2 * len).map(|_| rng.normal()).collect();
    deflate(&mut q);
    let nrm = dot(&q, &q).sqrt();
    q.iter_mut().for_each(|x| *x /= nrm);
    let mut basis: Vec<Vec<f64>> = vec![q];
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    for k in 0..steps.min(2 * len - 2) {
        let mut w = apply(&basis[k])?;
        deflate(&mut w);
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&w, b);
                w.iter_mut().zip(b).for_each(|(w, b)| *w -= c * b);
            }
        }
        let a = dot(&apply(&basis[k])?, &basis[k]);
        alpha.push(a);
        let bnorm = dot(&w, &w).sqrt();
        if bnorm < 1e-12 * a.abs().max(1.0) {
            break;
        }
        beta.push(bnorm);
        basis.push(w.into_iter().map(|x| x / bnorm).collect());
    }
    let m = alpha.len();
    let t = nalgebra::DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let mut ritz: Vec<f64> = nalgebra::SymmetricEigen::new(t).eigenvalues.iter().copied().collect();
    ritz.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(EigenScan { ritz, constant_defect })
}
