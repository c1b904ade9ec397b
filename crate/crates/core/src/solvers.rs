//! Desk-scale solvers: dHYM flow at fixed metric, the Monge–Ampère step of the
//! surface system, ε-regularized geodesics in dimension one, and descent on
//! the complexified K-energy.
//!
//! Non-convergence is reported as [`Error::NonConvergence`] with the residual
//! history attached.

use crate::class::ClassData;
use crate::error::{Error, Result};
use crate::functionals::{self, ComplexPotential, Reference};
use crate::geodesics::PotentialPath;
use crate::geometry::{self, Backend};
use crate::linalg::Mat;
use crate::prelude::*;
use crate::torus::TorusGrid;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    pub max_iters: usize,
    pub tol: f64,
    /// Flow step in units of the squared grid spacing, or the initial
    /// line-search step for descent.
    pub step: f64,
    /// Factor applied to a rejected step, in `(0, 1]`.
    pub damping: f64,
    pub epsilon: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { max_iters: 10_000, tol: 1e-8, step: 0.2, damping: 0.5, epsilon: 0.0 }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidInput("tol must be positive"));
        }
        if !(self.step > 0.0) {
            return Err(Error::InvalidInput("step must be positive"));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidInput("damping must lie in (0, 1]"));
        }
        if !(self.epsilon >= 0.0) {
            return Err(Error::InvalidInput("epsilon must be non-negative"));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidInput("max_iters must be positive"));
        }
        Ok(())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn sup(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Outcome of a linear solve.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSolve {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Final relative residual `‖b − Ax‖/‖b‖`.
    pub residual: f64,
}

/// Right-preconditioned BiCGStab for `A x = b`, starting from zero.
pub fn bicgstab(
    apply: impl Fn(&[f64]) -> Vec<f64>,
    precond: impl Fn(&[f64]) -> Vec<f64>,
    rhs: &[f64],
    tol: f64,
    max_iters: usize,
) -> Result<LinearSolve> {
    let n = rhs.len();
    let bnorm = norm(rhs);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok(LinearSolve { x, iterations: 0, residual: 0.0 });
    }
    let mut r = rhs.to_vec();
    let r_hat = r.clone();
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut history = Vec::new();
    for it in 1..=max_iters {
        let rho_new = dot(&r_hat, &r);
        if rho_new.abs() < 1e-300 {
            break;
        }
        let beta = (rho_new / rho) * (alpha / omega);
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        let y = precond(&p);
        v = apply(&y);
        let denom = dot(&r_hat, &v);
        if denom.abs() < 1e-300 {
            break;
        }
        alpha = rho_new / denom;
        let s: Vec<f64> = r.iter().zip(&v).map(|(r, v)| r - alpha * v).collect();
        if norm(&s) <= tol * bnorm {
            for i in 0..n {
                x[i] += alpha * y[i];
            }
            return Ok(LinearSolve { x, iterations: it, residual: norm(&s) / bnorm });
        }
        let z = precond(&s);
        let t = apply(&z);
        let tt = dot(&t, &t);
        if tt == 0.0 {
            break;
        }
        omega = dot(&t, &s) / tt;
        for i in 0..n {
            x[i] += alpha * y[i] + omega * z[i];
            r[i] = s[i] - omega * t[i];
        }
        let res = norm(&r) / bnorm;
        history.push(res);
        if res <= tol {
            return Ok(LinearSolve { x, iterations: it, residual: res });
        }
        if omega == 0.0 {
            break;
        }
        rho = rho_new;
    }
    let last = history.last().copied().unwrap_or(1.0);
    Err(Error::NonConvergence { iterations: history.len(), last_residual: last, history })
}

/// Result of [`dhym_flow`].
#[derive(Clone, Debug, PartialEq)]
pub struct DhymFlow {
    pub u: Vec<f64>,
    /// `sup|Θ − θ̂|` of every accepted iterate, starting with the initial one.
    pub residual_history: Vec<f64>,
    /// Accepted plus rejected steps.
    pub iterations: usize,
    /// Whether the final iterate satisfies `cos(Θ − θ̂) > 0` everywhere.
    pub calibrated: bool,
}

fn phase_defect<B: Backend + ?Sized>(b: &B, u: &[f64], metric: &[Mat], b0: &[Mat], theta_hat: f64) -> Vec<f64> {
    let bf = geometry::assemble_form(b, b0, u);
    functionals::phase_field(metric, &bf).into_iter().map(|t| theta_hat - t).collect()
}

/// Explicit Lagrangian phase flow `∂ₜu = θ̂ − Θ(ω⁻¹B_u)` at fixed `ω`.
///
/// The step is `cfg.step·h²` for grid spacing `h`; a step that raises the
/// sup-residual is rejected and the step multiplied by `cfg.damping`, so the
/// recorded history is non-increasing.
pub fn dhym_flow<B: Backend + ?Sized>(
    b: &B,
    initial_u: &[f64],
    metric: &[Mat],
    b0: &[Mat],
    class: &ClassData,
    cfg: &SolverConfig,
) -> Result<DhymFlow> {
    cfg.validate()?;
    if initial_u.len() != b.len() || metric.len() != b.len() || b0.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: b.len(), got: initial_u.len() });
    }
    geometry::check_positive(metric)?;
    let theta = class.theta_hat();
    let mut u = initial_u.to_vec();
    geometry::normalize_mean(b, &mut u);
    let mut defect = phase_defect(b, &u, metric, b0, theta);
    let mut res = sup(&defect);
    let mut history = vec![res];
    let h = b.spacing();
    let mut dt = cfg.step * h * h;
    let mut iterations = 0;
    while res > cfg.tol {
        if iterations >= cfg.max_iters {
            return Err(Error::NonConvergence { iterations, last_residual: res, history });
        }
        iterations += 1;
        let mut trial: Vec<f64> = u.iter().zip(&defect).map(|(u, d)| u + dt * d).collect();
        geometry::normalize_mean(b, &mut trial);
        let trial_defect = phase_defect(b, &trial, metric, b0, theta);
        let trial_res = sup(&trial_defect);
        if trial_res > res {
            dt *= cfg.damping;
            continue;
        }
        u = trial;
        defect = trial_defect;
        res = trial_res;
        history.push(res);
    }
    let calibrated = defect.iter().all(|d| d.cos() > 0.0);
    Ok(DhymFlow { u, residual_history: history, iterations, calibrated })
}

/// Result of [`ma_solve_surface`].
#[derive(Clone, Debug, PartialEq)]
pub struct MaSolution {
    pub v: Vec<f64>,
    /// `sup|log(χ_v²/ω²)|`.
    pub residual: f64,
    pub history: Vec<f64>,
}

fn log_ratio(chi: &[Mat], omega: &[Mat]) -> Vec<f64> {
    chi.iter().zip(omega).map(|(c, w)| (c.det().re / w.det().re).ln()).collect()
}

/// Damped Newton for `χ_v² = ω²` with `χ_v = χ + i∂∂̄v` on the torus of
/// dimension two.
///
/// Each linear step `tr(χ_v⁻¹∂∂̄δ) = −F` is solved by BiCGStab preconditioned
/// with the constant-coefficient operator of the class. The step is halved
/// while it loses positivity or raises the residual.
///
/// With an even number of points per axis the spectral derivative vanishes on
/// the Nyquist modes, which Newton then cannot control; the attainable
/// residual is their aliased content. Odd grids have no such floor.
pub fn ma_solve_surface(grid: &TorusGrid, omega: &[Mat], chi_class: &Mat, cfg: &SolverConfig) -> Result<MaSolution> {
    cfg.validate()?;
    if grid.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: grid.dim() });
    }
    if omega.len() != grid.len() {
        return Err(Error::DimensionMismatch { expected: grid.len(), got: omega.len() });
    }
    geometry::check_positive(omega)?;
    if !chi_class.is_positive_definite() {
        return Err(Error::NonPositiveChi);
    }
    let chi0 = grid.constant_form(*chi_class);
    let left = geometry::volume(grid, &chi0);
    let right = geometry::volume(grid, omega);
    if (left - right).abs() > 1e-10 * right.abs() {
        return Err(Error::VolumeMismatch { left, right });
    }
    let inv_class = chi_class.inv().ok_or(Error::NonPositiveChi)?;
    let mut v = vec![0.0; grid.len()];
    let mut chi = chi0.clone();
    let mut f = log_ratio(&chi, omega);
    let mut res = sup(&f);
    let mut history = vec![res];
    let mut iterations = 0;
    while res > cfg.tol {
        if iterations >= cfg.max_iters {
            return Err(Error::NonConvergence { iterations, last_residual: res, history });
        }
        iterations += 1;
        let inv: Vec<Mat> = chi.iter().map(|c| c.inv().unwrap_or_else(|| Mat::zeros(2))).collect();
        let dens: Vec<f64> = chi.iter().map(|c| c.det().re).collect();
        let mean = dot(&f, &dens) / dens.iter().sum::<f64>();
        let rhs: Vec<f64> = f.iter().map(|f| mean - f).collect();
        let apply = |d: &[f64]| -> Vec<f64> {
            grid.ddbar(d).iter().zip(&inv).map(|(h, a)| a.trace_mul(h).re).collect()
        };
        let precond = |r: &[f64]| grid.solve_trace_ddbar(&inv_class, r);
        let lin = match bicgstab(apply, precond, &rhs, 1e-8, 500) {
            Ok(lin) => lin,
            Err(_) => return Err(Error::NonConvergence { iterations, last_residual: res, history }),
        };
        let mut delta = lin.x;
        geometry::normalize_mean(grid, &mut delta);
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial: Vec<f64> = v.iter().zip(&delta).map(|(v, d)| v + t * d).collect();
            let chi_t = geometry::assemble_form(grid, &chi0, &trial);
            if geometry::check_positive(&chi_t).is_ok() {
                let f_t = log_ratio(&chi_t, omega);
                let r_t = sup(&f_t);
                if r_t < res {
                    v = trial;
                    chi = chi_t;
                    f = f_t;
                    res = r_t;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            return Err(Error::NonConvergence { iterations, last_residual: res, history });
        }
        geometry::normalize_mean(grid, &mut v);
        history.push(res);
    }
    Ok(MaSolution { v, residual: res, history })
}

/// Result of [`geodesic_bvp_epsilon`].
#[derive(Clone, Debug, PartialEq)]
pub struct EpsilonGeodesic {
    /// Path of potentials `(0, φ_t)`; only the Kähler part moves.
    pub path: PotentialPath,
    /// Sup-norm of the ε-equation residual after each Newton step.
    pub history: Vec<f64>,
}

struct Slices<'a> {
    grid: &'a TorusGrid,
    omega0: &'a [Mat],
    dt: f64,
}

impl Slices<'_> {
    /// Pointwise coefficients of slice `k` of a full path: `g`, `φ̈`, `∂φ̇`.
    fn coefficients(&self, phi: &[Vec<f64>], k: usize) -> (Vec<f64>, Vec<f64>, Vec<C64>) {
        let g: Vec<f64> = geometry::assemble_form(self.grid, self.omega0, &phi[k]).iter().map(|m| m[(0, 0)].re).collect();
        let acc: Vec<f64> =
            (0..phi[k].len()).map(|i| (phi[k + 1][i] - 2.0 * phi[k][i] + phi[k - 1][i]) / (self.dt * self.dt)).collect();
        let vel: Vec<f64> = (0..phi[k].len()).map(|i| (phi[k + 1][i] - phi[k - 1][i]) / (2.0 * self.dt)).collect();
        let dvel = self.grid.dz(&vel).into_iter().map(|c| c[0]).collect();
        (g, acc, dvel)
    }

    /// `φ̈ g − |∂φ̇|² − ε ω₀` on the interior slices.
    fn residual(&self, phi: &[Vec<f64>], eps: f64) -> Vec<Vec<f64>> {
        (1..phi.len() - 1)
            .map(|k| {
                let (g, acc, dv) = self.coefficients(phi, k);
                (0..g.len()).map(|i| acc[i] * g[i] - dv[i].norm_sqr() - eps * self.omega0[i][(0, 0)].re).collect()
            })
            .collect()
    }

    fn positive(&self, phi: &[Vec<f64>]) -> bool {
        (1..phi.len() - 1).all(|k| {
            let (g, acc, dv) = self.coefficients(phi, k);
            (0..g.len()).all(|i| g[i] > 0.0 && acc[i] * g[i] - dv[i].norm_sqr() > 0.0)
        })
    }
}

/// Newton solve of the ε-regularized geodesic equation
/// `φ̈(ω₀ + i∂∂̄φ) − |∂φ̇|² = ε ω₀` on the torus of dimension one, with
/// `φ₀ = v0`, `φ₁ = v1`, on `steps + 1` equally spaced times.
///
/// Time derivatives are centered differences. Linear steps use BiCGStab with
/// a per-slice frozen-coefficient preconditioner, diagonal in Fourier space
/// and tridiagonal in time.
pub fn geodesic_bvp_epsilon(
    grid: &TorusGrid,
    omega0: &[Mat],
    v0: &[f64],
    v1: &[f64],
    steps: usize,
    cfg: &SolverConfig,
) -> Result<EpsilonGeodesic> {
    cfg.validate()?;
    if grid.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: grid.dim() });
    }
    let n = grid.len();
    if omega0.len() != n || v0.len() != n || v1.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: v0.len() });
    }
    if steps < 2 {
        return Err(Error::InvalidInput("at least two time steps are required"));
    }
    let eps = cfg.epsilon;
    if !(eps > 0.0) {
        return Err(Error::EpsilonTooSmall);
    }
    let g0 = geometry::assemble_metric(grid, omega0, v0)?;
    let g1 = geometry::assemble_metric(grid, omega0, v1)?;
    let dt = 1.0 / steps as f64;
    let sl = Slices { grid, omega0, dt };

    // Start on a parabola steep enough to be inside the positive cone.
    let diff: Vec<f64> = v1.iter().zip(v0).map(|(a, b)| a - b).collect();
    let grad = grid.dz(&diff);
    let gmin = g0.iter().chain(&g1).fold(f64::INFINITY, |m, g| m.min(g[(0, 0)].re));
    let slope = grad.iter().fold(0.0f64, |m, c| m.max(c[0].norm_sqr())) / gmin;
    let omax = omega0.iter().fold(0.0f64, |m, w| m.max(w[(0, 0)].re));
    let curv = eps * omax / gmin + 2.0 * slope;
    let mut phi: Vec<Vec<f64>> = (0..=steps)
        .map(|k| {
            let t = k as f64 * dt;
            (0..n).map(|i| (1.0 - t) * v0[i] + t * v1[i] + 0.5 * curv * t * (t - 1.0)).collect()
        })
        .collect();
    if !sl.positive(&phi) {
        return Err(Error::EpsilonTooSmall);
    }

    let interior = steps - 1;
    let lap = grid.trace_ddbar_symbol(&Mat::identity(1));
    let mut res_field = sl.residual(&phi, eps);
    let mut res = res_field.iter().map(|r| sup(r)).fold(0.0, f64::max);
    let mut history = vec![res];
    let mut iterations = 0;
    while res > cfg.tol {
        if iterations >= cfg.max_iters {
            return Err(Error::NonConvergence { iterations, last_residual: res, history });
        }
        iterations += 1;
        let coeffs: Vec<_> = (1..=interior).map(|k| sl.coefficients(&phi, k)).collect();
        let frozen: Vec<(f64, f64)> = coeffs
            .iter()
            .map(|(g, acc, _)| (g.iter().sum::<f64>() / n as f64, acc.iter().sum::<f64>() / n as f64))
            .collect();
        let apply = |x: &[f64]| -> Vec<f64> {
            let slice = |k: isize| -> &[f64] {
                if k < 0 || k as usize >= interior {
                    &[]
                } else {
                    &x[k as usize * n..(k as usize + 1) * n]
                }
            };
            let mut out = Vec::with_capacity(x.len());
            for k in 0..interior {
                let (g, acc, dv) = &coeffs[k];
                let (prev, cur, next) = (slice(k as isize - 1), slice(k as isize), slice(k as isize + 1));
                let at = |s: &[f64], i: usize| if s.is_empty() { 0.0 } else { s[i] };
                let vel: Vec<f64> = (0..n).map(|i| (at(next, i) - at(prev, i)) / (2.0 * dt)).collect();
                let dvel = grid.dz(&vel);
                let hess = grid.ddbar(cur);
                for i in 0..n {
                    let dd = (at(next, i) - 2.0 * cur[i] + at(prev, i)) / (dt * dt);
                    out.push(dd * g[i] + acc[i] * hess[i][(0, 0)].re - 2.0 * (dv[i].conj() * dvel[i][0]).re);
                }
            }
            out
        };
        let precond = |r: &[f64]| -> Vec<f64> {
            let hats: Vec<Vec<C64>> = (0..interior).map(|k| grid.to_fourier(&r[k * n..(k + 1) * n])).collect();
            let mut sol = vec![vec![C64::new(0.0, 0.0); n]; interior];
            let mut cp = vec![0.0; interior];
            let mut dp = vec![C64::new(0.0, 0.0); interior];
            for mode in 0..n {
                // a_k(x_{k+1} − 2x_k + x_{k−1})/Δt² + b_k λ x_k = r_k.
                for k in 0..interior {
                    let (a, bcoef) = frozen[k];
                    let off = a / (dt * dt);
                    let diag = -2.0 * off + bcoef * lap[mode].re;
                    let lower = if k > 0 { off } else { 0.0 };
                    let denom = diag - lower * if k > 0 { cp[k - 1] } else { 0.0 };
                    cp[k] = off / denom;
                    let prev = if k > 0 { dp[k - 1] } else { C64::new(0.0, 0.0) };
                    dp[k] = (hats[k][mode] - prev * lower) / denom;
                }
                sol[interior - 1][mode] = dp[interior - 1];
                for k in (0..interior - 1).rev() {
                    sol[k][mode] = dp[k] - sol[k + 1][mode] * cp[k];
                }
            }
            sol.into_iter().flat_map(|s| grid.from_fourier(s)).collect()
        };
        let rhs: Vec<f64> = res_field.iter().flatten().map(|r| -r).collect();
        let lin = bicgstab(apply, precond, &rhs, 1e-12, 1000)?;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let mut trial = phi.clone();
            for k in 0..interior {
                for i in 0..n {
                    trial[k + 1][i] += t * lin.x[k * n + i];
                }
            }
            if sl.positive(&trial) {
                let r_t = sl.residual(&trial, eps);
                let s_t = r_t.iter().map(|r| sup(r)).fold(0.0, f64::max);
                if s_t < res {
                    phi = trial;
                    res_field = r_t;
                    res = s_t;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            return Err(Error::EpsilonTooSmall);
        }
        history.push(res);
    }
    let potentials = phi.into_iter().map(|v| ComplexPotential::new(vec![0.0; n], v)).collect();
    let times = (0..=steps).map(|k| k as f64 * dt).collect();
    Ok(EpsilonGeodesic { path: PotentialPath::new(times, potentials)?, history })
}

/// Result of [`kenergy_descent`].
#[derive(Clone, Debug, PartialEq)]
pub struct Descent {
    pub phi: ComplexPotential,
    /// Complexified K-energy of every accepted iterate, starting with the initial one.
    pub energy_history: Vec<f64>,
    /// System residual of every accepted iterate.
    pub residual_history: Vec<f64>,
}

/// Sup-norms of the imaginary and real parts of
/// `γ(ω^ℂ)ⁿ/ωⁿ − (s − c_γ)`, i.e. of `|γ|r sin(Θ − θ̂)` and
/// `|γ|r cos(Θ − θ̂) − (s − c_γ)`.
pub fn system_residual<B: Backend + ?Sized>(
    b: &B,
    phi: &ComplexPotential,
    reference: &Reference,
    class: &ClassData,
) -> Result<(f64, f64)> {
    let z = functionals::variation_density(b, phi, reference, class)?;
    let g = reference.metric(b, phi.v())?;
    let (mut im, mut re) = (0.0f64, 0.0f64);
    for (z, g) in z.iter().zip(&g) {
        let w = z / g.det().re;
        im = im.max(w.im.abs());
        re = re.max(w.re.abs());
    }
    Ok((im, re))
}

/// Preconditioned gradient descent on the complexified K-energy with an
/// Armijo line search, confined to calibrated potentials.
///
/// The descent direction smooths the `σ`-gradient with
/// `(1 + (−Δ₀)^k)⁻¹`, `k = 1` for the B-field part and `k = 2` for the
/// Kähler part, falling back to the raw gradient when that fails to descend.
pub fn kenergy_descent<B: Backend + ?Sized>(
    b: &B,
    initial: &ComplexPotential,
    reference: &Reference,
    class: &ClassData,
    cfg: &SolverConfig,
) -> Result<Descent> {
    cfg.validate()?;
    if initial.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: b.len(), got: initial.len() });
    }
    let theta = class.theta_hat();
    let mut phi = initial.clone().normalized(b);
    if !functionals::is_calibrated(b, &phi, reference, theta) {
        return Err(Error::LostCalibration);
    }
    let mut energy = functionals::complexified_k_energy(b, &phi, reference, class)?;
    let (ri, rr) = system_residual(b, &phi, reference, class)?;
    let mut res = ri.max(rr);
    let mut energies = vec![energy];
    let mut residuals = vec![res];
    let mut t = cfg.step;
    let mut iterations = 0;
    while res > cfg.tol {
        if iterations >= cfg.max_iters {
            return Err(Error::NonConvergence { iterations, last_residual: res, history: residuals });
        }
        iterations += 1;
        let z = functionals::variation_density(b, &phi, reference, class)?;
        let gu: Vec<f64> = z.iter().map(|z| z.im).collect();
        let gv: Vec<f64> = z.iter().map(|z| z.re).collect();
        let slope_of = |du: &[f64], dv: &[f64]| {
            let q: Vec<f64> = (0..gu.len()).map(|i| du[i] * gu[i] + dv[i] * gv[i]).collect();
            geometry::integrate_density(b, &q)
        };
        let mut du: Vec<f64> = b.smooth(&gu, 1).iter().map(|x| -x).collect();
        let mut dv: Vec<f64> = b.smooth(&gv, 2).iter().map(|x| -x).collect();
        let mut slope = slope_of(&du, &dv);
        if !(slope < 0.0) {
            du = gu.iter().map(|x| -x).collect();
            dv = gv.iter().map(|x| -x).collect();
            slope = slope_of(&du, &dv);
        }
        let dir = ComplexPotential::new(du, dv);
        let mut accepted = false;
        for _ in 0..60 {
            let trial = phi.axpy(t, &dir).normalized(b);
            if functionals::is_calibrated(b, &trial, reference, theta) {
                if let Ok(e) = functionals::complexified_k_energy(b, &trial, reference, class) {
                    if e < energy + 1e-4 * t * slope {
                        phi = trial;
                        energy = e;
                        accepted = true;
                        break;
                    }
                }
            }
            t *= cfg.damping.min(0.5);
        }
        if !accepted {
            return Err(Error::NonConvergence { iterations, last_residual: res, history: residuals });
        }
        t = (2.0 * t).min(cfg.step * 1e3);
        let (ri, rr) = system_residual(b, &phi, reference, class)?;
        res = ri.max(rr);
        energies.push(energy);
        residuals.push(res);
    }
    Ok(Descent { phi, energy_history: energies, residual_history: residuals })
}
