//! Verification suites and solver commands. Every routine builds its inputs
//! from the configuration and its seed, so identical configurations give
//! identical reports.
//!
//! Numerical failures inside a suite become failing checks; only invalid
//! configurations are returned as errors.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use kenergy_core::class::{stability_check_top, surface_constants};
use kenergy_core::cp1::{self, Cp1Grid, InvariantForm, MomentumProfile};
use kenergy_core::functionals::{
    complexified_calabi, complexified_k_energy, evaluate_batch, first_variation, phase_field, ComplexPotential, Reference,
};
use kenergy_core::geodesics::{
    annulus_residual, convexity_probe, residual_coupled, second_variation_along_path, second_variation_formula, PotentialPath,
};
use kenergy_core::geometry::{self, Backend};
use kenergy_core::linalg::Mat;
use kenergy_core::pointwise::{convexity_summands, relative_eigenvalues, HermitianPair, PhaseRadius};
use kenergy_core::random::{LabRng, TrigSeries};
use kenergy_core::solvers::{dhym_flow, geodesic_bvp_epsilon, kenergy_descent, ma_solve_surface, system_residual, SolverConfig};
use kenergy_core::spectral::Stencil;
use kenergy_core::surface::{hessian_eigen_scan, hessian_q_apply, l2_pairing, surface_residuals, SurfacePair};
use kenergy_core::torus::TorusGrid;
use kenergy_core::Complex64 as C64;

use crate::config::{BackendKind, RunConfig, Setup};
use crate::io::{self, GridShape, ProfileRow};
use crate::{Check, LabError, Report};

type Checks = Result<Vec<Check>, LabError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Identities,
    Variations,
    Geodesics,
    Solvers,
    Surface,
    Futaki,
}

impl Suite {
    pub const ALL: [Suite; 6] =
        [Suite::Identities, Suite::Variations, Suite::Geodesics, Suite::Solvers, Suite::Surface, Suite::Futaki];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::Variations => "variations",
            Suite::Geodesics => "geodesics",
            Suite::Solvers => "solvers",
            Suite::Surface => "surface",
            Suite::Futaki => "futaki",
        }
    }
}

impl FromStr for Suite {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self, LabError> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| LabError::config("suite", format!("unknown suite `{s}`")))
    }
}

/// Destination of auxiliary files: `<report path>.<suffix>`. Without a report
/// path nothing is written.
#[derive(Clone, Debug, Default)]
pub struct Artifacts {
    stem: Option<PathBuf>,
}

impl Artifacts {
    pub fn beside(report: Option<&Path>) -> Self {
        Artifacts { stem: report.map(Path::to_path_buf) }
    }

    fn path(&self, suffix: &str) -> Option<PathBuf> {
        self.stem.as_ref().map(|p| {
            let mut s = p.clone().into_os_string();
            s.push(".");
            s.push(suffix);
            PathBuf::from(s)
        })
    }

    fn write(&self, suffix: &str, f: impl FnOnce(&mut BufWriter<File>) -> Result<(), LabError>) -> Result<(), LabError> {
        if let Some(path) = self.path(suffix) {
            let mut w = BufWriter::new(File::create(path)?);
            f(&mut w)?;
        }
        Ok(())
    }
}

struct Ctx<'a> {
    config: &'a RunConfig,
    setup: Setup,
    rng: LabRng,
}

impl Ctx<'_> {
    fn backend(&self) -> &dyn Backend {
        match &self.setup {
            Setup::Torus { grid, .. } => grid,
            Setup::Cp1 { grid, .. } => grid,
        }
    }

    fn reference(&self) -> &Reference {
        match &self.setup {
            Setup::Torus { reference, .. } | Setup::Cp1 { reference, .. } => reference,
        }
    }

    fn torus(&self) -> Option<&TorusGrid> {
        match &self.setup {
            Setup::Torus { grid, .. } => Some(grid),
            Setup::Cp1 { .. } => None,
        }
    }

    fn shape(&self) -> GridShape {
        GridShape { dim: self.config.backend.dim() as u32, m: self.config.m as u32 }
    }

    /// Smooth seeded field: a random trigonometric series on the torus, a
    /// random Chebyshev series in the moment coordinate on the projective line.
    fn field(&mut self, freq: i32, amp: f64) -> Vec<f64> {
        match &self.setup {
            Setup::Torus { grid, .. } => {
                let s = TrigSeries::random(&mut self.rng, grid.axes(), freq, amp);
                grid.sample_series(&s)
            }
            Setup::Cp1 { grid, .. } => {
                let coeffs: Vec<f64> = (1..=freq + 1).map(|k| amp * self.rng.uniform(-1.0, 1.0) / (k * k) as f64).collect();
                grid.sample(|x| {
                    let t = x.clamp(-1.0, 1.0).acos();
                    coeffs.iter().enumerate().map(|(k, c)| c * ((k + 1) as f64 * t).cos()).sum()
                })
            }
        }
    }

    fn potential(&mut self, freq: i32, amp: f64) -> ComplexPotential {
        let u = self.field(freq, amp);
        let v = self.field(freq, amp);
        ComplexPotential::new(u, v)
    }

    fn report(&self, suite: &str) -> Report {
        Report::new(suite, self.config.to_json_value())
    }
}

fn context(config: &RunConfig) -> Result<Ctx<'_>, LabError> {
    Ok(Ctx { config, setup: config.setup()?, rng: LabRng::new(config.seed) })
}

fn require(config: &RunConfig, allowed: &[BackendKind], what: &str) -> Result<(), LabError> {
    if allowed.contains(&config.backend) {
        Ok(())
    } else {
        let names: Vec<&str> = allowed.iter().map(|b| b.name()).collect();
        Err(LabError::config("backend", format!("{what} needs backend {}, got {}", names.join(" or "), config.backend.name())))
    }
}

/// Appends the checks of a fallible block; an error becomes one failing check.
fn collect(report: &mut Report, label: &str, block: impl FnOnce() -> Checks) {
    match block() {
        Ok(checks) => checks.into_iter().for_each(|c| report.push(c)),
        Err(e) => report.push(Check::failed(format!("{label}: {e}"))),
    }
}

fn sup(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn run_suite(config: &RunConfig, suite: Suite) -> Result<Report, LabError> {
    match suite {
        Suite::Identities => identities(config),
        Suite::Variations => variations(config),
        Suite::Geodesics => geodesics(config, &Artifacts::default()),
        Suite::Solvers => solvers(config),
        Suite::Surface => surface(config),
        Suite::Futaki => futaki(config),
    }
}

// ─── identities ────────────────────────────────────────────────────────────

fn identities(config: &RunConfig) -> Result<Report, LabError> {
    let mut ctx = context(config)?;
    let mut report = ctx.report("identities");
    let (mut crit, mut geod) = (0.0f64, 0.0f64);
    for _ in 0..2000 {
        let lambda = ctx.rng.uniform(-10.0, 10.0);
        let eta = ctx.rng.uniform(-1.5, 1.5);
        let (u, v) = (ctx.rng.complex(), ctx.rng.complex());
        let square = (v * lambda - u).norm_sqr() / (1.0 + lambda * lambda);
        crit = crit.max((convexity_summands(lambda, 0.0, u, v).critical - square).abs() / (1.0 + square));
        let closed = square / eta.cos();
        geod = geod.max((convexity_summands(lambda, eta, u, v).geodesic - closed).abs() / (1.0 + closed));
    }
    report.push(Check::at_most("critical summand vs square", crit, 1e-12));
    report.push(Check::at_most("geodesic summand vs square", geod, 1e-12));

    let n = config.backend.dim();
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let a: Vec<C64> = (0..n * n).map(|_| ctx.rng.complex() * 0.7).collect();
        let a = Mat::from_rows(n, &a);
        let omega = a * a.dagger() + Mat::identity(n).scale_re(0.2);
        let h: Vec<C64> = (0..n * n).map(|_| ctx.rng.complex()).collect();
        let h = Mat::from_rows(n, &h);
        let b = (h + h.dagger()).scale_re(0.5);
        let oracle = (b + omega.scale(C64::new(0.0, 1.0))).det() / omega.det();
        match HermitianPair::from_mats(&omega, &b).and_then(|p| relative_eigenvalues(&p)) {
            Ok(spec) => {
                let pr = PhaseRadius::of(&spec);
                worst = worst.max((C64::from_polar(pr.radius, pr.theta) - oracle).norm() / oracle.norm());
            }
            Err(_) => worst = f64::INFINITY,
        }
    }
    report.push(Check::at_most("radius·e^{iΘ} vs det(B+iω)/det ω", worst, 1e-10));

    let class = ctx.setup.class().clone();
    collect(&mut report, "reference", || {
        let b = ctx.backend();
        let zero = ComplexPotential::zero(b.len());
        let (ri, rr) = system_residual(b, &zero, ctx.reference(), &class)?;
        let cal = complexified_calabi(b, &zero, ctx.reference(), &class)?;
        let bound = class.c_gamma().powi(2) * geometry::volume(b, ctx.reference().omega0());
        Ok(vec![
            Check::at_most("reference: sup |Im Z|", ri, 1e-10),
            Check::at_most("reference: sup |Re Z|", rr, 1e-10),
            Check::at_most("reference: |Calabi − c_γ²Vol|", (cal.value - bound).abs(), 1e-8),
        ])
    });
    Ok(report)
}

// ─── variations ────────────────────────────────────────────────────────────

fn variations(config: &RunConfig) -> Result<Report, LabError> {
    let mut ctx = context(config)?;
    let mut report = ctx.report("variations");
    let class = ctx.setup.class().clone();
    let h = 1e-4;
    let samples: Vec<[ComplexPotential; 3]> =
        (0..5).map(|_| [ctx.potential(1, 0.02), ctx.potential(2, 0.05), ctx.potential(1, 0.05)]).collect();
    collect(&mut report, "first variation", || {
        let (b, r) = (ctx.backend(), ctx.reference());
        let mut worst = 0.0f64;
        for [phi, psi, _] in &samples {
            let e = |t: f64| complexified_k_energy(b, &phi.axpy(t, psi), r, &class);
            let fd = (e(h)? - e(-h)?) / (2.0 * h);
            let sigma = first_variation(b, phi, psi, r, &class)?;
            worst = worst.max((sigma - fd).abs() / sigma.abs().max(1e-12));
        }
        Ok(vec![Check::at_most("|σ − central difference|/|σ|", worst, 1e-5)])
    });
    collect(&mut report, "closedness", || {
        let (b, r) = (ctx.backend(), ctx.reference());
        let sig = |base: &ComplexPotential, dir: &ComplexPotential| first_variation(b, base, dir, r, &class);
        let mut worst = 0.0f64;
        for [phi, p1, p2] in samples.iter().take(3) {
            let d21 = (sig(&phi.axpy(h, p2), p1)? - sig(&phi.axpy(-h, p2), p1)?) / (2.0 * h);
            let d12 = (sig(&phi.axpy(h, p1), p2)? - sig(&phi.axpy(-h, p1), p2)?) / (2.0 * h);
            worst = worst.max((d21 - d12).abs());
        }
        Ok(vec![Check::at_most("mixed-difference asymmetry of σ", worst, 1e-8)])
    });
    let dirs: Vec<ComplexPotential> = (0..10).map(|_| ctx.potential(3, 1.0)).collect();
    collect(&mut report, "second variation", || second_variation_at_reference(&ctx, &dirs));
    Ok(report)
}

/// The reference potential solves the system, so the second variation there
/// is nonnegative and vanishes on constants.
fn second_variation_at_reference(ctx: &Ctx, dirs: &[ComplexPotential]) -> Checks {
    let (b, r, class) = (ctx.backend(), ctx.reference(), ctx.setup.class());
    let zero = vec![C64::new(0.0, 0.0); b.len()];
    let mut lowest = f64::INFINITY;
    for d in dirs {
        lowest = lowest.min(second_variation_formula(b, &zero, &d.to_complex(), &zero, r, class)?);
    }
    let ones = vec![C64::new(1.0, 1.0); b.len()];
    let on_constants = second_variation_formula(b, &zero, &ones, &zero, r, class)?;
    Ok(vec![
        Check::at_least("min second variation at the reference", lowest, -1e-10),
        Check::at_most("|second variation| on constants", on_constants.abs(), 1e-10),
    ])
}

// ─── geodesics ─────────────────────────────────────────────────────────────

fn smooth_path(f: &[Vec<f64>], steps: usize) -> Result<PotentialPath, LabError> {
    let len = f[0].len();
    Ok(PotentialPath::from_fn(steps, |t| {
        let u = (0..len).map(|i| t * f[0][i] + t * t * f[1][i]).collect();
        let v = (0..len).map(|i| t * f[2][i] + (2.0 * t).sin() * f[3][i]).collect();
        ComplexPotential::new(u, v)
    })?)
}

fn geodesics(config: &RunConfig, artifacts: &Artifacts) -> Result<Report, LabError> {
    let mut ctx = context(config)?;
    let mut report = ctx.report("geodesics");
    let class = ctx.setup.class().clone();
    match &ctx.setup {
        Setup::Torus { .. } => {
            let fields: Vec<Vec<f64>> = (0..4).map(|_| ctx.field(2, 0.02)).collect();
            collect(&mut report, "second variation along a path", || {
                let fine = smooth_path(&fields, 32)?;
                artifacts.write("path.bin", |w| io::write_path(w, ctx.shape(), &fine))?;
                let sv = second_variation_along_path(ctx.backend(), &fine, ctx.reference(), &class, 16)?;
                Ok(vec![Check::at_most(
                    "|analytic − difference|/|analytic| of the second variation",
                    (sv.analytic - sv.finite_diff).abs() / sv.analytic.abs().max(1e-12),
                    1e-2,
                )])
            });
            collect(&mut report, "annulus", || {
                let b = ctx.backend();
                let mid = |steps: usize| -> Result<f64, LabError> {
                    let slices = annulus_residual(b, &smooth_path(&fields, steps)?, ctx.reference(), &class)?;
                    Ok(slices.iter().find(|s| (s.time - 0.5).abs() < 1e-12).map_or(f64::NAN, |s| s.identity_err))
                };
                let (ec, ef) = (mid(16)?, mid(32)?);
                let ratio = ec / ef;
                Ok(vec![
                    Check::at_least(format!("annulus mismatch {ec:.2e} → {ef:.2e}: ratio ≥"), ratio, 3.5),
                    Check::at_most("annulus ratio ≤", ratio, 4.5),
                ])
            });
        }
        Setup::Cp1 { grid, omega, bfield, .. } => {
            let k = bfield.density()[0] / omega.density()[0];
            let start = MomentumProfile::guillemin(32, 2.0 * omega.total(grid) / 2.0);
            collect(&mut report, "trivial geodesic", || {
                let times: Vec<f64> = (0..=16).map(|j| j as f64 / 16.0).collect();
                let path = cp1::trivial_geodesic_path(grid, &start, 0.8, bfield, &times)?;
                let res = residual_coupled(grid, &path, ctx.reference(), &class)?;
                let worst = res.iter().fold(0.0f64, |m, p| m.max(p.first).max(p.second));
                let d2 = convexity_probe(&path, |phi| complexified_k_energy(grid, phi, ctx.reference(), &class))?;
                artifacts.write("residuals.csv", |w| io::write_residuals(w, &res))?;
                artifacts.write("path.bin", |w| io::write_path(w, ctx.shape(), &path))?;
                Ok(vec![
                    Check::at_most("trivial geodesic: sup residual", worst, 1e-2),
                    Check::at_most("trivial geodesic: max |M̃ second difference|", sup(&d2), 1e-6),
                ])
            });
            if class.is_hypercritical() && k > 0.0 {
                collect(&mut report, "hypercritical path", || hypercritical_probe(grid, omega, k, ctx.reference(), &class));
            }
        }
    }
    Ok(report)
}

/// Affine symplectic-potential paths for `ω` and for `B`, checked for
/// convexity of `M̃` and for the pointwise hypercritical weight.
fn hypercritical_probe(
    grid: &Cp1Grid,
    omega: &InvariantForm,
    k: f64,
    reference: &Reference,
    class: &kenergy_core::class::ClassData,
) -> Checks {
    let scale = omega.total(grid);
    let profile = |s: f64, c: fn(f64) -> f64| MomentumProfile::with_correction(32, s, c);
    let (w0, w1) = (profile(scale, |x| 0.1 * x * x * x)?, profile(scale, |x| 0.05 * (1.0 - x * x).powi(2))?);
    let (b0, b1) = (profile(k * scale, |x| 0.08 * (1.0 - x * x) * x)?, profile(k * scale, |x| -0.1 * x * x)?);
    let steps = 8;
    let mut weight = f64::INFINITY;
    let mut samples = Vec::new();
    for j in 0..=steps {
        let t = j as f64 / steps as f64;
        let (wp, bp) = (MomentumProfile::interpolate(&w0, &w1, t)?, MomentumProfile::interpolate(&b0, &b1, t)?);
        let (w, b) = (wp.density(grid)?, bp.density(grid)?);
        let theta = phase_field(&grid.form(&w), &grid.form(&b));
        for i in 0..w.len() {
            let eta = theta[i] - class.theta_hat();
            weight = weight.min(eta.cos() + eta.sin() * w[i] / b[i]);
        }
        samples.push(ComplexPotential::new(bp.relative_kahler_potential(grid)?, wp.relative_kahler_potential(grid)?));
    }
    let path = PotentialPath::new((0..=steps).map(|j| j as f64 / steps as f64).collect(), samples)?;
    let d2 = convexity_probe(&path, |phi| complexified_k_energy(grid, phi, reference, class))?;
    Ok(vec![
        Check::at_least("hypercritical path: min M̃ second difference", d2.iter().copied().fold(f64::INFINITY, f64::min), -1e-6),
        Check::at_least("hypercritical path: min cos η + λ⁻¹ sin η", weight, -1e-12),
    ])
}

// ─── solvers ───────────────────────────────────────────────────────────────

/// Smallest odd size at or above `m`: even sizes leave Nyquist modes outside
/// the range of the spectral Laplacian and stall the Newton solve.
fn odd_size(m: usize) -> usize {
    m | 1
}

fn solvers(config: &RunConfig) -> Result<Report, LabError> {
    let mut ctx = context(config)?;
    let mut report = ctx.report("solvers");
    let class = ctx.setup.class().clone();
    let cfg = config.solver_config();
    match config.backend {
        BackendKind::TorusN1 => {
            // The explicit flow needs O(m²) steps; it runs on a grid of at most 16 points.
            let fm = config.m.min(16);
            let fgrid = TorusGrid::new(1, fm, Stencil::Spectral)?;
            let u0 = fgrid.sample_series(&TrigSeries::random(&mut ctx.rng, fgrid.axes(), 1, 0.05));
            collect(&mut report, "dhym flow", || {
                let (w, b0) = (fgrid.constant_form(ctx.reference().omega0()[0]), fgrid.constant_form(ctx.reference().b0()[0]));
                let flow = dhym_flow(&fgrid, &u0, &w, &b0, &class, &cfg)?;
                Ok(vec![
                    Check::at_most(format!("dHYM flow (m={fm}): final sup |Θ − θ̂|"), *flow.residual_history.last().unwrap_or(&f64::NAN), cfg.tol),
                    Check::at_most("dHYM flow: sup |u|", sup(&flow.u), 1e-6),
                ])
            });
            let v1 = ctx.field(1, 0.01);
            collect(&mut report, "epsilon geodesic", || {
                let grid = ctx.torus().expect("torus backend");
                let ecfg = SolverConfig { tol: cfg.tol.max(1e-12), max_iters: 50, ..cfg };
                let zero = vec![0.0; grid.len()];
                let out = geodesic_bvp_epsilon(grid, ctx.reference().omega0(), &zero, &v1, 8, &ecfg)?;
                Ok(vec![Check::at_most("ε-geodesic: final residual", *out.history.last().unwrap_or(&f64::NAN), ecfg.tol)])
            });
        }
        BackendKind::TorusN2 => {
            let m = odd_size(config.m);
            let chi_class = ctx.reference().b0()[0].scale_re(class.theta_hat().sin())
                - ctx.reference().omega0()[0].scale_re(class.theta_hat().cos());
            let checks = ma_checks(&mut ctx, m, &chi_class, &cfg);
            collect(&mut report, "Monge-Ampère", || checks);
        }
        BackendKind::Cp1 => {
            if let Setup::Cp1 { grid, omega, bfield, .. } = &ctx.setup {
                collect(&mut report, "fiber solution", || {
                    let sol = cp1::dhym_fiber_solution(omega, class.theta_hat())?;
                    let theta = phase_field(&omega.field(), &sol.field());
                    let total = (sol.total(grid) - bfield.total(grid)).abs();
                    Ok(vec![
                        Check::at_most("fiber solution: sup |Θ − θ̂|", sup(&theta.iter().map(|t| t - class.theta_hat()).collect::<Vec<_>>()), 1e-12),
                        Check::at_most("fiber solution: |class change|", total, 1e-10),
                    ])
                });
            }
        }
    }
    let start = ctx.potential(1, 0.01);
    collect(&mut report, "descent", || {
        let b = ctx.backend();
        let dcfg = SolverConfig { tol: 1e-6, step: 0.05, max_iters: 3000, ..cfg };
        let out = kenergy_descent(b, &start, ctx.reference(), &class, &dcfg)?;
        let monotone = out.energy_history.windows(2).filter(|w| w[1] >= w[0]).count();
        let (ri, rr) = system_residual(b, &out.phi, ctx.reference(), &class)?;
        Ok(vec![
            Check::at_most("descent: non-decreasing energy steps", monotone as f64, 0.0),
            Check::at_most("descent: final system residual", ri.max(rr), 1e-6),
        ])
    });
    Ok(report)
}

/// Solves `χ_v² = ω²` for a seeded `ω = ω₀ + i∂∂̄f` on a grid of odd size `m`.
fn ma_checks(ctx: &mut Ctx, m: usize, chi_class: &Mat, cfg: &SolverConfig) -> Checks {
    let grid = TorusGrid::new(2, m, Stencil::Spectral)?;
    let f = grid.sample_series(&TrigSeries::random(&mut ctx.rng, grid.axes(), 2, 0.02));
    let omega = geometry::assemble_form(&grid, &grid.constant_form(ctx.reference().omega0()[0]), &f);
    let mcfg = SolverConfig { tol: 1e-10, max_iters: 50, ..*cfg };
    let sol = ma_solve_surface(&grid, &omega, chi_class, &mcfg)?;
    let chi = geometry::assemble_form(&grid, &grid.constant_form(*chi_class), &sol.v);
    let residual = chi.iter().zip(&omega).fold(0.0f64, |a, (c, w)| a.max((c.det().re / w.det().re).ln().abs()));
    let (vc, vw) = (geometry::volume(&grid, &chi), geometry::volume(&grid, &omega));
    Ok(vec![
        Check::at_most(format!("Monge-Ampère (m={m}): sup |log det χ_v/det ω|"), residual, 1e-7),
        Check::at_most("Monge-Ampère: relative volume change", (vc - vw).abs() / vw, 1e-10),
    ])
}

// ─── surface ───────────────────────────────────────────────────────────────

fn surface(config: &RunConfig) -> Result<Report, LabError> {
    require(config, &[BackendKind::TorusN2], "the surface suite")?;
    let mut ctx = context(config)?;
    let mut report = ctx.report("surface");
    let class = ctx.setup.class().clone();
    let dirs: Vec<Vec<f64>> = (0..8).map(|_| ctx.field(3, 1.0)).collect();
    let ma = match surface_constants(&class) {
        Ok(sc) => ma_checks(&mut ctx, odd_size(config.m), &sc.chi_class, &config.solver_config()),
        Err(e) => Err(e.into()),
    };
    collect(&mut report, "surface pair", || {
        let grid = ctx.torus().expect("torus backend");
        surface_constants(&class)?;
        let zero = vec![0.0; grid.len()];
        let pair = SurfacePair::from_class(grid, &class, zero.clone(), zero)?;
        let res = surface_residuals(grid, &pair)?;
        let (mut defect, mut lowest) = (0.0f64, f64::INFINITY);
        for d in dirs.chunks(4) {
            let qx = hessian_q_apply(grid, &pair, &d[0], &d[1])?;
            let qy = hessian_q_apply(grid, &pair, &d[2], &d[3])?;
            let lhs = l2_pairing(grid, &pair, (&qx.0, &qx.1), (&d[2], &d[3]))?;
            let rhs = l2_pairing(grid, &pair, (&d[0], &d[1]), (&qy.0, &qy.1))?;
            defect = defect.max((lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0));
            lowest = lowest.min(l2_pairing(grid, &pair, (&qx.0, &qx.1), (&d[0], &d[1]))?);
        }
        let scan = hessian_eigen_scan(grid, &pair, 40, ctx.config.seed)?;
        Ok(vec![
            Check::at_most("reference pair: sup residual", res.sup(), 1e-10),
            Check::at_most("Q: relative self-adjointness defect", defect, 1e-8),
            Check::at_least("Q: min ⟨Qx, x⟩", lowest, -1e-10),
            Check::at_most("Q: constant defect", scan.constant_defect, 1e-9),
            Check::at_least("Q: lowest Ritz value off constants", scan.min(), 1e-6),
        ])
    });
    collect(&mut report, "Monge-Ampère", || ma);
    Ok(report)
}

// ─── futaki ────────────────────────────────────────────────────────────────

fn futaki(config: &RunConfig) -> Result<Report, LabError> {
    require(config, &[BackendKind::Cp1], "the futaki suite")?;
    let mut ctx = context(config)?;
    let mut report = ctx.report("futaki");
    let class = ctx.setup.class().clone();
    let bumps: Vec<[f64; 3]> = (0..3).map(|_| [0.0; 3].map(|_| ctx.rng.uniform(-0.05, 0.05))).collect();
    if let Setup::Cp1 { grid, omega, bfield, .. } = &ctx.setup {
        collect(&mut report, "futaki", || {
            let one = C64::new(1.0, 0.0);
            let at_ref = cp1::futaki_invariant(grid, omega, bfield, &class, one)?;
            let (p, q) = cp1::holomorphy_potential(grid, omega, bfield, 1.0);
            let (r1, r2) = cp1::kernel_residuals(grid, omega, bfield, &p, &q);
            let k = bfield.total(grid) / omega.total(grid);
            let mut spread = 0.0f64;
            let mut first = None;
            for c in bumps.iter().copied() {
                let w = MomentumProfile::with_correction(32, omega.total(grid), move |x| c[0] * x * x * x + c[1] * (1.0 - x * x).powi(2))?
                    .form(grid)?;
                // A total derivative vanishing at both poles keeps the class of B.
                let b: Vec<f64> = grid
                    .nodes()
                    .iter()
                    .zip(w.density())
                    .map(|(xi, wd)| k * wd + c[2] * (1.0 - 3.0 * xi * xi))
                    .collect();
                let bf = InvariantForm::new(b);
                let cd = cp1::class_data(grid, &w, &bf, config.gamma_abs)?;
                let cd = match config.theta_hat {
                    Some(t) => cd.with_theta_hat(t)?,
                    None => cd,
                };
                let value = cp1::futaki_invariant(grid, &w, &bf, &cd, one)?;
                let base = *first.get_or_insert(value);
                spread = spread.max((value - base).norm());
            }
            Ok(vec![
                Check::at_most("Futaki invariant at the reference", at_ref.norm(), 1e-8),
                Check::at_most("Futaki spread over representatives", spread, 1e-6),
                Check::at_most("holomorphy potential: kernel residuals", r1.max(r2), 1e-8),
            ])
        });
    }
    Ok(report)
}

// ─── commands ──────────────────────────────────────────────────────────────

/// `dhym`: the flow on the torus, the fiberwise solution on the projective line.
pub fn run_dhym(config: &RunConfig, artifacts: &Artifacts) -> Result<Report, LabError> {
    let mut ctx = context(config)?;
    let mut report = ctx.report("dhym");
    let class = ctx.setup.class().clone();
    let cfg = config.solver_config();
    match &ctx.setup {
        Setup::Torus { .. } => {
            let u0 = ctx.field(1, 0.05);
            let b = ctx.backend();
            match dhym_flow(b, &u0, ctx.reference().omega0(), ctx.reference().b0(), &class, &cfg) {
                Ok(flow) => {
                    artifacts.write("history.csv", |w| io::write_history(w, &flow.residual_history))?;
                    artifacts.write("field.bin", |w| io::write_field(w, ctx.shape(), &flow.u))?;
                    report.push(Check::at_most("final sup |Θ − θ̂|", *flow.residual_history.last().unwrap_or(&f64::NAN), cfg.tol));
                    report.push(Check::at_most("iterations", flow.iterations as f64, cfg.max_iters as f64));
                    report.push(Check::at_least("calibrated", f64::from(u8::from(flow.calibrated)), 1.0));
                }
                Err(e) => report.push(Check::failed(format!("dhym flow: {e}"))),
            }
        }
        Setup::Cp1 { grid, omega, .. } => match cp1::dhym_fiber_solution(omega, class.theta_hat()) {
            Ok(sol) => {
                let theta = phase_field(&omega.field(), &sol.field());
                let s = geometry::scalar_curvature(grid, &omega.field()).map_err(LabError::Core)?;
                let rows: Vec<ProfileRow> = (0..grid.len())
                    .map(|i| ProfileRow { x: grid.nodes()[i], w: omega.density()[i], b: sol.density()[i], s: s[i], theta: theta[i] })
                    .collect();
                artifacts.write("profiles.csv", |w| io::write_profiles(w, &rows))?;
                let err = theta.iter().fold(0.0f64, |m, t| m.max((t - class.theta_hat()).abs()));
                report.push(Check::at_most("sup |Θ − θ̂|", err, cfg.tol));
            }
            Err(e) => report.push(Check::failed(format!("fiber solution: {e}"))),
        },
    }
    Ok(report)
}

/// `geodesic`: the ε-regularized boundary value problem on the one-dimensional
/// torus, the trivial geodesics and hypercritical paths on the projective line.
pub fn run_geodesic(config: &RunConfig, artifacts: &Artifacts) -> Result<Report, LabError> {
    require(config, &[BackendKind::TorusN1, BackendKind::Cp1], "the geodesic command")?;
    if config.backend == BackendKind::Cp1 {
        let mut report = geodesics(config, artifacts)?;
        report.suite = "geodesic".into();
        return Ok(report);
    }
    let mut ctx = context(config)?;
    let mut report = ctx.report("geodesic");
    let cfg = config.solver_config();
    let v1 = ctx.field(1, 0.01);
    let grid = ctx.torus().expect("torus backend");
    let zero = vec![0.0; grid.len()];
    let ecfg = SolverConfig { max_iters: cfg.max_iters.min(100), ..cfg };
    match geodesic_bvp_epsilon(grid, ctx.reference().omega0(), &zero, &v1, 16, &ecfg) {
        Ok(out) => {
            artifacts.write("history.csv", |w| io::write_history(w, &out.history))?;
            artifacts.write("path.bin", |w| io::write_path(w, ctx.shape(), &out.path))?;
            report.push(Check::at_most("ε-equation residual", *out.history.last().unwrap_or(&f64::NAN), ecfg.tol));
            report.push(Check::at_most("Newton steps", out.history.len() as f64, ecfg.max_iters as f64));
        }
        Err(e) => report.push(Check::failed(format!("ε-geodesic: {e}"))),
    }
    Ok(report)
}

/// `kenergy`: functional table on seeded potentials, then a descent run.
pub fn run_kenergy(config: &RunConfig, artifacts: &Artifacts) -> Result<Report, LabError> {
    let mut ctx = context(config)?;
    let mut report = ctx.report("kenergy");
    let class = ctx.setup.class().clone();
    let batch: Vec<ComplexPotential> = (0..8).map(|_| ctx.potential(2, 0.02)).collect();
    let start = ctx.potential(1, 0.01);
    let b = ctx.backend();
    match evaluate_batch(b, &batch, ctx.reference(), &class) {
        Ok(rows) => {
            artifacts.write("functionals.csv", |w| io::write_functionals(w, &rows))?;
            let finite = rows.iter().all(|r| r.k_energy.is_finite() && r.calabi.is_finite());
            report.push(Check::at_least("finite functional rows", f64::from(u8::from(finite)), 1.0));
        }
        Err(e) => report.push(Check::failed(format!("batch: {e}"))),
    }
    let dcfg = SolverConfig { tol: config.tol.max(1e-6), step: 0.05, max_iters: config.solver.max_iters.min(3000), ..config.solver_config() };
    match kenergy_descent(b, &start, ctx.reference(), &class, &dcfg) {
        Ok(out) => {
            artifacts.write("history.csv", |w| io::write_history(w, &out.energy_history))?;
            report.push(Check::at_most("descent: final system residual", *out.residual_history.last().unwrap_or(&f64::NAN), dcfg.tol));
        }
        Err(e) => report.push(Check::failed(format!("descent: {e}"))),
    }
    Ok(report)
}

pub fn run_futaki(config: &RunConfig) -> Result<Report, LabError> {
    futaki(config)
}

pub fn run_surface(config: &RunConfig) -> Result<Report, LabError> {
    surface(config)
}

/// `stability`: the top-dimensional class inequality and nonnegativity of the
/// second variation at the reference.
pub fn run_stability(config: &RunConfig) -> Result<Report, LabError> {
    let mut ctx = context(config)?;
    let mut report = ctx.report("stability");
    let class = ctx.setup.class().clone();
    if let Some((alpha, beta)) = class.representatives() {
        // For n = 1 the only inequality does not involve χ, which vanishes
        // identically at the reference; α stands in as a positive class.
        let (s, c) = class.theta_hat().sin_cos();
        let chi = if class.dim() == 1 { alpha } else { beta.scale_re(s) - alpha.scale_re(c) };
        match stability_check_top(&class, &chi) {
            Ok(st) => {
                for (p, v) in st.inequalities.iter().enumerate() {
                    report.push(Check::at_most(format!("Im(e^{{−iθ̂}}(α^ℂ)^{}.χ^{})", p + 1, st.inequalities.len() - p - 1), *v, 1e-10));
                }
            }
            Err(e) => report.push(Check::failed(format!("class inequality: {e}"))),
        }
    }
    let dirs: Vec<ComplexPotential> = (0..10).map(|_| ctx.potential(3, 1.0)).collect();
    collect(&mut report, "second variation", || second_variation_at_reference(&ctx, &dirs));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_parse() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!(matches!("nonsense".parse::<Suite>(), Err(LabError::Config { location, .. }) if location == "suite"));
    }

    #[test]
    fn backend_restrictions_are_config_errors() {
        let cfg = RunConfig::for_backend(BackendKind::TorusN1);
        assert!(matches!(run_suite(&cfg, Suite::Surface), Err(LabError::Config { .. })));
        assert!(matches!(run_suite(&cfg, Suite::Futaki), Err(LabError::Config { .. })));
    }
}
