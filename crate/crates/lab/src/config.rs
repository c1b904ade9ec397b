//! Run configuration shared by the command line and the JSON `--config` file.
//!
//! Class matrices are given row-major as real parts with optional imaginary
//! parts. On the projective line both are `1×1`: `alpha = [s]` and
//! `beta = [t]` mean `ω = s·ω_FS` and `B = t·ω_FS`.

use std::path::{Path, PathBuf};

use kenergy_core::class::{class_constants, ClassData};
use kenergy_core::cp1::{self, Cp1Grid, InvariantForm, MomentumProfile};
use kenergy_core::functionals::Reference;
use kenergy_core::linalg::Mat;
use kenergy_core::solvers::SolverConfig;
use kenergy_core::spectral::Stencil;
use kenergy_core::torus::TorusGrid;
use kenergy_core::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::{Format, LabError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum BackendKind {
    TorusN1,
    TorusN2,
    Cp1,
}

impl BackendKind {
    pub fn dim(self) -> usize {
        match self {
            BackendKind::TorusN1 | BackendKind::Cp1 => 1,
            BackendKind::TorusN2 => 2,
        }
    }

    /// Supported grid sizes (points per axis, or nodes on the projective line).
    pub fn grid_range(self) -> (usize, usize) {
        match self {
            BackendKind::TorusN1 => (8, 256),
            BackendKind::TorusN2 => (4, 24),
            BackendKind::Cp1 => (8, 256),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BackendKind::TorusN1 => "torus-n1",
            BackendKind::TorusN2 => "torus-n2",
            BackendKind::Cp1 => "cp1",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixSpec {
    pub re: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub im: Vec<f64>,
}

impl MatrixSpec {
    pub fn real(re: Vec<f64>) -> Self {
        MatrixSpec { re, im: Vec::new() }
    }

    fn to_mat(&self, n: usize, location: &str) -> Result<Mat, LabError> {
        if self.re.len() != n * n {
            return Err(LabError::config(format!("{location}.re"), format!("expected {} entries, got {}", n * n, self.re.len())));
        }
        if !self.im.is_empty() && self.im.len() != n * n {
            return Err(LabError::config(format!("{location}.im"), format!("expected {} entries, got {}", n * n, self.im.len())));
        }
        let entries: Vec<C64> =
            (0..n * n).map(|k| C64::new(self.re[k], self.im.get(k).copied().unwrap_or(0.0))).collect();
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LabError::config(location, "entries must be finite"));
        }
        let m = Mat::from_rows(n, &entries);
        let skew = m.hermitian_defect();
        if skew > 1e-12 * (1.0 + m.max_abs()) {
            return Err(LabError::config(location, format!("matrix is not Hermitian (defect {skew:.3e})")));
        }
        Ok(m)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverSettings {
    pub max_iters: usize,
    pub step: f64,
    pub damping: f64,
    pub epsilon: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        let d = SolverConfig::default();
        SolverSettings { max_iters: d.max_iters, step: d.step, damping: d.damping, epsilon: 0.05 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub backend: BackendKind,
    /// Points per axis on the torus, Chebyshev nodes on the projective line.
    pub m: usize,
    pub alpha: MatrixSpec,
    pub beta: MatrixSpec,
    pub gamma_abs: f64,
    /// Overrides the principal lift of `arg((β+iα)ⁿ/αⁿ)`; must lie in `(0, nπ)`.
    pub theta_hat: Option<f64>,
    pub seed: u64,
    pub tol: f64,
    pub solver: SolverSettings,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            backend: BackendKind::TorusN1,
            m: 16,
            alpha: MatrixSpec::real(vec![1.0]),
            beta: MatrixSpec::real(vec![0.7]),
            gamma_abs: 0.9,
            theta_hat: None,
            seed: 7,
            tol: 1e-8,
            solver: SolverSettings::default(),
            out: None,
            format: Format::Csv,
        }
    }
}

/// Backend-specific data built from a validated configuration.
pub enum Setup {
    Torus { grid: TorusGrid, reference: Reference, class: ClassData },
    Cp1 { grid: Cp1Grid, omega: InvariantForm, bfield: InvariantForm, reference: Reference, class: ClassData },
}

impl Setup {
    pub fn class(&self) -> &ClassData {
        match self {
            Setup::Torus { class, .. } | Setup::Cp1 { class, .. } => class,
        }
    }
}

impl RunConfig {
    /// Default class matrices for a backend: the ones used throughout the test suites.
    pub fn for_backend(backend: BackendKind) -> Self {
        let (alpha, beta, m) = match backend {
            BackendKind::TorusN1 => (vec![1.0], vec![0.7], 16),
            BackendKind::TorusN2 => (vec![1.2, 0.1, 0.1, 0.9], vec![0.5, -0.2, -0.2, 0.8], 8),
            BackendKind::Cp1 => (vec![1.0], vec![0.5], 48),
        };
        RunConfig { backend, m, alpha: MatrixSpec::real(alpha), beta: MatrixSpec::real(beta), ..Default::default() }
    }

    pub fn from_json(text: &str) -> Result<Self, LabError> {
        serde_json::from_str(text).map_err(|e| LabError::config(format!("line {} column {}", e.line(), e.column()), e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text).map_err(|e| match e {
            LabError::Config { location, message } => LabError::config(format!("{}: {location}", path.display()), message),
            other => other,
        })
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            max_iters: self.solver.max_iters,
            tol: self.tol,
            step: self.solver.step,
            damping: self.solver.damping,
            epsilon: self.solver.epsilon,
        }
    }

    /// Checks ranges and shapes; the returned error names the offending field.
    pub fn validate(&self) -> Result<(), LabError> {
        let (lo, hi) = self.backend.grid_range();
        if self.m < lo || self.m > hi {
            return Err(LabError::config("m", format!("{} supports {lo}..={hi}, got {}", self.backend.name(), self.m)));
        }
        let n = self.backend.dim();
        let alpha = self.alpha.to_mat(n, "alpha")?;
        self.beta.to_mat(n, "beta")?;
        if !alpha.is_positive_definite() {
            return Err(LabError::config("alpha", "class matrix must be positive definite"));
        }
        if !(self.gamma_abs > 0.0 && self.gamma_abs.is_finite()) {
            return Err(LabError::config("gamma_abs", "must be positive and finite"));
        }
        if let Some(t) = self.theta_hat {
            if !(t > 0.0 && t < n as f64 * core::f64::consts::PI) {
                return Err(LabError::config("theta_hat", format!("lift must lie in (0, {n}π)")));
            }
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(LabError::config("tol", "must be positive and finite"));
        }
        self.solver_config().validate().map_err(|e| LabError::config("solver", e.to_string()))?;
        Ok(())
    }

    pub fn setup(&self) -> Result<Setup, LabError> {
        self.validate()?;
        let n = self.backend.dim();
        let alpha = self.alpha.to_mat(n, "alpha")?;
        let beta = self.beta.to_mat(n, "beta")?;
        let lift = |class: ClassData| -> Result<ClassData, LabError> {
            match self.theta_hat {
                Some(t) => class.with_theta_hat(t).map_err(|e| LabError::config("theta_hat", e.to_string())),
                None => Ok(class),
            }
        };
        match self.backend {
            BackendKind::TorusN1 | BackendKind::TorusN2 => {
                let grid = TorusGrid::new(n, self.m, Stencil::Spectral)?;
                let reference = Reference::constant(&grid, alpha, beta)?;
                let class = lift(class_constants(&alpha, &beta, self.gamma_abs, None)?)?;
                Ok(Setup::Torus { grid, reference, class })
            }
            BackendKind::Cp1 => {
                let grid = Cp1Grid::new(self.m)?;
                let fs = MomentumProfile::guillemin(32, 2.0).form(&grid)?;
                let omega = fs.scaled(alpha[(0, 0)].re);
                let bfield = fs.scaled(beta[(0, 0)].re);
                let reference = Reference::new(&grid, omega.field(), bfield.field())?;
                let class = lift(cp1::class_data(&grid, &omega, &bfield, self.gamma_abs)?)?;
                Ok(Setup::Cp1 { grid, omega, bfield, reference, class })
            }
        }
    }
}
