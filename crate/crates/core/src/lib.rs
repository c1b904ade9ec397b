//! Numerical laboratory for Kähler metrics whose scalar curvature is coupled to a B-field.
//!
//! The crate is `no_std` (with `alloc`) so that the algorithmic core can be
//! embedded anywhere; file formats, reports and the command line front end
//! live in the `kenergy-lab` companion crate.
//!
//! Layout:
//!
//! * [`pointwise`]: relative spectrum of a pair `(ω, B)`, Lagrangian phase and
//!   radius, calibration predicates and the closed-form convexity summands.
//! * [`class`]: constant-coefficient intersection numbers, lifted phase and the
//!   coupling constants of a complexified class.
//! * [`geometry`], [`torus`], [`cp1`]: discretized backends (flat complex torus,
//!   S¹-invariant data on the projective line).
//! * [`functionals`]: entropy, energies, complexified K-energy and its first
//!   variation, Calabi and volume functionals.
//! * [`surface`]: the complex-surface reformulation and its Hessian operator.
//! * [`geodesics`]: paths, second variation, geodesic residuals, annulus lift.
//! * [`solvers`]: dHYM flow, Monge–Ampère solve, ε-geodesics, K-energy descent.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod class;
pub mod cp1;
pub mod error;
pub mod functionals;
pub mod geodesics;
pub mod geometry;
pub mod linalg;
pub mod pointwise;
pub mod random;
pub mod solvers;
pub mod spectral;
pub mod surface;
pub mod torus;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub(crate) mod prelude {
    pub use alloc::vec;
    pub use alloc::vec::Vec;
    pub use core::f64::consts::PI;
    #[cfg(not(feature = "std"))]
    pub use num_traits::Float;
    pub use num_complex::Complex64 as C64;
}
