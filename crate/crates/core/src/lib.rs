//! Finite-dimensional perturbation calculus for functions of normal matrices.
//!
//! The crate is organised bottom-up:
//!
//! * [`bandlimited`]: trigonometric polynomials on the plane, the dyadic
//!   Littlewood–Paley split, certified sup-norm brackets and Hölder-type
//!   seminorms.
//! * [`spectral`]: normal-matrix generation, simultaneous diagonalization of
//!   the commuting real/imaginary parts, and the functional calculus.
//! * [`doi`]: double operator integrals as Hadamard multipliers in eigenbases,
//!   divided-difference kernels and multiplier-norm brackets.
//! * [`sinc`]: the sinc-basis expansion of divided differences and the
//!   explicit Haagerup factorizations built from it.
//! * [`ideals`]: singular-value functionals of quasinormed ideals.
//! * [`perturbation`]: certified Lipschitz/modulus bounds and the experiment
//!   suites.
//! * [`runner`]: configuration, dispatch and CSV/JSON/SVG rendering used by
//!   the `opcalc` binary.

pub mod bandlimited;
pub mod doi;
pub mod error;
pub mod exec;
pub mod ideals;
pub mod linalg;
pub mod perturbation;
pub mod quad;
pub mod runner;
pub mod sinc;
pub mod spectral;

pub use error::{Error, Result};
pub use exec::Execution;
pub use linalg::CMatrix;
pub use num_complex::Complex64;
