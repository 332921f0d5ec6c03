//! Certified perturbation bounds and the experiment suites.
//!
//! Bounds asserted here are assembled only from explicit constants: the
//! Haagerup bound `√3·σ·‖f‖∞` for each dyadic piece, the exact difference
//! and quasicommutator formulas, and elementary norm inequalities. Every
//! other constant is measured and reported as metadata.

mod certified;
mod convex;
mod experiments;
mod report;

pub use certified::{certified_lipschitz_constant, certified_modulus_bound, PieceBounds};
pub use convex::{extend_by_projection, project_convex, ConvexBody};
pub use experiments::*;
pub use report::{float_json, Check, ExperimentReport, PlotSpec};
