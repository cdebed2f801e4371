//! Bayesian lower bounds for multiparameter quantum estimation.
//!
//! Computes, from a parametric family of density matrices, a discretized
//! prior and a weight matrix, the hierarchy of Bayesian lower bounds on the
//! weighted mean-square-error: the direct bound, the
//! λ-logarithmic-derivative family, the Holevo-type SDP family and the
//! Nagaoka-Hayashi type SDP bound, together with the classical Bayes-optimal
//! risk of a fixed measurement as an achievability reference.

extern crate openblas_src;

pub mod bound;
pub mod catalog;
pub mod checks;
pub mod closed;
pub mod config;
pub mod error;
pub mod linalg;
pub mod maps;
pub mod model;
pub mod oracle;
pub mod quadrature;
pub mod report;
pub mod sdp;

pub use bound::{BoundValue, SolverInfo};
pub use catalog::{catalog, Scenario};
pub use error::{Error, Result};
pub use linalg::{BlockOperator, ComplexMatrix, DensityMatrix, HermitianMatrix, OperatorVector, RealMatrix, C64};
pub use model::{
    compute_averages, AveragedQuantities, ModelSpec, PriorDensity, PriorNode, PriorNodeSet, QuadraturePrior,
    WeightSpec,
};
pub use oracle::{ClassicalModelView, EstimatorTable, Povm};
pub use quadrature::QuadratureRule;
pub use report::{BoundKind, BoundReport, RunPlan, SweepAxis};
pub use sdp::{ClarabelBackend, SolveStatus, SolverBackend};
