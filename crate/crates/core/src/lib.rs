//! Numerical radius of dense complex matrices.
//!
//! [`numerical_radius`] maximizes the top eigenvalue of the rotated Hermitian
//! part `Re(e^{i theta} M)` over the circle and returns the value together
//! with a certified error bound. [`bounds`] evaluates a family of upper
//! bounds on `w(M)` built from powers, adjoints and absolute values of `M`;
//! [`vecineq`] checks the underlying inner-product inequalities on concrete
//! vectors; [`harness`] fuzzes all of them over seeded random ensembles.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod harness;
pub mod matrix;
pub mod radius;
pub mod spectral;
pub mod vecineq;

pub use bounds::{full_report, BoundContext, BoundEstimate, BoundReport, ReportConfig};
pub use error::{Error, ParseErrorKind, Result};
pub use harness::{
    random_matrix, random_unit_vector, run_property_suite, sharpness_study, EnsembleConfig,
    EnsembleStats, MatrixKind,
};
pub use matrix::{inner, Complex, Matrix, Vector};
pub use radius::{numerical_radius, numerical_radius_with, SweepOptions, SweepResult};
pub use spectral::{abs_op, hermitian_eig, lambda_max, operator_norm, HermitianEigen};
