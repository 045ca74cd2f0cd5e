//! Type-B elliptic dynamical R-matrix, face weights, boson modes, vertex-operator
//! exchange scalars and the vector representation, with numerical identity checks.

pub mod error;
pub mod exchange_engine;
pub mod exec;
pub mod face_checks;
pub mod mode_algebra;
pub mod report;
pub mod rmatrix;
pub mod sampling;
pub mod special_functions;
pub mod suites;
pub mod vector_rep;

pub use error::{EbqError, Result};
pub use special_functions::{c, AlgebraParams, TruncationPolicy, C};
