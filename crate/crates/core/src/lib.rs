//! Exact symbolic computation for nonlocal vertex algebras, their
//! differential bialgebras and smash products, with truncated Laurent series
//! that certify which coefficients are exact.

pub mod diff_bialgebra;
pub mod error;
pub mod fock;
pub mod lattice;
pub mod module_va;
pub mod linalg;
pub mod scalar;
pub mod pseudo;
pub mod report;
pub mod series;
pub mod smash;
pub mod suites;
pub mod tensor;
pub mod vertex;

pub use error::{Error, Result};
pub use scalar::Scalar;
pub use series::{Series, Vector, Window};
