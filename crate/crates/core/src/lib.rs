//! Restarted primal-dual hybrid gradient for standard-form linear programs,
//! with exact certification tools for totally unimodular instances.

pub mod certify;
pub mod dense;
pub mod error;
pub mod exact;
pub mod gap;
pub mod harness;
pub mod io;
pub mod lp_model;
pub mod pdhg;
pub mod sparse;
pub mod tu;

pub use error::{Error, Result};
pub use lp_model::{PrimalDualPoint, StandardFormLP};
pub use sparse::SparseMatrix;
