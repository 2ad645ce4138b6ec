//! Bulk and boundary invariants of chiral, inversion-symmetric lattice
//! symbols: Wiener-Hopf extensions, parity indicators, corner indices,
//! hinge spectral flows and a small K-theory ledger.

pub mod boundary;
pub mod bulk;
pub mod config;
pub mod error;
pub mod ktheory;
pub mod laurent;
pub mod linalg;
pub mod model;
pub mod report;
pub mod wienerhopf;

pub use config::Config;
pub use error::{Error, Patch, Result};
pub use laurent::{Family3D, LaurentMatrix, SymmetryData};
