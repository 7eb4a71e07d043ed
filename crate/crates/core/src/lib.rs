//! Sub-Riemannian geodesics on nested principal bundles over `Sp(2)`.

pub mod bundle;
pub mod cli;
pub mod error;
pub mod geodesics;
pub mod hamilton;
pub mod lie;
pub mod linalg;
pub mod quat;
pub mod report;
pub mod sample;
pub mod suites;

pub use error::{Error, Result};
