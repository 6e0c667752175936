//! Verification workbench for biharmonic and f-biharmonic rotationally
//! symmetric maps between surfaces of revolution.

pub mod catalog;
pub mod dsl;
pub mod error;
pub mod geometry;
pub mod jet;
pub mod ode;
pub mod oracle;
pub mod profile;
pub mod quad;
pub mod report;

pub use error::{Error, Result};
