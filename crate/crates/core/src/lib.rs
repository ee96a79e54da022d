//! Exact computer algebra for homotopy Poisson structures, higher Koszul brackets,
//! formal hbar-differential operators and their quantum Mackenzie-Xu transforms.

pub mod brackets;
pub mod corpus;
pub mod error;
pub mod hbarops;
pub mod linfty;
pub mod mx;
pub mod report;
pub mod superalg;
pub mod thick;

pub use error::{Error, Result};
