//! Z2-graded polynomial algebra over truncated hbar-series.

mod chart;
pub mod laws;
mod parity;
mod parse;
mod poly;
mod scalar;

pub use chart::{antifiber_name, momentum_name, tangent_name, Chart, ChartBuilder, Families, Generator, Role};
pub use parity::Parity;
pub use parse::parse_poly;
pub use poly::{Monomial, SuperPoly};
pub use scalar::{coeff, i_power, imaginary_unit, rational, Coeff, Scalar, Truncation};
