pub mod admissibility;
pub mod catalog;
pub mod cli;
pub mod cmath;
pub mod error;
pub mod io;
pub mod jet;
pub mod perron;
pub mod quadrature;
pub mod saddlepoint;
pub mod series;
pub mod zeta;

pub use error::{Error, Result};
