//! Discrete resistance curvature on graphs.
//!
//! Exact rational arithmetic is the default everywhere a yes/no answer or a
//! certificate is produced; `f64` is used for iterative fitting and for
//! cheap numeric previews.

pub mod enumerate;
pub mod capacity;
pub mod corpus;
pub mod decide;
pub mod error;
pub mod fitting;
pub mod graph;
pub mod lp;
pub mod matrix;
pub mod polytope;
pub mod resistance;
pub mod scalar;
pub mod transforms;

pub use error::{Error, Result};
pub use graph::Graph;
pub use scalar::{Rational, Scalar};
