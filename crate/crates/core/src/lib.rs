//! Exact computation with L∞ codifferentials on graded symmetric coalgebras.

pub mod linalg;
pub mod scalars;
pub mod space;
pub mod coder;
pub mod cohomology;
pub mod deformation;
pub mod moduli;
