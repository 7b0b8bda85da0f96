//! Sparse-resultant polynomial solvers built with the extra-equation
//! construction: append `x_i − λ`, find a favourable monomial basis, reduce
//! the coefficient matrix and solve a small standard eigenproblem online.

pub mod artifact;
pub mod bench;
pub mod error;
pub mod fixtures;
pub mod gep;
mod lp;
mod modp;
pub mod oracle;
pub mod poly;
pub mod polytope;
pub mod solver;
pub mod template;
pub mod verify;

pub use artifact::{generate, TemplateFile};
pub use error::{Error, Result};
pub use poly::{Monomial, NumPolynomial, PolySystem};
pub use solver::{solve, SolutionSet, SolverTemplate};
pub use template::{search, SearchConfig};
