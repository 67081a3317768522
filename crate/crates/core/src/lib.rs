//! Symbolic checks for quantum stochastic differential equations with
//! polynomial coefficients in boson creation and annihilation operators.

pub mod algebra;
pub mod checks;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod matrix;
pub mod model;
pub mod scalar;

pub use algebra::{normal_order, Algebra, Generator, Monomial, OperatorPolynomial, RewriteStrategy};
pub use checks::{run_checks, CheckKind, CheckOptions, CheckReport, Condition};
pub use error::{Error, Result};
pub use linalg::ScalarMatrix;
pub use matrix::OperatorMatrix;
pub use model::{parse_model, parse_polynomial, render_model, DoubledModel, NoiseSpec, ParseError, ParseOptions, QsdeModel};
pub use scalar::{Mode, Scalar, DEFAULT_TOL};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/algebra.md")]
    mod algebra {}
    #[doc = include_str!("../../../book/src/models.md")]
    mod models {}
    #[doc = include_str!("../../../book/src/class.md")]
    mod class {}
    #[doc = include_str!("../../../book/src/realizability.md")]
    mod realizability {}
    #[doc = include_str!("../../../book/src/storage.md")]
    mod storage {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
