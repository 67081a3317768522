use thiserror::Error;

use crate::model::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mode index {index} out of range for an algebra with {modes} modes")]
    ModeOutOfRange { index: usize, modes: usize },

    #[error("operands belong to different algebras")]
    AlgebraMismatch,

    #[error("commutation matrix must be {modes}x{modes}, got {rows}x{cols}")]
    ThetaShape { modes: usize, rows: usize, cols: usize },

    #[error("commutation matrix is not Hermitian")]
    ThetaNotHermitian,

    #[error("commutation matrix is singular")]
    SingularTheta,

    #[error("shape mismatch in {op}: {left:?} vs {right:?}")]
    Shape { op: &'static str, left: (usize, usize), right: (usize, usize) },

    #[error("drift vector A is identically zero; the degree bound n-bar is undefined")]
    ZeroDrift,

    #[error("operator is not self-adjoint")]
    NotSelfAdjoint,

    #[error("Fock oracle: {0}")]
    Oracle(String),

    #[error(transparent)]
    Parse(#[from] ParseError),
}
