use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("negative discriminant {0}: no real eigenvalue branch")]
    NegativeDiscriminant(f64),

    #[error("no branch yields a decaying, origin-integrable wavefunction")]
    NotNormalizable,

    #[error("norm integral not converged on grid: tail {tail:e} of total {total:e}")]
    DivergentNorm { tail: f64, total: f64 },

    #[error("grid too coarse: ground-state estimates {fine} and {coarse} disagree")]
    GridTooCoarse { fine: f64, coarse: f64 },

    #[error("matching function has no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("Morse specialization requires alpha = -1, got {0}")]
    WrongAlpha(f64),

    #[error("degenerate coefficient: {0} has a vanishing denominator")]
    DegenerateCoefficient(&'static str),

    #[error("characteristic roots are complex (discriminant {0})")]
    ComplexRoots(f64),

    #[error("F1 vanishes inside the grid near rho = {0}")]
    TurningPointOnGrid(f64),
}

pub(crate) fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg()))
    }
}
