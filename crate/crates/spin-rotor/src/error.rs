use thiserror::Error;

/// Errors produced by state construction, validation, and the oracle layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("state norm {norm} deviates from 1 by more than {tol}")]
    NotNormalized { norm: f64, tol: f64 },

    #[error("spinor norm {0} deviates from 1 beyond tolerance")]
    SpinorNotNormalized(f64),

    #[error("duplicate rotor sector m={0}")]
    DuplicateSector(i32),

    #[error("state has no sectors")]
    EmptyState,

    #[error("initial state must be at t=0, got t={0}")]
    NonzeroInitialTime(f64),

    #[error("sector m={m} lies outside the truncated space (m_max={m_max})")]
    OutsideTruncation { m: i32, m_max: u32 },

    #[error("rotor kinetic energy m_max^2/(2I) overflows f64 at m_max={0}")]
    TruncationOverflow(u32),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unknown scenario '{0}'")]
    UnknownScenario(String),
}

pub type Result<T> = std::result::Result<T, Error>;
