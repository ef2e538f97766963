use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter `{name}` = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("Hermitian eigen-decomposition did not converge")]
    EigenFailure,

    #[error("state is separable (entanglement {0:e}); no sudden-death point exists")]
    Separable(f64),

    #[error("root function has no sign change on [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error("root function changes sign more than once; brackets: {brackets:?}")]
    MultipleCrossings { brackets: Vec<(f64, f64)> },

    #[error("local filter annihilates the state (trace {0:e})")]
    VanishingNormalization(f64),

    #[error("negative radicand {value:e} in {context}")]
    NegativeRadicand { value: f64, context: &'static str },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("no extremum found on the constraint curve: {0}")]
    NoExtremum(String),
}

impl Error {
    pub(crate) fn out_of_range(name: &'static str, value: f64, range: &'static str) -> Self {
        Error::OutOfRange { name, value, range }
    }
}
