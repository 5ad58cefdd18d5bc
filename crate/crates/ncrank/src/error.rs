use thiserror::Error;

/// Errors surfaced by the library. The CLI maps these onto its exit-code
/// contract, so variants are kept coarse and stable.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("operation requires an acyclic quiver")]
    CyclicQuiver,

    #[error("spaces do not form a subrepresentation: arrow {arrow} maps outside the target space")]
    InvalidSubrepresentation { arrow: String },

    #[error("field of order {order} is too small: need more than {needed}")]
    FieldTooSmall { order: u64, needed: u64 },

    #[error(
        "randomized search exhausted {attempts} attempts (last blow-up size {last_d}); \
         best certified rank lower bound {best_rank}"
    )]
    RetriesExhausted {
        attempts: u32,
        last_d: usize,
        best_rank: usize,
    },

    #[error("oracle enumeration would exceed the work ceiling ({work} > {limit})")]
    OracleInfeasible { work: u128, limit: u64 },

    #[error("invalid instance: {0}")]
    Validation(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}
