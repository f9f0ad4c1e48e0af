use crate::syntax::ParseError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("term contains a division")]
    DivPresent,
    #[error("formula is not prenex")]
    NotPrenex,
    #[error("tuple length mismatch: {vars} variables, {values} values")]
    LengthMismatch { vars: usize, values: usize },
    #[error("variable order does not cover {0}")]
    OrderIncomplete(String),
    #[error("formula is not normalized: {0}")]
    NotNormalized(&'static str),
    #[error("formula is not peval-safe: {0}")]
    NotPevalSafe(&'static str),
    #[error("variables are not standardized apart: {0} is bound twice or also free")]
    NotStandardizedApart(String),
    #[error("formula is not in positive form")]
    NotPositive,
    #[error("level {level} out of range for {blocks} blocks")]
    LevelOutOfRange { level: usize, blocks: usize },
    #[error("propositional variables are not allowed here")]
    PropVarPresent,
    #[error("formula is not positive prenex")]
    NotPositivePrenex,
    #[error("atom uses {0}, which is outside the block structure")]
    BlockMismatch(String),
    #[error("real variables present in a propositional formula")]
    RealVarsPresent,
    #[error("formula has free variables: {0}")]
    NotClosed(String),
    #[error("no grid candidates for {0}")]
    GridIncomplete(String),
    #[error("expected {expected} values, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Parse(#[from] ParseError),
}

pub type Result<T> = std::result::Result<T, Error>;
