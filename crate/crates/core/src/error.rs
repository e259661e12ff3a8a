use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("malformed scalar `{0}`")]
    Scalar(String),
    #[error("unknown coordinate `{0}`")]
    Coord(String),
    #[error("malformed derivative atom `{0}`")]
    Atom(String),
    #[error("malformed point assignment `{0}`")]
    Point(String),
    #[error("unknown mode `{0}` (expected `goursat` or `flag2`)")]
    Mode(String),
    #[error("{0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("product of two atom-bearing expressions")]
    AtomProduct,
    #[error("mode mismatch between operands")]
    ModeMismatch,
    #[error("coordinate `{0}` has no value at the point")]
    Unassigned(String),
    #[error("assignment uses non-base coordinate `{0}`")]
    NonBaseAssignment(String),
    #[error("numeric point required, found parameters in `{0}`")]
    Parametric(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error("empty class code")]
    Empty,
    #[error("letter `{0}` outside the alphabet of this mode")]
    Alphabet(String),
    #[error("first letter must be 1")]
    FirstLetter,
    #[error("the first two letters of a Goursat code must be 1")]
    SecondLetter,
    #[error("letter 3 at position {0} is not preceded by a letter 2")]
    ThreeBeforeTwo(usize),
    #[error("code length {got} below the minimum {min} for this mode")]
    TooShort { got: usize, min: usize },
    #[error("position {j} out of range for a code of length {r}")]
    OutOfRange { j: usize, r: usize },
    #[error("operation is defined for flag2 codes only")]
    Flag2Only,
    #[error("operation is defined for goursat codes only")]
    GoursatOnly,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error("unknown component `{0}`")]
    UnknownComponent(String),
    #[error("{0}")]
    Invalid(String),
}
