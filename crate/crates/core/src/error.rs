use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failure families surfaced by the library. The CLI maps [`Error::family`]
/// onto distinct exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("polynomial is not squarefree")]
    NonSquarefree,
    #[error("polynomial is not monic")]
    NonMonic,
    #[error("{0} is not an odd prime")]
    NotOddPrime(String),
    #[error("{0} is not prime")]
    NotPrime(String),
    #[error("{0} is not squarefree")]
    NotSquarefree(String),
    #[error("precision exhausted after {0} bits")]
    PrecisionExhausted(u32),
    #[error("square-root generators are dependent modulo squares")]
    DependentGenerators,
    #[error("field already has a complex embedding")]
    AlreadyImaginary,
    #[error("division by zero")]
    DivisionByZero,
    #[error("minimal polynomial is reducible (zero divisor found)")]
    NotAField,
    #[error("field is not CM")]
    NotCm,
    #[error("elements belong to different fields")]
    FieldMismatch,
    #[error("prime {0} divides the index of the equation order")]
    IndexDivisor(String),
    #[error("zero ideal")]
    ZeroIdeal,
    #[error("prime ideals {0} and {1} are equal or conjugate")]
    ConjugateCollision(usize, usize),
    #[error("principality could not be decided within the search budget")]
    InconclusivePrincipality,
    #[error("two window points project to the same planar value")]
    InjectivityFailure,
    #[error("condition u*pi > 36*v not certified: {0}")]
    ConditionFailed(String),
    #[error("eps = {0} is too large (must be < 0.1)")]
    TooLargeEps(f64),
    #[error("search box {0} is smaller than the largest embedding of sqrt(alpha)")]
    BoxTooSmall(String),
    #[error("prime {0} does not split completely")]
    SplitConditionFailed(u64),
    #[error("prime {0} divides a generator")]
    RamifiedPrime(u64),
    #[error("search exhausted below cap {0}")]
    SearchExhausted(u64),
    #[error("degree {0} too small for the class-number bound (needs >= 4)")]
    DegreeTooSmall(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Coarse grouping used for exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorFamily {
    Arithmetic,
    Field,
    Ideal,
    Construction,
    Counting,
    Tower,
    Input,
}

impl Error {
    pub fn family(&self) -> ErrorFamily {
        use Error::*;
        match self {
            NonSquarefree | PrecisionExhausted(_) | NotOddPrime(_) | NotPrime(_) | NotSquarefree(_) => {
                ErrorFamily::Arithmetic
            }
            NonMonic | DependentGenerators | AlreadyImaginary | DivisionByZero | NotAField | NotCm
            | FieldMismatch => ErrorFamily::Field,
            IndexDivisor(_) | ZeroIdeal | ConjugateCollision(..) | InconclusivePrincipality => ErrorFamily::Ideal,
            InjectivityFailure | ConditionFailed(_) => ErrorFamily::Construction,
            TooLargeEps(_) | BoxTooSmall(_) => ErrorFamily::Counting,
            SplitConditionFailed(_) | RamifiedPrime(_) | SearchExhausted(_) | DegreeTooSmall(_) => {
                ErrorFamily::Tower
            }
            InvalidArgument(_) | Parse { .. } => ErrorFamily::Input,
        }
    }
}
